#include "ggc/numerics.hpp"

#include "doctest.h"

using namespace ggc;

TEST_CASE("hermitian_eig on the identity") {
  auto eig = hermitian_eig(CMatrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(eig.values[i] == doctest::Approx(1.0));
  CHECK((eig.vectors.adjoint() * eig.vectors - CMatrix::Identity(3, 3)).norm() <
        1e-12);
}

TEST_CASE("hermitian_eig on a diagonal matrix sorts descending") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = -1.0;
  auto eig = hermitian_eig(m);
  CHECK(eig.values[0] == doctest::Approx(2.0));
  CHECK(eig.values[1] == doctest::Approx(-1.0));
  CHECK(std::abs(eig.vectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(eig.vectors(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig reconstructs a random Hermitian matrix") {
  Rng rng(7);
  CMatrix m = random_hermitian(rng, 6);
  auto eig = hermitian_eig(m);
  CHECK((eig.reconstruct() - m).norm() < 1e-10 * m.norm());
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
  Rng rng(9);
  CMatrix m = random_cmatrix(rng, 4, 4);
  m(0, 1) += Complex(1.0, 0.0);
  CHECK_THROWS_AS(hermitian_eig(m), NotHermitian);
}

TEST_CASE("eigenvalues invariant under unitary conjugation") {
  Rng rng(11);
  CMatrix m = random_hermitian(rng, 5);
  CMatrix u = random_unitary(rng, 5);
  auto a = hermitian_eig(m);
  auto b = hermitian_eig(CMatrix(u * m * u.adjoint()));
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("pseudoinverse basics") {
  CHECK(pseudoinverse(CMatrix(CMatrix::Zero(3, 2))).norm() == 0.0);

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  CMatrix p = pseudoinverse(d);
  CHECK(std::abs(p(0, 0) - Complex(0.5, 0)) < 1e-12);
  CHECK(std::abs(p(1, 1) - Complex(0.25, 0)) < 1e-12);
}

TEST_CASE("pseudoinverse of the two-vertex path Laplacian") {
  RMatrix lap(2, 2);
  lap << 1, -1, -1, 1;
  RMatrix p = pseudoinverse(lap);
  CHECK(std::abs(p(0, 0) - 0.25) < 1e-12);
  CHECK(std::abs(p(0, 1) + 0.25) < 1e-12);
  CHECK((lap * p * lap - lap).norm() < 1e-12);
  RVector delta(2);
  delta << 1, -1;
  CHECK(delta.dot(p * delta) == doctest::Approx(1.0));
}

TEST_CASE("pseudoinverse satisfies the four Penrose identities") {
  Rng rng(13);
  for (int trial = 0; trial < 4; ++trial) {
    CMatrix m = random_cmatrix(rng, 10, 10);
    CMatrix p = pseudoinverse(m);
    double scale = std::max(1.0, m.norm());
    CHECK((m * p * m - m).norm() < 1e-9 * scale);
    CHECK((p * m * p - p).norm() < 1e-9 * scale);
    CHECK(((m * p).adjoint() - m * p).norm() < 1e-9 * scale);
    CHECK(((p * m).adjoint() - p * m).norm() < 1e-9 * scale);
  }
}

TEST_CASE("min_norm_solve identity and symmetric split") {
  Rng rng(17);
  CVector b = random_cvector(rng, 4);
  CHECK((min_norm_solve(CMatrix(CMatrix::Identity(4, 4)), b) - b).norm() < 1e-12);

  CMatrix a(1, 2);
  a << Complex(1, 0), Complex(1, 0);
  CVector rhs(1);
  rhs << Complex(2, 0);
  CVector x = min_norm_solve(a, rhs);
  CHECK(std::abs(x[0] - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(x[1] - Complex(1, 0)) < 1e-12);
}

TEST_CASE("min_norm_solve orthogonality conditions") {
  Rng rng(19);
  CMatrix a = random_cmatrix(rng, 5, 8);
  CVector b = random_cvector(rng, 5);
  CVector x = min_norm_solve(a, b);
  CVector resid = a * x - b;
  // residual orthogonal to col(A)
  CHECK((a.adjoint() * resid).norm() < 1e-9 * b.norm());
  // x orthogonal to null(A): x sits in the row space, so P_row x = x
  CMatrix pinva = pseudoinverse(a);
  CHECK((pinva * a * x - x).norm() < 1e-9 * std::max(1.0, x.norm()));
}

TEST_CASE("min_norm_solve beats null-space perturbations") {
  Rng rng(23);
  CMatrix a = random_cmatrix(rng, 3, 6);
  CVector b = a * random_cvector(rng, 6);
  CVector x = min_norm_solve(a, b);
  CMatrix pn = CMatrix::Identity(6, 6) - pseudoinverse(a) * a;  // onto null(A)
  for (int trial = 0; trial < 20; ++trial) {
    CVector other = x + pn * random_cvector(rng, 6);
    CHECK((a * other - b).norm() < 1e-8 * std::max(1.0, b.norm()));
    CHECK(x.norm() <= other.norm() + 1e-12);
  }
}
