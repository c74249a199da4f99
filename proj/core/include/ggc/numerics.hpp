#pragma once

#include <Eigen/Dense>
#include <complex>

#include "ggc/errors.hpp"
#include "ggc/rng.hpp"

namespace ggc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Hermitian eigendecomposition, eigenvalues sorted descending and
/// eigenvector columns orthonormal. Reconstruction `values`/`vectors`
/// satisfies ||M - V diag(l) V^H|| <= tol * ||M||.
struct EigDecomp {
  RVector values;
  CMatrix vectors;

  CMatrix reconstruct() const {
    return vectors * values.asDiagonal() * vectors.adjoint();
  }
};

inline constexpr double kDefaultRankTol = 1e-12;

bool is_hermitian(const CMatrix& m, double tol);

/// Diagonalize a Hermitian matrix. Throws NotHermitian when
/// ||M - M^H|| > tol * ||M|| (Frobenius norms).
EigDecomp hermitian_eig(const CMatrix& m, double tol = 1e-9);

/// Moore-Penrose pseudoinverse. Hermitian inputs go through an
/// eigendecomposition (the dominant Laplacian use), everything else
/// through an SVD. Singular values below rank_tol * sigma_max are
/// treated as zero.
CMatrix pseudoinverse(const CMatrix& m, double rank_tol = kDefaultRankTol);
RMatrix pseudoinverse(const RMatrix& m, double rank_tol = kDefaultRankTol);

/// Minimal-norm least-squares solution x = A^+ b.
CVector min_norm_solve(const CMatrix& a, const CVector& b,
                       double rank_tol = kDefaultRankTol);
RVector min_norm_solve(const RMatrix& a, const RVector& b,
                       double rank_tol = kDefaultRankTol);

/// Kronecker product, used for oracles acting as O (x) I_W on M (x) W.
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Deterministic random samplers for tests and fuzz harnesses.
CMatrix random_cmatrix(Rng& rng, int rows, int cols);
CMatrix random_hermitian(Rng& rng, int n);
CMatrix random_unitary(Rng& rng, int n);
CVector random_cvector(Rng& rng, int n);
RVector random_rvector(Rng& rng, int n);

}  // namespace ggc
