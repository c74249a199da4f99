#include "ggc/transducer.hpp"

#include "doctest.h"
#include "ggc/catalog.hpp"

using namespace ggc;

namespace {

ReflectionWithWitnesses random_reflection(Rng& rng, int n_inputs, int dim_m,
                                          int dim_w) {
  auto fx = random_conversion_fixture(rng, n_inputs, dim_m, dim_w);
  return to_reflection(fx.problem, fx.witnesses);
}

}  // namespace

TEST_CASE("full positive span gives U = I, empty span gives U = -I") {
  // A spanning the whole space: every basis vector appears as a positive pair
  StateReflectionProblem r;
  WitnessFamily w;
  const int dv = 2, dh = 1;
  for (int i = 0; i < dv + dh; ++i) {
    r.domain.push_back("x" + std::to_string(i));
    CVector sp = CVector::Zero(dv), wp = CVector::Zero(dh);
    if (i < dv) sp[i] = 1.0;
    else wp[i - dv] = 1.0;
    r.sigma_plus.push_back(sp);
    r.sigma_minus.push_back(CVector::Zero(dv));
    r.oracle.emplace_back(CMatrix(CMatrix::Identity(dh, dh)));
    w.w_plus.push_back(wp);
    w.w_minus.push_back(CVector::Zero(dh));
  }
  auto t = build_reflection(r, w);
  CHECK((t.u - CMatrix::Identity(dv + dh, dv + dh)).norm() < 1e-12);

  // Empty span: no positive vectors at all
  StateReflectionProblem r2;
  WitnessFamily w2;
  r2.domain = {"x"};
  r2.sigma_plus = {CVector::Zero(dv)};
  r2.sigma_minus = {CVector::Zero(dv)};
  r2.oracle.emplace_back(CMatrix(CMatrix::Identity(dh, dh)));
  w2.w_plus = {CVector::Zero(dh)};
  w2.w_minus = {CVector::Zero(dh)};
  auto t2 = build_reflection(r2, w2);
  CHECK((t2.u + CMatrix::Identity(dv + dh, dv + dh)).norm() < 1e-12);
}

TEST_CASE("build_reflection output is a unitary reflection") {
  Rng rng(211);
  auto rw = random_reflection(rng, 3, 2, 2);
  auto t = build_reflection(rw.problem, rw.witnesses);
  const int n = t.dim_v + t.dim_h;
  CHECK((t.u.adjoint() * t.u - CMatrix::Identity(n, n)).norm() < 1e-9);
  CHECK((t.u - t.u.adjoint()).norm() < 1e-9);
  CHECK((t.u * t.u - CMatrix::Identity(n, n)).norm() < 1e-9);
}

TEST_CASE("sandwich orthogonality holds for feasible families") {
  Rng rng(213);
  auto rw = random_reflection(rng, 4, 2, 1);
  const int dv = rw.problem.dim_v(), dh = rw.problem.dim_h();
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) {
      CVector pos(dv + dh), neg(dv + dh);
      pos.head(dv) = rw.problem.sigma_plus[x];
      pos.tail(dh) = rw.witnesses.w_plus[x];
      neg.head(dv) = rw.problem.sigma_minus[y];
      neg.tail(dh) = -rw.witnesses.w_minus[y];
      CHECK(std::abs(pos.dot(neg)) < 1e-9);
    }
  }
}

TEST_CASE("transduction on the reflection of a feasible family") {
  Rng rng(217);
  auto rw = random_reflection(rng, 3, 2, 2);
  auto t = build_reflection(rw.problem, rw.witnesses);
  for (int x = 0; x < 3; ++x) {
    auto rep = verify_transduction(t, rw.problem.oracle[x],
                                   rw.problem.sigma_plus[x],
                                   rw.problem.sigma_minus[x],
                                   rw.witnesses.w_plus[x],
                                   rw.witnesses.w_minus[x], 1e-9);
    CHECK(rep.ok);
  }
}

TEST_CASE("transduction on the single-query span hyperedge") {
  auto hw = single_query_edge({"x0", "x1"}, {true, false});
  auto r = hw.problem.as_reflection();
  auto t = build_reflection(r, hw.witnesses);
  for (int x = 0; x < 2; ++x) {
    auto rep = verify_transduction(t, r.oracle[x], r.sigma_plus[x],
                                   r.sigma_minus[x], hw.witnesses.w_plus[x],
                                   hw.witnesses.w_minus[x], 1e-9);
    CHECK(rep.ok);
  }
}

TEST_CASE("corrupted witnesses are reported by the residual") {
  Rng rng(219);
  auto rw = random_reflection(rng, 3, 2, 1);
  auto t = build_reflection(rw.problem, rw.witnesses);
  CVector noisy = rw.witnesses.w_plus[0];
  noisy[0] += 0.1;
  auto rep = verify_transduction(t, rw.problem.oracle[0],
                                 rw.problem.sigma_plus[0],
                                 rw.problem.sigma_minus[0], noisy,
                                 rw.witnesses.w_minus[0], 1e-9);
  CHECK(!rep.ok);
  CHECK(rep.plus_residual > 0.05);
}

TEST_CASE("infeasible families fail the sandwich check") {
  Rng rng(223);
  auto rw = random_reflection(rng, 3, 2, 1);
  rw.witnesses.w_minus[1] += 0.3 * rw.witnesses.w_plus[1];
  // breaking the eigenvalue relation generally breaks orthogonality
  CHECK_THROWS_AS(build_reflection(rw.problem, rw.witnesses, 1e-9),
                  NotOrthogonal);
}

TEST_CASE("transduce_solve on identity and phase transducers") {
  Rng rng(227);
  {
    Transducer t;
    t.dim_v = 3;
    t.dim_h = 2;
    t.u = CMatrix::Identity(5, 5);
    CVector sigma = random_cvector(rng, 3);
    auto res = transduce_solve(t, sigma);
    CHECK((res.tau - sigma).norm() < 1e-12);
    CHECK(res.w_min.norm() < 1e-12);
  }
  {
    Transducer t;
    t.dim_v = 2;
    t.dim_h = 2;
    t.u = CMatrix::Identity(4, 4);
    t.u(0, 0) = -1;
    t.u(1, 1) = -1;
    CVector sigma = random_cvector(rng, 2);
    auto res = transduce_solve(t, sigma);
    CHECK((res.tau + sigma).norm() < 1e-12);
    CHECK(res.w_min.norm() < 1e-12);
  }
}

TEST_CASE("minimal catalyst is no larger than the supplied witness") {
  Rng rng(229);
  auto rw = random_reflection(rng, 3, 2, 2);
  auto t = build_reflection(rw.problem, rw.witnesses);
  for (int x = 0; x < 3; ++x) {
    auto folded = fold_oracle(t, rw.problem.oracle[x]);
    auto res = transduce_solve(folded, rw.problem.sigma_plus[x]);
    CHECK((res.tau - rw.problem.sigma_plus[x]).norm() < 1e-8);
    CHECK(res.w_min.norm() <= rw.witnesses.w_plus[x].norm() + 1e-9);
    auto res_m = transduce_solve(folded, rw.problem.sigma_minus[x]);
    CHECK((res_m.tau + rw.problem.sigma_minus[x]).norm() < 1e-8);
  }
}

TEST_CASE("emulate is exact when the catalyst vanishes") {
  Rng rng(233);
  // U = I on V + H transduces everything to itself with zero catalyst
  Transducer t;
  t.dim_v = 2;
  t.dim_h = 3;
  t.u = CMatrix::Identity(5, 5);
  Involution id(CMatrix(CMatrix::Identity(3, 3)));
  CVector sigma = random_cvector(rng, 2);
  for (int k : {1, 4, 16}) {
    auto res = emulate(t, id, sigma, k);
    CHECK(res.error < 1e-9);
  }
}

TEST_CASE("emulate at K = 1 stays within twice the catalyst norm") {
  Rng rng(239);
  auto rw = random_reflection(rng, 3, 2, 1);
  auto t = build_reflection(rw.problem, rw.witnesses);
  for (int x = 0; x < 3; ++x) {
    auto res = emulate(t, rw.problem.oracle[x], rw.problem.sigma_plus[x], 1);
    CHECK(res.error <= 2.0 * res.catalyst_norm + 1e-9);
  }
}

TEST_CASE("emulate error decreases over a K sweep in the median") {
  Rng rng(241);
  std::vector<double> med_errors;
  const std::vector<int> ks = {1, 4, 16, 64};
  std::vector<std::vector<double>> errors(ks.size());
  for (int trial = 0; trial < 6; ++trial) {
    auto rw = random_reflection(rng, 3, 2, 1);
    auto t = build_reflection(rw.problem, rw.witnesses);
    for (size_t i = 0; i < ks.size(); ++i) {
      auto res = emulate(t, rw.problem.oracle[0], rw.problem.sigma_plus[0],
                         ks[i]);
      errors[i].push_back(res.error);
      CHECK(std::isfinite(res.error));
    }
  }
  for (size_t i = 0; i < ks.size(); ++i) {
    std::sort(errors[i].begin(), errors[i].end());
    med_errors.push_back(errors[i][errors[i].size() / 2]);
  }
  for (size_t i = 1; i < med_errors.size(); ++i) {
    CHECK(med_errors[i] <= med_errors[i - 1] + 1e-12);
  }
}
