#include "ggc/reflection.hpp"

#include "doctest.h"
#include "ggc/catalog.hpp"

using namespace ggc;

namespace {

SpanProgram single_query_program(int n_inputs, const std::vector<bool>& bit) {
  SpanProgram sp;
  sp.kernel_basis = CMatrix(2, 0);
  sp.target = CVector::Zero(2);
  sp.target[1] = 1.0;
  for (int x = 0; x < n_inputs; ++x) {
    sp.domain.push_back("x" + std::to_string(x));
    CMatrix proj = CMatrix::Zero(2, 2);
    proj(bit[x] ? 1 : 0, bit[x] ? 1 : 0) = 1.0;
    sp.projector.push_back(proj);
  }
  return sp;
}

}  // namespace

TEST_CASE("to_reflection on a single-input problem with zero witness") {
  StateConversionProblem p;
  p.domain = {"x"};
  CVector e0 = CVector::Zero(2), e1 = CVector::Zero(2);
  e0[0] = 1;
  e1[1] = 1;
  p.sigma = {e0};
  p.tau = {e1};
  p.oracle = {CMatrix::Identity(1, 1)};
  std::vector<CVector> w = {CVector::Zero(1)};
  auto rw = to_reflection(p, w);
  CHECK(rw.problem.sigma_plus[0].size() == 4);
  CHECK(std::abs(rw.problem.sigma_plus[0][0] - Complex(1 / std::sqrt(2.0), 0)) <
        1e-12);
  CHECK(std::abs(rw.problem.sigma_minus[0][3] + Complex(1 / std::sqrt(2.0), 0)) <
        1e-12);
  CHECK(rw.witnesses.plus_size(0) == doctest::Approx(0.0));
  CHECK(check_feasibility(rw.problem, rw.witnesses, 1e-12).feasible);
}

TEST_CASE("to_reflection preserves witness norms and feasibility") {
  Rng rng(101);
  auto fx = random_conversion_fixture(rng, 3, 3, 2);
  REQUIRE(check_conversion_feasibility(fx.problem, fx.witnesses, 1e-9).feasible);
  auto rw = to_reflection(fx.problem, fx.witnesses);
  for (int x = 0; x < 3; ++x) {
    double base = fx.witnesses[x].squaredNorm();
    CHECK(rw.witnesses.plus_size(x) == doctest::Approx(base).epsilon(1e-10));
    CHECK(rw.witnesses.minus_size(x) == doctest::Approx(base).epsilon(1e-10));
  }
  auto rep = check_feasibility(rw.problem, rw.witnesses, 1e-9);
  CHECK(rep.feasible);
  // eigenvalue normal form
  for (int x = 0; x < 3; ++x) {
    CHECK((rw.problem.oracle[x].apply(rw.witnesses.w_plus[x]) -
           rw.witnesses.w_plus[x]).norm() < 1e-9);
    CHECK((rw.problem.oracle[x].apply(rw.witnesses.w_minus[x]) +
           rw.witnesses.w_minus[x]).norm() < 1e-9);
  }
}

TEST_CASE("from_reflection round trip preserves the squared norm") {
  Rng rng(103);
  auto fx = random_conversion_fixture(rng, 2, 2, 2);
  auto rw = to_reflection(fx.problem, fx.witnesses);
  auto back = from_reflection(fx.problem, rw.witnesses);
  auto rep = check_conversion_feasibility(fx.problem, back, 1e-8);
  CHECK(rep.feasible);
  for (int x = 0; x < 2; ++x) {
    double want = (rw.witnesses.plus_size(x) + rw.witnesses.minus_size(x)) / 2.0;
    CHECK(back[x].squaredNorm() == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("from_reflection on the constant problem with zero witnesses") {
  StateConversionProblem p;
  p.domain = {"x", "y"};
  CVector e0 = CVector::Zero(2);
  e0[0] = 1;
  p.sigma = {e0, e0};
  p.tau = {e0, e0};
  p.oracle = {CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)};
  WitnessFamily zero;
  for (int x = 0; x < 2; ++x) {
    zero.w_plus.push_back(CVector::Zero(4));
    zero.w_minus.push_back(CVector::Zero(4));
  }
  auto back = from_reflection(p, zero);
  for (const auto& wx : back) CHECK(wx.norm() == doctest::Approx(0.0));
}

TEST_CASE("check_feasibility flags a corrupted family") {
  Rng rng(107);
  auto fx = random_conversion_fixture(rng, 3, 3, 1);
  auto rw = to_reflection(fx.problem, fx.witnesses);
  rw.witnesses.w_plus[1][0] += 0.1;
  auto rep = check_feasibility(rw.problem, rw.witnesses, 1e-9);
  CHECK(!rep.feasible);
  CHECK(rep.max_violation > 1e-3);
}

TEST_CASE("check_feasibility on an empty domain is vacuous") {
  StateReflectionProblem r;
  WitnessFamily w;
  auto rep = check_feasibility(r, w, 1e-12);
  CHECK(rep.feasible);
  CHECK(rep.max_violation == 0.0);
}

TEST_CASE("rescale: scalar case scales sizes by c^2 and 1/c^2") {
  Rng rng(109);
  auto fx = random_conversion_fixture(rng, 2, 2, 1);
  auto rw = to_reflection(fx.problem, fx.witnesses);
  const double c = 1.7;
  CMatrix d = CMatrix::Identity(rw.problem.dim_v(), rw.problem.dim_v());
  auto scaled = rescale(rw.problem, rw.witnesses, d, c, 1.0 / c);
  for (int x = 0; x < 2; ++x) {
    CHECK(scaled.witnesses.plus_size(x) ==
          doctest::Approx(c * c * rw.witnesses.plus_size(x)));
    CHECK(scaled.witnesses.minus_size(x) ==
          doctest::Approx(rw.witnesses.minus_size(x) / (c * c)));
  }
  CHECK(check_feasibility(scaled.problem, scaled.witnesses, 1e-9).feasible);
  CHECK(scaled.witnesses.max_plus_size() * scaled.witnesses.max_minus_size() ==
        doctest::Approx(rw.witnesses.max_plus_size() *
                        rw.witnesses.max_minus_size()));
}

TEST_CASE("rescale round trip is the identity") {
  Rng rng(113);
  auto fx = random_conversion_fixture(rng, 2, 2, 1);
  auto rw = to_reflection(fx.problem, fx.witnesses);
  int dv = rw.problem.dim_v();
  CMatrix d = random_unitary(rng, dv) + 0.2 * random_cmatrix(rng, dv, dv);
  Complex ap(1.3, 0.2), am(0.4, -0.7);
  auto fwd = rescale(rw.problem, rw.witnesses, d, ap, am);
  CHECK(check_feasibility(fwd.problem, fwd.witnesses, 1e-8).feasible);
  auto back = rescale(fwd.problem, fwd.witnesses, CMatrix(d.inverse()), 1.0 / ap,
                      1.0 / am);
  for (int x = 0; x < 2; ++x) {
    CHECK((back.problem.sigma_plus[x] - rw.problem.sigma_plus[x]).norm() < 1e-9);
    CHECK((back.problem.sigma_minus[x] - rw.problem.sigma_minus[x]).norm() < 1e-9);
    CHECK((back.witnesses.w_plus[x] - rw.witnesses.w_plus[x]).norm() < 1e-9);
  }
}

TEST_CASE("rescale rejects singular D") {
  Rng rng(127);
  auto fx = random_conversion_fixture(rng, 2, 2, 1);
  auto rw = to_reflection(fx.problem, fx.witnesses);
  CMatrix d = CMatrix::Zero(rw.problem.dim_v(), rw.problem.dim_v());
  d(0, 0) = 1.0;
  CHECK_THROWS_AS(rescale(rw.problem, rw.witnesses, d, 1.0, 1.0),
                  SingularScaling);
}

TEST_CASE("shift_potential keeps witnesses feasible") {
  auto hw = single_query_edge({"x0", "x1"}, {true, false});
  auto shifted = shift_potential(hw.problem, {5.0, 5.0});
  CHECK(check_feasibility(shifted, hw.witnesses, 1e-9).feasible);
  auto back = shift_potential(shifted, {-5.0, -5.0});
  for (int x = 0; x < 2; ++x) {
    CHECK((back.potential[x] - hw.problem.potential[x]).norm() < 1e-12);
  }
  auto zero = shift_potential(hw.problem, {0.0, 0.0});
  for (int x = 0; x < 2; ++x) {
    CHECK((zero.potential[x] - hw.problem.potential[x]).norm() == 0.0);
  }
}

TEST_CASE("span_to_hyperedge on the single-query program") {
  auto sp = single_query_program(2, {true, false});
  std::vector<CVector> w = {sp.target, sp.target};
  auto hw = span_to_hyperedge(sp, {true, false}, w);
  CHECK(hw.witnesses.plus_size(0) == doctest::Approx(1.0));
  CHECK(hw.witnesses.minus_size(1) == doctest::Approx(1.0));
  CHECK(hw.problem.delta[0][0] == doctest::Approx(1.0));
  CHECK(hw.problem.delta[1].norm() == 0.0);
  CHECK(hw.problem.potential[1][1] == doctest::Approx(-1.0));
  CHECK(check_feasibility(hw.problem, hw.witnesses, 1e-12).feasible);
}

TEST_CASE("span_to_hyperedge for the constant-one function") {
  SpanProgram sp;
  sp.domain = {"a", "b"};
  sp.kernel_basis = CMatrix(2, 0);
  sp.target = CVector::Zero(2);
  sp.target[0] = Complex(1.2, 0);
  sp.projector = {CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)};
  std::vector<CVector> w = {sp.target, sp.target};
  auto hw = span_to_hyperedge(sp, {true, true}, w);
  CHECK(hw.witnesses.plus_size(0) == doctest::Approx(1.44));
  CHECK(hw.witnesses.minus_size(0) == doctest::Approx(0.0));
}

TEST_CASE("span_to_hyperedge validates witnesses") {
  auto sp = single_query_program(2, {true, false});
  std::vector<CVector> bad = {sp.target, CVector::Zero(2)};
  CHECK_THROWS_AS(span_to_hyperedge(sp, {true, false}, bad), InvalidWitness);
}

TEST_CASE("hyperedge_to_span round trip preserves complexity") {
  auto sp = single_query_program(2, {true, false});
  std::vector<CVector> w = {sp.target, sp.target};
  auto hw = span_to_hyperedge(sp, {true, false}, w);
  auto back = hyperedge_to_span(hw.problem, hw.witnesses);
  CHECK(back.complexity == doctest::Approx(1.0));
  std::vector<bool> f = {true, false};
  auto again = span_to_hyperedge(back.program, f, back.witnesses);
  CHECK(again.witnesses.plus_size(0) == doctest::Approx(1.0));
  CHECK(again.witnesses.minus_size(1) == doctest::Approx(1.0));
}

TEST_CASE("database_hyperedge shapes") {
  Involution id2{CMatrix(CMatrix::Identity(2, 2))};
  {
    // function evaluation bot -> out_x with distinct outputs: the conversion
    // Gram targets are 1 - [out_x = out_y]
    Rng rng(131);
    RMatrix t(2, 2);
    t << 0, 1, 1, 0;
    auto recipe = prescribed_gram_witnesses(rng, t);
    auto hw = database_hyperedge_from_conversion(
        {"x0", "x1"}, {"bot", "bot"}, {"out0", "out1"}, recipe.oracles,
        recipe.witnesses);
    CHECK(hw.problem.vertex_set.size() == 3);
    CHECK(hw.problem.delta[0][hw.problem.vertex_index("bot")] ==
          doctest::Approx(1.0));
    CHECK(hw.problem.potential[0][hw.problem.vertex_index("out0")] ==
          doctest::Approx(1.0));
    for (int x = 0; x < 2; ++x) {
      CHECK(hw.witnesses.plus_size(x) ==
            doctest::Approx(2.0 * recipe.witnesses[x].squaredNorm()));
    }
  }
  {
    // database update with two inputs and distinct targets on both sides
    Rng rng(133);
    RMatrix t(2, 2);
    t << 0, 0, 0, 0;  // source labels differ and target labels differ
    auto recipe = prescribed_gram_witnesses(rng, t);
    auto hw = database_hyperedge_from_conversion(
        {"x0", "x1"}, {"sA", "sB"}, {"tA", "tB"}, recipe.oracles,
        recipe.witnesses);
    CHECK(hw.problem.vertex_set.size() == 4);
    hw.problem.validate(1e-10);
  }
  {
    // xi = eta: degenerate but valid, flow zero
    WitnessFamily w;
    w.w_plus = {CVector::Zero(2)};
    w.w_minus = {CVector::Zero(2)};
    auto hw = database_hyperedge({"x"}, {"a"}, {"a"}, {id2}, w);
    CHECK(hw.problem.delta[0].norm() == 0.0);
    CHECK(hw.problem.potential[0][0] == doctest::Approx(2.0));
  }
}

TEST_CASE("known_fraction_rescale") {
  {
    RVector pi(2);
    pi << 0.5, 0.5;
    WitnessFamily w;
    w.w_plus = {CVector::Zero(1)};
    w.w_minus = {CVector::Zero(1)};
    std::vector<Involution> oracles{Involution{CMatrix(CMatrix::Identity(1, 1))}};
    auto hw = known_fraction_rescale({"v0", "v1"}, pi, 0.5, {{0}}, oracles, w);
    CHECK(hw.problem.delta[0][0] == doctest::Approx(1.0));   // bot
    CHECK(hw.problem.delta[0][1] == doctest::Approx(-1.0));  // pi/eps = 1
    CHECK(hw.problem.potential[0][1] == doctest::Approx(1.0));
  }
  {
    RVector pi(3);
    pi << 0.2, 0.3, 0.5;
    WitnessFamily w;
    w.w_plus = {CVector::Zero(1)};
    w.w_minus = {CVector::Zero(1)};
    std::vector<Involution> oracles{Involution{CMatrix(CMatrix::Identity(1, 1))}};
    auto hw = known_fraction_rescale({"a", "b", "c"}, pi, 1.0, {{0, 1, 2}},
                                     oracles, w);
    for (int v = 0; v < 3; ++v) {
      CHECK(hw.problem.delta[0][v + 1] == doctest::Approx(-pi[v]));
    }
  }
  {
    RVector pi(2);
    pi << 0.5, 0.5;
    WitnessFamily w;
    w.w_plus = {CVector::Zero(1)};
    w.w_minus = {CVector::Zero(1)};
    std::vector<Involution> oracles{Involution{CMatrix(CMatrix::Identity(1, 1))}};
    CHECK_THROWS_AS(
        known_fraction_rescale({"v0", "v1"}, pi, 0.25, {{0}}, oracles, w),
        FractionMismatch);
  }
}

TEST_CASE("diagonal walk-register rescale preserves feasibility") {
  Rng rng(137);
  auto fx = random_conversion_fixture(rng, 3, 3, 2);
  auto rw = to_reflection(fx.problem, fx.witnesses);
  int dv = rw.problem.dim_v();
  CMatrix d = CMatrix::Identity(dv, dv);
  for (int i = 1; i < dv; ++i) d(i, i) = -std::sqrt(0.4) / std::sqrt(1.0 / 3);
  auto scaled = rescale(rw.problem, rw.witnesses, d, 1.0, 1.0);
  CHECK(check_feasibility(scaled.problem, scaled.witnesses, 1e-9).feasible);
}

TEST_CASE("las_vegas witnesses and sizes") {
  Rng rng(139);
  const int m = 2;
  CMatrix oracle = random_unitary(rng, m);
  {
    std::vector<CVector> trace;
    for (int t = 0; t < 5; ++t) {
      CVector phi = random_cvector(rng, m);
      trace.push_back(phi / phi.norm());  // fully queried every step
    }
    auto res =
        las_vegas_witnesses({trace}, {oracle}, std::vector<double>(5, 1.0));
    CHECK(res.plus_sizes[0] == doctest::Approx(5.0));
    CHECK(res.minus_sizes[0] == doctest::Approx(5.0));
    CHECK(res.witnesses.w_plus[0].squaredNorm() == doctest::Approx(5.0));
    CHECK((res.oracles[0].apply(res.witnesses.w_plus[0]) -
           res.witnesses.w_plus[0]).norm() < 1e-10);
  }
  {
    std::vector<double> alpha = {1, 2, 3, 4, 5};
    std::vector<std::vector<double>> stop = {{0, 0, 0, 0, 0, 1}};  // T = 5
    auto sizes = las_vegas_sizes(stop, alpha);
    CHECK(sizes[0].first == doctest::Approx(15.0));  // T(T+1)/2
    CHECK(sizes[0].second == doctest::Approx(1.0 + 0.5 + 1.0 / 3 + 0.25 + 0.2));
  }
  {
    auto res = las_vegas_witnesses({{}}, {oracle}, {});
    CHECK(res.plus_sizes[0] == 0.0);
    CHECK(res.witnesses.w_plus[0].size() == 0);
  }
  {
    std::vector<CVector> trace(3, CVector::Zero(m));
    CHECK_THROWS_AS(
        las_vegas_witnesses({trace}, {oracle}, std::vector<double>(2, 1.0)),
        ScheduleMismatch);
  }
}

TEST_CASE("las_vegas family matches the conversion Gram of a real trace") {
  Rng rng(149);
  const int m = 3;
  std::vector<CMatrix> oracle = {random_unitary(rng, m), random_unitary(rng, m)};
  CMatrix u0 = random_unitary(rng, m), u1 = random_unitary(rng, m),
          u2 = random_unitary(rng, m);
  std::vector<std::vector<CVector>> traces(2);
  std::vector<CVector> sigma(2), tau(2);
  for (int x = 0; x < 2; ++x) {
    CVector psi = CVector::Zero(m);
    psi[0] = 1;
    sigma[x] = psi;
    psi = u0 * psi;
    traces[x].push_back(psi);
    psi = u1 * (oracle[x] * psi);
    traces[x].push_back(psi);
    psi = u2 * (oracle[x] * psi);
    tau[x] = psi;
  }
  auto res = las_vegas_witnesses(traces, oracle, {1.0, 1.0});
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      Complex lhs = 2.0 * res.witnesses.w_plus[x].dot(res.witnesses.w_minus[y]);
      Complex rhs = sigma[x].dot(sigma[y]) - tau[x].dot(tau[y]);
      CHECK(std::abs(lhs - rhs) < 1e-10);
    }
  }
}

TEST_CASE("normalize_to_eigenform projects and reports the defect") {
  Rng rng(151);
  auto fx = random_conversion_fixture(rng, 2, 2, 1);
  auto rw = to_reflection(fx.problem, fx.witnesses);
  WitnessFamily noisy = rw.witnesses;
  CVector bump = 0.05 * random_cvector(rng, noisy.w_plus[0].size());
  noisy.w_plus[0] += bump;
  double discarded = normalize_to_eigenform(rw.problem, noisy);
  CHECK(discarded > 1e-4);
  for (int x = 0; x < 2; ++x) {
    CHECK((rw.problem.oracle[x].apply(noisy.w_plus[x]) - noisy.w_plus[x]).norm() <
          1e-9);
  }
}
