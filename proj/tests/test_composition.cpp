#include "ggc/composition.hpp"

#include "doctest.h"
#include "ggc/catalog.hpp"

using namespace ggc;

namespace {

// Function-evaluation chain s -> m -> t over two database hyperedges with
// matching unit flows, potentials 1 on the path.
HypergraphInstance chained_instance(bool reverse_second = false) {
  Rng rng(301);
  RMatrix t = RMatrix::Zero(1, 1);
  auto r1 = prescribed_gram_witnesses(rng, t);
  auto r2 = prescribed_gram_witnesses(rng, t);
  auto first = database_hyperedge_from_conversion({"x"}, {"s"}, {"m"},
                                                  r1.oracles, r1.witnesses);
  auto second = reverse_second
                    ? database_hyperedge_from_conversion(
                          {"x"}, {"t"}, {"m"}, r2.oracles, r2.witnesses)
                    : database_hyperedge_from_conversion(
                          {"x"}, {"m"}, {"t"}, r2.oracles, r2.witnesses);
  HypergraphInstance inst;
  inst.vertices = {"s", "m", "t"};
  inst.boundary = {"s", "t"};
  inst.domain = {"x"};
  Hyperedge e1{"first", first.problem.vertex_set, first.problem, first.witnesses, 1.0};
  Hyperedge e2{"second", second.problem.vertex_set, second.problem, second.witnesses, 1.0};
  inst.edges = {e1, e2};
  return inst;
}

}  // namespace

TEST_CASE("validate_instance: single edge with all vertices on the boundary") {
  auto hw = single_query_edge({"x0", "x1"}, {true, false});
  HypergraphInstance inst;
  inst.vertices = {"s", "t"};
  inst.boundary = {"s", "t"};
  inst.domain = {"x0", "x1"};
  inst.edges.push_back({"e", {"s", "t"}, hw.problem, hw.witnesses, 1.0});
  auto rep = validate_instance(inst, 1e-10);
  CHECK(rep.valid);
  CHECK(rep.max_flow_residual == 0.0);
}

TEST_CASE("validate_instance: chained flows conserve at the middle vertex") {
  auto good = chained_instance(false);
  auto rep = validate_instance(good, 1e-9);
  CHECK(rep.valid);

  auto bad = chained_instance(true);
  auto rep2 = validate_instance(bad, 1e-9);
  CHECK(!rep2.valid);
  CHECK(rep2.max_flow_residual == doctest::Approx(2.0));
  CHECK(bad.vertices[rep2.worst_flow_vertex] == "m");
}

TEST_CASE("compose: single edge with weight 1 reproduces the edge sizes") {
  auto hw = single_query_edge({"x0", "x1"}, {true, false});
  HypergraphInstance inst;
  inst.vertices = {"s", "t"};
  inst.boundary = {"s", "t"};
  inst.domain = {"x0", "x1"};
  inst.edges.push_back({"e", {"s", "t"}, hw.problem, hw.witnesses, 1.0});
  auto res = compose(inst);
  CHECK(res.plus_sizes[0] == doctest::Approx(hw.witnesses.plus_size(0)));
  CHECK(res.minus_sizes[1] == doctest::Approx(hw.witnesses.minus_size(1)));
  CHECK(res.feasibility.feasible);
}

TEST_CASE("compose: doubling a weight doubles R+ and halves R- contributions") {
  auto inst = chained_instance(false);
  auto base = compose(inst);
  double d1p = inst.edges[0].witnesses.plus_size(0);
  double d1m = inst.edges[0].witnesses.minus_size(0);
  inst.edges[0].weight = 2.0;
  auto doubled = compose(inst);
  CHECK(doubled.plus_sizes[0] - base.plus_sizes[0] == doctest::Approx(d1p));
  CHECK(base.minus_sizes[0] - doubled.minus_sizes[0] ==
        doctest::Approx(d1m / 2.0));
  CHECK(doubled.feasibility.feasible);
  // additivity: sizes equal sum of w^{+-1} edge sizes exactly
  double want_plus = 0.0, want_minus = 0.0;
  for (const auto& e : inst.edges) {
    want_plus += e.weight * e.witnesses.plus_size(0);
    want_minus += e.witnesses.minus_size(0) / e.weight;
  }
  CHECK(doubled.plus_sizes[0] == doctest::Approx(want_plus).epsilon(1e-12));
  CHECK(doubled.minus_sizes[0] == doctest::Approx(want_minus).epsilon(1e-12));
}

TEST_CASE("compose: chained function evaluation is feasible end to end") {
  auto inst = chained_instance(false);
  auto res = compose(inst);
  CHECK(res.feasibility.feasible);
  CHECK(res.boundary_problem.delta[0][0] == doctest::Approx(1.0));
  CHECK(res.boundary_problem.delta[0][1] == doctest::Approx(-1.0));
  CHECK(res.boundary_problem.potential[0][0] == doctest::Approx(1.0));
}

TEST_CASE("resistance_cut: series chain of unit edges") {
  const int k = 4;
  std::vector<std::string> domain = {"x"};
  HypergraphInstance inst;
  inst.domain = domain;
  for (int i = 0; i <= k; ++i) inst.vertices.push_back("v" + std::to_string(i));
  inst.boundary = {"v0", "v" + std::to_string(k)};
  for (int i = 0; i < k; ++i) {
    auto hw = single_query_edge(domain, {true});
    Hyperedge he;
    he.name = "e" + std::to_string(i);
    he.vertices = {"v" + std::to_string(i), "v" + std::to_string(i + 1)};
    hw.problem.vertex_set = he.vertices;
    he.problem = hw.problem;
    he.witnesses = hw.witnesses;
    inst.edges.push_back(std::move(he));
  }
  // one open series path: R+ = k; with an extra blocked edge, the auto cut
  // picks it up
  auto hw_blocked = single_query_edge(domain, {false});
  Hyperedge blocked;
  blocked.name = "leak";
  blocked.vertices = {"v1", "far"};
  hw_blocked.problem.vertex_set = blocked.vertices;
  blocked.problem = hw_blocked.problem;
  blocked.witnesses = hw_blocked.witnesses;
  inst.vertices.push_back("far");
  inst.boundary.push_back("far");
  inst.edges.push_back(std::move(blocked));

  auto cut = resistance_cut(inst);
  CHECK(cut.formula_plus[0] == doctest::Approx(k));
  CHECK(cut.composed.plus_sizes[0] == doctest::Approx(k));
  REQUIRE(cut.cut[0].size() == 1);
  CHECK(inst.edges[cut.cut[0][0]].name == "leak");
  CHECK(cut.formula_minus[0] == doctest::Approx(1.0));
  CHECK(cut.composed.minus_sizes[0] == doctest::Approx(1.0));
  CHECK(cut.composed.feasibility.feasible);
}

TEST_CASE("resistance_cut: parallel duplicate halves R+") {
  std::vector<std::string> domain = {"x"};
  auto make_open_edge = [&](const std::string& name) {
    auto hw = single_query_edge(domain, {true});
    Hyperedge he;
    he.name = name;
    he.vertices = {"s", "t"};
    he.problem = hw.problem;
    he.witnesses = hw.witnesses;
    return he;
  };
  HypergraphInstance single;
  single.vertices = {"s", "t"};
  single.boundary = {"s", "t"};
  single.domain = domain;
  single.edges.push_back(make_open_edge("a"));
  auto r1 = resistance_cut(single);
  CHECK(r1.formula_plus[0] == doctest::Approx(1.0));

  HypergraphInstance doubled = single;
  doubled.edges.push_back(make_open_edge("b"));
  auto r2 = resistance_cut(doubled);
  CHECK(r2.formula_plus[0] == doctest::Approx(0.5));
  CHECK(r2.composed.plus_sizes[0] == doctest::Approx(0.5));
  CHECK(r2.composed.feasibility.feasible);
}

TEST_CASE("resistance_cut: user-supplied flow is dominated by the auto flow") {
  // two parallel unit edges; pushing everything down one edge costs 1 > 1/2
  std::vector<std::string> domain = {"x"};
  HypergraphInstance inst;
  inst.vertices = {"s", "t"};
  inst.boundary = {"s", "t"};
  inst.domain = domain;
  for (int i = 0; i < 2; ++i) {
    auto hw = single_query_edge(domain, {true});
    Hyperedge he;
    he.name = "p" + std::to_string(i);
    he.vertices = {"s", "t"};
    he.problem = hw.problem;
    he.witnesses = hw.witnesses;
    inst.edges.push_back(std::move(he));
  }
  std::vector<RVector> flows(1);
  flows[0] = RVector::Zero(2);
  flows[0][0] = 1.0;
  auto lop = resistance_cut(inst, flows);
  auto best = resistance_cut(inst);
  CHECK(lop.composed.plus_sizes[0] == doctest::Approx(1.0));
  CHECK(best.composed.plus_sizes[0] <= lop.composed.plus_sizes[0] + 1e-12);
  CHECK(lop.composed.feasibility.feasible);
}

TEST_CASE("resistance_cut: user cut that fails to separate is rejected") {
  std::vector<std::string> domain = {"x"};
  HypergraphInstance inst;
  inst.vertices = {"s", "t", "u"};
  inst.boundary = {"s", "t", "u"};
  inst.domain = domain;
  auto open_edge = single_query_edge(domain, {true});
  Hyperedge he;
  he.name = "open";
  he.vertices = {"s", "t"};
  he.problem = open_edge.problem;
  he.witnesses = open_edge.witnesses;
  inst.edges.push_back(he);
  auto blocked = single_query_edge(domain, {false});
  Hyperedge hb;
  hb.name = "blocked";
  hb.vertices = {"t", "u"};
  blocked.problem.vertex_set = hb.vertices;
  hb.problem = blocked.problem;
  hb.witnesses = blocked.witnesses;
  inst.edges.push_back(hb);
  // declaring an empty cut leaks the potential to boundary vertex u
  std::vector<std::vector<int>> cuts = {{}};
  CHECK_THROWS_AS(resistance_cut(inst, std::nullopt, cuts), NotCut);
  // cutting the blocked edge works
  cuts = {{1}};
  auto ok = resistance_cut(inst, std::nullopt, cuts);
  CHECK(ok.formula_minus[0] == doctest::Approx(1.0));
}

TEST_CASE("classic_embed: series AND of two single-query programs") {
  // domain x in {11, 10}: edge i open iff x_i = 1
  std::vector<std::string> domain = {"x11", "x10"};
  auto e1 = single_query_edge(domain, {true, true});
  auto e2 = single_query_edge(domain, {true, false});
  auto res = classic_embed({"s", "m", "t"}, "s", "t",
                           {{"s", "m"}, {"m", "t"}}, {e1, e2});
  CHECK(res.positive[0]);
  CHECK(!res.positive[1]);
  CHECK(res.formula_plus[0] == doctest::Approx(2.0));  // series law
  CHECK(res.composed.plus_sizes[0] == doctest::Approx(2.0));
  // x = 10: the cut is the single blocked edge
  CHECK(res.formula_minus[1] == doctest::Approx(1.0));
  CHECK(res.composed.minus_sizes[1] == doctest::Approx(1.0));
  CHECK(res.composed.feasibility.feasible);
}

TEST_CASE("classic_embed: parallel OR laws including the contracted graph") {
  std::vector<std::string> domain = {"x11", "x10", "x00"};
  auto e1 = single_query_edge(domain, {true, true, false});
  auto e2 = single_query_edge(domain, {true, false, false});
  auto res = classic_embed({"s", "t"}, "s", "t", {{"s", "t"}, {"s", "t"}},
                           {e1, e2});
  CHECK(res.formula_plus[0] == doctest::Approx(0.5));  // parallel law
  CHECK(res.formula_plus[1] == doctest::Approx(1.0));  // single live edge
  // x = 00: contracted graph has two parallel unit-conductance edges:
  // R_eff = 1/2, so R- = 2
  CHECK(res.formula_minus[2] == doctest::Approx(2.0));
  CHECK(res.composed.minus_sizes[2] == doctest::Approx(2.0));
  CHECK(res.composed.plus_sizes[0] == doctest::Approx(0.5));
  CHECK(res.composed.feasibility.feasible);
}

TEST_CASE("classic_embed rejects a wrong declared classification") {
  std::vector<std::string> domain = {"x"};
  auto e1 = single_query_edge(domain, {false});
  std::vector<bool> declared = {true};
  CHECK_THROWS_AS(classic_embed({"s", "t"}, "s", "t", {{"s", "t"}}, {e1},
                                declared),
                  NotConnected);
}

TEST_CASE("divide_conquer: two branches compose and sizes add") {
  // aux computes bit b = f_aux(x); branch b routes to its own leaf.
  Rng rng(307);
  std::vector<std::string> domain = {"x0", "x1", "x2"};
  std::vector<int> aux_val = {0, 1, 0};
  const int n = 3;
  RMatrix t(n, n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      t(x, y) = (x == y) ? 0.0 : 1.0 - (aux_val[x] == aux_val[y] ? 1.0 : 0.0);
    }
  }
  auto recipe = prescribed_gram_witnesses(rng, t);
  std::vector<std::string> outs;
  for (int x = 0; x < n; ++x) outs.push_back("b" + std::to_string(aux_val[x]));
  auto aux = database_hyperedge_from_conversion(domain, {"bot", "bot", "bot"},
                                                outs, recipe.oracles,
                                                recipe.witnesses);
  // ensure both branch vertices appear in the aux vertex set
  REQUIRE(aux.problem.n_vertices() == 3);

  // branch hyperedges: single-query-style controlled edges from b to a leaf,
  // quiet on inputs routed to the other branch
  auto make_branch = [&](int b) {
    HyperedgeWithWitnesses hw;
    hw.problem.vertex_set = {"b" + std::to_string(b), "leaf" + std::to_string(b)};
    hw.problem.domain = domain;
    for (int x = 0; x < n; ++x) {
      bool on = aux_val[x] == b;
      RVector d(2), u(2);
      d << (on ? 1.0 : 0.0), (on ? -1.0 : 0.0);
      u << (on ? 1.0 : 0.0), (on ? 1.0 : 0.0);
      hw.problem.delta.push_back(d);
      hw.problem.potential.push_back(u);
      CMatrix proj = CMatrix::Zero(2, 2);
      proj(on ? 1 : 0, on ? 1 : 0) = 1.0;
      hw.problem.oracle.emplace_back(
          CMatrix(2.0 * proj - CMatrix::Identity(2, 2)));
      CVector e1 = CVector::Zero(2);
      e1[1] = 1.0;
      hw.witnesses.w_plus.push_back(on ? e1 : CVector(CVector::Zero(2)));
      hw.witnesses.w_minus.push_back(CVector::Zero(2));
    }
    return hw;
  };
  std::map<std::string, HyperedgeWithWitnesses> family;
  family["b0"] = make_branch(0);
  family["b1"] = make_branch(1);
  std::vector<std::string> labels;
  for (int v : aux_val) labels.push_back("b" + std::to_string(v));
  auto res = divide_conquer(aux, "bot", family, labels);
  CHECK(res.composed.feasibility.feasible);
  for (int x = 0; x < n; ++x) {
    CHECK(res.composed.plus_sizes[x] <=
          res.aux_plus[x] + res.branch_plus[x] + 1e-9);
    CHECK(res.composed.minus_sizes[x] ==
          doctest::Approx(res.aux_minus[x] + res.branch_minus[x]));
  }
  // equivalence oracle: the same instance composed flat gives the same sizes
  auto flat = compose(res.instance);
  for (int x = 0; x < n; ++x) {
    CHECK(flat.plus_sizes[x] == doctest::Approx(res.composed.plus_sizes[x]));
    CHECK(flat.minus_sizes[x] == doctest::Approx(res.composed.minus_sizes[x]));
  }
}

TEST_CASE("divide_conquer rejects mismatched output labels") {
  Rng rng(311);
  RMatrix t = RMatrix::Zero(1, 1);
  auto recipe = prescribed_gram_witnesses(rng, t);
  auto aux = database_hyperedge_from_conversion({"x"}, {"bot"}, {"b0"},
                                                recipe.oracles, recipe.witnesses);
  std::map<std::string, HyperedgeWithWitnesses> family;  // missing b0
  CHECK_THROWS_AS(divide_conquer(aux, "bot", family, {"b0"}), OutputMismatch);
}
