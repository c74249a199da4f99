#include "ggc/dectree.hpp"

#include "doctest.h"

using namespace ggc;

namespace {

DecisionTree leaf_only() {
  DecisionTree t;
  t.nodes.resize(1);
  t.nodes[0].query = -1;
  t.nodes[0].output = "z";
  return t;
}

// Full binary tree of the given depth querying position = level.
DecisionTree full_binary(int depth, bool color_red_ones = false) {
  DecisionTree t;
  std::function<int(int)> build = [&](int level) {
    int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    if (level == depth) {
      t.nodes[id].query = -1;
      t.nodes[id].output = "leaf" + std::to_string(id);
      return id;
    }
    t.nodes[id].query = level;
    int c0 = build(level + 1);
    int c1 = build(level + 1);
    t.nodes[id].children["0"] = c0;
    t.nodes[id].children["1"] = c1;
    if (color_red_ones) {
      t.nodes[id].colors["0"] = "black";
      t.nodes[id].colors["1"] = "red";
    }
    return id;
  };
  build(0);
  return t;
}

DecisionTree path_tree(int depth, const std::string& color) {
  DecisionTree t;
  for (int i = 0; i < depth; ++i) {
    t.nodes.emplace_back();
    t.nodes[i].query = i;
    t.nodes[i].children["0"] = i + 1;
    t.nodes[i].children["1"] = static_cast<int>(2 * depth - i);
    t.nodes[i].colors["0"] = color;
    t.nodes[i].colors["1"] = "red";
  }
  // chain leaves: node depth is the terminal leaf; extra leaves for "1" edges
  for (int i = depth; i <= 2 * depth; ++i) {
    t.nodes.emplace_back();
    t.nodes[i].query = -1;
    t.nodes[i].output = "l" + std::to_string(i);
  }
  return t;
}

}  // namespace

TEST_CASE("validate_scheme on the leaf-only tree") {
  auto t = leaf_only();
  WeightingScheme s;
  s.weight[0] = 0.0;
  auto rep = validate_scheme(t, s, 1e-9);
  CHECK(rep.valid);
  auto res = wdt(t);
  CHECK(res.root_weight == doctest::Approx(0.0));
}

TEST_CASE("binary_analytic closed forms") {
  CHECK(binary_analytic(0, 0).w == doctest::Approx(1.0));
  CHECK(binary_analytic(1, 0).w == doctest::Approx((1.0 + std::sqrt(5.0)) / 2));
  CHECK(binary_analytic(3.7, 3.7).w == doctest::Approx(4.7));
  auto sol = binary_analytic(2.0, 0.5);
  // certificates are feasible: PSD, off-diagonal difference one
  Eigen::SelfAdjointEigenSolver<RMatrix> ex(sol.x);
  CHECK(ex.eigenvalues().minCoeff() >= -1e-12);
  CHECK(sol.x(0, 1) - sol.y(0, 1) == doctest::Approx(1.0));
  CHECK(sol.w - 2.0 >= sol.x(0, 0) + sol.y(0, 0) - 1e-12);
  CHECK(sol.w - 0.5 >= sol.x(1, 1) + sol.y(1, 1) - 1e-12);
}

TEST_CASE("validate_scheme detects a broken off-diagonal constraint") {
  auto t = full_binary(1);
  WeightingScheme s;
  auto sol = binary_analytic(0, 0);
  s.weight[0] = sol.w;
  s.weight[1] = 0.0;
  s.weight[2] = 0.0;
  s.certs[0] = {sol.x, sol.y};
  CHECK(validate_scheme(t, s, 1e-8).valid);
  s.certs[0].x(0, 1) = 0.0;
  s.certs[0].x(1, 0) = 0.0;
  auto rep = validate_scheme(t, s, 1e-8);
  CHECK(!rep.valid);
  CHECK(rep.worst_offdiag == doctest::Approx(1.0));
}

TEST_CASE("solve_node_sdp: single child has no constraints") {
  RVector w(1);
  w << 2.5;
  auto sol = solve_node_sdp(w);
  CHECK(sol.w == doctest::Approx(2.5));
  CHECK(sol.x(0, 0) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("solve_node_sdp matches binary_analytic") {
  RVector w(2);
  w << 0, 0;
  auto sol = solve_node_sdp(w);
  CHECK(sol.w == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.gap <= 1e-6);

  Rng rng(401);
  for (int trial = 0; trial < 25; ++trial) {
    RVector cw(2);
    cw << rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0);
    auto s = solve_node_sdp(cw);
    auto a = binary_analytic(cw[0], cw[1]);
    CHECK(s.w == doctest::Approx(a.w).epsilon(1e-6));
    CHECK(s.gap <= 1e-6 * std::max(1.0, s.w));
    CHECK(s.dual_value <= s.w + 1e-9);
  }
}

TEST_CASE("solve_node_sdp: three symmetric children") {
  RVector w(3);
  w << 0, 0, 0;
  auto sol = solve_node_sdp(w);
  // X = J, Y = 0 is feasible with value 1; the dual (J - I)/2 matches it
  CHECK(sol.w == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.gap <= 1e-6);
}

TEST_CASE("solve_node_sdp: asymmetric three-child node brackets tightly") {
  RVector w(3);
  w << 10, 0, 0;
  auto sol = solve_node_sdp(w);
  CHECK(sol.gap <= 1e-6 * std::max(1.0, sol.w));
  // must beat the best Y = 0 certificate (about 10.18) and the BT20 point
  CHECK(sol.w < 10.18);
  CHECK(sol.w >= 10.0);
  // primal certificates feasible
  Eigen::SelfAdjointEigenSolver<RMatrix> ex(sol.x), ey(sol.y);
  CHECK(ex.eigenvalues().minCoeff() >= -1e-9);
  CHECK(ey.eigenvalues().minCoeff() >= -1e-9);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) CHECK(sol.x(i, j) - sol.y(i, j) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("solve_node_sdp handles five children") {
  Rng rng(409);
  RVector w(5);
  for (int i = 0; i < 5; ++i) w[i] = rng.uniform(0.0, 4.0);
  auto sol = solve_node_sdp(w);
  CHECK(sol.gap <= 1e-6 * std::max(1.0, sol.w));
  Eigen::SelfAdjointEigenSolver<RMatrix> eg(sol.gamma);
  CHECK(eg.eigenvalues().cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  for (int i = 0; i < 5; ++i) CHECK(sol.gamma(i, i) == 0.0);
}

TEST_CASE("bt20_scheme: all-black path of depth 3") {
  auto t = path_tree(3, "black");
  auto scheme = bt20_scheme(t);
  CHECK(validate_scheme(t, scheme, 1e-8).valid);
  CHECK(scheme.weight[0] <= 3.0 * std::sqrt(3.0) + 1e-9);
}

TEST_CASE("bt20_scheme: complete binary tree of depth 2 with red edges") {
  auto t = full_binary(2, true);
  CHECK(t.max_red() == 2);
  auto scheme = bt20_scheme(t);
  CHECK(validate_scheme(t, scheme, 1e-8).valid);
  CHECK(scheme.weight[0] <= 6.0 + 1e-9);
}

TEST_CASE("bt20_scheme with alpha = 1 has unit off-diagonal gaps") {
  // all red, depth 2: G = T = 2, alpha = 1, Y vanishes
  auto t = full_binary(2);
  auto scheme = bt20_scheme(t, 2, 2);
  CHECK(validate_scheme(t, scheme, 1e-8).valid);
  for (const auto& [id, cert] : scheme.certs) {
    CHECK(cert.y.norm() == doctest::Approx(0.0));
    CHECK(cert.x(0, 1) == doctest::Approx(1.0));
  }
  // black and red drops both at least 1
  for (const auto& [id, cert] : scheme.certs) {
    CHECK(cert.x(0, 0) + cert.y(0, 0) >= 1.0 - 1e-12);
  }
}

TEST_CASE("bt20_scheme rejects two black edges at a node") {
  auto t = full_binary(1);
  t.nodes[0].colors["0"] = "black";
  t.nodes[0].colors["1"] = "black";
  CHECK_THROWS_AS(bt20_scheme(t), InvalidColoring);
}

TEST_CASE("wdt equals the iterated binary closed form on full binary trees") {
  for (int depth : {1, 2, 3}) {
    auto t = full_binary(depth);
    auto res = wdt(t);
    double want = 0.0;
    for (int d = 0; d < depth; ++d) want = binary_analytic(want, want).w;
    CHECK(res.root_weight == doctest::Approx(want).epsilon(1e-6));
    CHECK(validate_scheme(t, res.scheme, 1e-6).valid);
  }
}

TEST_CASE("wdt is an upper-bounded by the BT20 scheme") {
  auto t = full_binary(3, true);
  auto opt = wdt(t);
  auto bt = bt20_scheme(t);
  CHECK(opt.root_weight <= bt.weight[t.root] + 1e-6);
}

TEST_CASE("wdt monotone under raising a subtree's weights") {
  // raising one child weight never lowers the root value
  RVector w(2);
  w << 1.0, 2.0;
  auto base = solve_node_sdp(w);
  w << 1.5, 2.0;
  auto raised = solve_node_sdp(w);
  CHECK(raised.w >= base.w - 1e-9);
}

TEST_CASE("tree_to_composition: depth-1 binary tree sizes at most 2") {
  auto t = full_binary(1);
  auto res = wdt(t);
  std::vector<std::vector<std::string>> inputs = {{"0"}, {"1"}};
  auto comp = tree_to_composition(t, res.scheme, inputs);
  CHECK(comp.composed.feasibility.feasible);
  for (int x = 0; x < 2; ++x) {
    CHECK(comp.composed.plus_sizes[x] <= 2.0 * comp.root_weight + 1e-6);
    CHECK(comp.composed.minus_sizes[x] <= 2.0 * comp.root_weight + 1e-6);
  }
}

TEST_CASE("tree_to_composition: leaf-only tree is empty") {
  auto t = leaf_only();
  WeightingScheme s;
  s.weight[0] = 0.0;
  auto comp = tree_to_composition(t, s, {});
  CHECK(comp.composed.plus_sizes.empty());
  CHECK(comp.root_weight == 0.0);
}

TEST_CASE("tree_to_composition: depth-3 path with the BT20 scheme") {
  auto t = path_tree(3, "black");
  auto scheme = bt20_scheme(t);
  std::vector<std::vector<std::string>> inputs = {
      {"0", "0", "0"}, {"0", "0", "1"}, {"1", "0", "0"}};
  auto comp = tree_to_composition(t, scheme, inputs);
  CHECK(comp.composed.feasibility.feasible);
  double cap = 2.0 * 3.0 * std::sqrt(3.0) + 1e-6;
  for (size_t x = 0; x < inputs.size(); ++x) {
    CHECK(comp.composed.plus_sizes[x] <= cap);
    CHECK(comp.composed.minus_sizes[x] <= cap);
  }
}

TEST_CASE("tree_to_composition with the solver's certificates on a 3-ary tree") {
  DecisionTree t;
  t.nodes.resize(4);
  t.nodes[0].query = 0;
  for (int c = 0; c < 3; ++c) {
    t.nodes[0].children[std::to_string(c)] = c + 1;
    t.nodes[c + 1].query = -1;
    t.nodes[c + 1].output = std::to_string(c);
  }
  auto res = wdt(t);
  std::vector<std::vector<std::string>> inputs = {{"0"}, {"1"}, {"2"}};
  auto comp = tree_to_composition(t, res.scheme, inputs);
  CHECK(comp.composed.feasibility.feasible);
  for (int x = 0; x < 3; ++x) {
    CHECK(comp.composed.plus_sizes[x] <= 2.0 * comp.root_weight + 1e-6);
  }
}
