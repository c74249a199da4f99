#include "ggc/io.hpp"

#include "doctest.h"
#include "ggc/catalog.hpp"
#include "ggc/report.hpp"
#include "ggc/selftest.hpp"

using namespace ggc;

TEST_CASE("graph json round trip") {
  WeightedGraph g;
  g.add_edge("a", "b", 2.0);
  g.add_edge("b", "c", 0.5);
  auto j = graph_to_json(g);
  auto g2 = graph_from_json(j);
  CHECK(g2.vertices == g.vertices);
  REQUIRE(g2.m() == 2);
  CHECK(g2.edges[1].r == doctest::Approx(0.5));
}

TEST_CASE("chain json round trip") {
  MarkovChain m{{"a", "b"}, RMatrix(2, 2)};
  m.P << 0.25, 0.75, 0.5, 0.5;
  auto m2 = chain_from_json(chain_to_json(m));
  CHECK((m2.P - m.P).norm() < 1e-15);
}

TEST_CASE("complex vectors and matrices survive the schema") {
  Rng rng(601);
  CVector v = random_cvector(rng, 5);
  CHECK((cvector_from_json(cvector_to_json(v)) - v).norm() == 0.0);
  CMatrix m = random_cmatrix(rng, 3, 4);
  CHECK((cmatrix_from_json(cmatrix_to_json(m)) - m).norm() == 0.0);
}

TEST_CASE("instance json round trip reproduces composed sizes") {
  auto fx = first_marked_index(3, {1, 0.5, 2}, {2, 1, 0.5});
  auto j = instance_to_json(fx.instance);
  auto inst = instance_from_json(j);
  auto cut = resistance_cut(inst);
  for (int x = 0; x < inst.n_inputs(); ++x) {
    CHECK(cut.composed.plus_sizes[x] ==
          doctest::Approx(fx.composed.plus_sizes[x]));
    CHECK(cut.composed.minus_sizes[x] ==
          doctest::Approx(fx.composed.minus_sizes[x]));
  }
}

TEST_CASE("generator references expand") {
  Json j;
  j["generator"] = Json{{"name", "dense_learning"}, {"n", 2}};
  auto inst = instance_from_json(j);
  CHECK(inst.n_inputs() == 4);
  auto composed = compose_auto(inst);
  CHECK(composed.plus_sizes[0] == doctest::Approx(2.0));
}

TEST_CASE("reflection problem and witnesses json round trip") {
  auto hw = single_query_edge({"x0", "x1"}, {true, false});
  auto r = hw.problem.as_reflection();
  auto r2 = reflection_from_json(reflection_to_json(r));
  auto w2 = witnesses_from_json(witnesses_to_json(hw.witnesses));
  CHECK(r2.domain == r.domain);
  CHECK(check_feasibility(r2, w2, 1e-9).feasible);
}

TEST_CASE("tree json round trip") {
  DecisionTree t;
  t.nodes.resize(3);
  t.nodes[0].query = 0;
  t.nodes[0].children = {{"0", 1}, {"1", 2}};
  t.nodes[0].colors = {{"0", "black"}, {"1", "red"}};
  t.nodes[1].query = -1;
  t.nodes[1].output = "no";
  t.nodes[2].query = -1;
  t.nodes[2].output = "yes";
  auto t2 = tree_from_json(tree_to_json(t));
  CHECK(t2.nodes[0].children.at("1") == 2);
  CHECK(t2.nodes[0].colors.at("0") == "black");
  CHECK(t2.nodes[2].output == "yes");
}

TEST_CASE("qwalk sizes-tier json round trip") {
  QWalkInstance q;
  q.graph.add_edge("a", "b", 2.0);
  q.domain = {"x"};
  q.marked = {{1}};
  q.alphabet = {"D0"};
  q.database = {{0}, {0}};
  q.setup_plus = RMatrix::Ones(2, 1) * 1.5;
  q.setup_minus = RMatrix::Ones(2, 1);
  q.update_plus = RMatrix::Ones(1, 1);
  q.update_minus = RMatrix::Ones(1, 1) * 2.0;
  q.check_plus.assign(2, RMatrix::Ones(1, 1));
  q.check_minus.assign(2, RMatrix::Ones(1, 1));
  auto q2 = qwalk_from_json(qwalk_to_json(q));
  CHECK(q2.setup_plus(0, 0) == doctest::Approx(1.5));
  CHECK(q2.update_minus(0, 0) == doctest::Approx(2.0));
  CHECK(q2.marked[0] == std::vector<int>{1});
}

TEST_CASE("qwalk synthesize reference is deterministic") {
  Json j;
  j["synthesize"] = Json{{"seed", 9}, {"vertices", 4}, {"states", 2}, {"inputs", 3}};
  auto a = qwalk_from_json(j);
  auto b = qwalk_from_json(j);
  CHECK((a.setup_plus - b.setup_plus).norm() == 0.0);
  CHECK(a.concrete);
}

TEST_CASE("json report numbers use 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(3.0) == "3");
  JsonNode n = JsonNode::object();
  n.set("value", 1.0 / 3.0);
  CHECK(n.dump() == "{\"value\":0.33333333333333331}");
}

TEST_CASE("report trees render as aligned text tables") {
  JsonNode rows = JsonNode::array();
  for (int i = 0; i < 2; ++i) {
    JsonNode row = JsonNode::object();
    row.set("input", "x" + std::to_string(i));
    row.set("value", i + 0.5);
    rows.push(std::move(row));
  }
  JsonNode rep = JsonNode::object();
  rep.set("sizes", std::move(rows));
  std::string text = rep.to_text();
  CHECK(text.find("input") != std::string::npos);
  CHECK(text.find("x1") != std::string::npos);
}

TEST_CASE("report bytes are identical across repeated dumps") {
  auto fx = dense_learning(2);
  auto j1 = instance_to_json(fx.instance).dump();
  auto fx2 = dense_learning(2);
  auto j2 = instance_to_json(fx2.instance).dump();
  CHECK(j1 == j2);
}

TEST_CASE("parse errors carry the ParseError code") {
  CHECK_THROWS_AS(load_json_file("/nonexistent/file.json"), ParseError);
  Json bad;
  bad["vertices"] = Json::array({"a"});
  CHECK_THROWS_AS(graph_from_json(bad), ParseError);
}
