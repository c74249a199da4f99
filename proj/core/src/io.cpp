#include "ggc/io.hpp"

#include <fstream>

#include "ggc/catalog.hpp"

namespace ggc {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ParseError(what); }

const Json& need(const Json& j, const std::string& key) {
  if (!j.contains(key)) fail("missing key '" + key + "'");
  return j.at(key);
}

}  // namespace

Json complex_to_json(const Complex& c) { return Json::array({c.real(), c.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2) fail("complex numbers are [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

Json cvector_to_json(const CVector& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
  return out;
}

CVector cvector_from_json(const Json& j) {
  if (!j.is_array()) fail("vector expected");
  CVector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = complex_from_json(j[i]);
  return v;
}

Json cmatrix_to_json(const CMatrix& m) {
  Json out = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

CMatrix cmatrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) fail("matrix expected");
  CMatrix m(j.size(), j[0].size());
  for (size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != j[0].size()) fail("ragged matrix");
    for (size_t c = 0; c < j[r].size(); ++c) {
      m(static_cast<int>(r), static_cast<int>(c)) = complex_from_json(j[r][c]);
    }
  }
  return m;
}

Json rvector_to_json(const RVector& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

RVector rvector_from_json(const Json& j) {
  if (!j.is_array()) fail("real vector expected");
  RVector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

Json graph_to_json(const WeightedGraph& g) {
  Json out;
  out["vertices"] = g.vertices;
  Json edges = Json::array();
  for (const auto& e : g.edges) {
    edges.push_back(Json{{"tail", g.vertices[e.tail]},
                         {"head", g.vertices[e.head]},
                         {"r", e.r}});
  }
  out["edges"] = edges;
  return out;
}

WeightedGraph graph_from_json(const Json& j) {
  WeightedGraph g;
  for (const auto& v : need(j, "vertices")) g.add_vertex(v.get<std::string>());
  for (const auto& e : need(j, "edges")) {
    g.add_edge(need(e, "tail").get<std::string>(),
               need(e, "head").get<std::string>(), need(e, "r").get<double>());
  }
  return g;
}

Json chain_to_json(const MarkovChain& m) {
  Json out;
  out["states"] = m.states;
  Json rows = Json::array();
  for (int r = 0; r < m.n(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.n(); ++c) row.push_back(m.P(r, c));
    rows.push_back(row);
  }
  out["P"] = rows;
  return out;
}

MarkovChain chain_from_json(const Json& j) {
  MarkovChain m;
  for (const auto& s : need(j, "states")) m.states.push_back(s.get<std::string>());
  const Json& rows = need(j, "P");
  m.P.resize(m.n(), m.n());
  if (rows.size() != static_cast<size_t>(m.n())) fail("P row count mismatch");
  for (int r = 0; r < m.n(); ++r) {
    if (rows[r].size() != static_cast<size_t>(m.n())) fail("P column mismatch");
    for (int c = 0; c < m.n(); ++c) m.P(r, c) = rows[r][c].get<double>();
  }
  return m;
}

RVector labeled_values_from_json(const Json& j,
                                 const std::vector<std::string>& labels,
                                 bool require_dist) {
  RVector out = RVector::Zero(labels.size());
  if (!j.is_object()) fail("expected a label -> value map");
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto pos = std::find(labels.begin(), labels.end(), it.key());
    if (pos == labels.end()) fail("unknown label '" + it.key() + "'");
    out[static_cast<int>(pos - labels.begin())] = it.value().get<double>();
  }
  if (require_dist) {
    if (out.minCoeff() < -1e-12 || std::abs(out.sum() - 1.0) > 1e-9) {
      fail("values must form a probability distribution");
    }
  }
  return out;
}

Json reflection_to_json(const StateReflectionProblem& r) {
  Json inputs = Json::array();
  for (int x = 0; x < r.size(); ++x) {
    inputs.push_back(Json{{"label", r.domain[x]},
                          {"sigma_plus", cvector_to_json(r.sigma_plus[x])},
                          {"sigma_minus", cvector_to_json(r.sigma_minus[x])},
                          {"oracle", cmatrix_to_json(r.oracle[x].dense())}});
  }
  return Json{{"inputs", inputs}};
}

StateReflectionProblem reflection_from_json(const Json& j) {
  StateReflectionProblem r;
  for (const auto& in : need(j, "inputs")) {
    r.domain.push_back(need(in, "label").get<std::string>());
    r.sigma_plus.push_back(cvector_from_json(need(in, "sigma_plus")));
    r.sigma_minus.push_back(cvector_from_json(need(in, "sigma_minus")));
    r.oracle.emplace_back(cmatrix_from_json(need(in, "oracle")));
  }
  r.validate(1e-8);
  return r;
}

Json witnesses_to_json(const WitnessFamily& w) {
  Json inputs = Json::array();
  for (int x = 0; x < w.size(); ++x) {
    inputs.push_back(Json{{"w_plus", cvector_to_json(w.w_plus[x])},
                          {"w_minus", cvector_to_json(w.w_minus[x])}});
  }
  return Json{{"inputs", inputs}};
}

WitnessFamily witnesses_from_json(const Json& j) {
  WitnessFamily w;
  for (const auto& in : need(j, "inputs")) {
    w.w_plus.push_back(cvector_from_json(need(in, "w_plus")));
    w.w_minus.push_back(cvector_from_json(need(in, "w_minus")));
  }
  return w;
}

Json hyperedge_problem_to_json(const HyperedgeProblem& h) {
  Json inputs = Json::array();
  for (int x = 0; x < h.size(); ++x) {
    inputs.push_back(Json{{"label", h.domain[x]},
                          {"delta", rvector_to_json(h.delta[x])},
                          {"potential", rvector_to_json(h.potential[x])},
                          {"oracle", cmatrix_to_json(h.oracle[x].dense())}});
  }
  return Json{{"vertices", h.vertex_set}, {"inputs", inputs}};
}

HyperedgeProblem hyperedge_problem_from_json(const Json& j) {
  HyperedgeProblem h;
  for (const auto& v : need(j, "vertices")) {
    h.vertex_set.push_back(v.get<std::string>());
  }
  for (const auto& in : need(j, "inputs")) {
    h.domain.push_back(need(in, "label").get<std::string>());
    h.delta.push_back(rvector_from_json(need(in, "delta")));
    h.potential.push_back(rvector_from_json(need(in, "potential")));
    h.oracle.emplace_back(cmatrix_from_json(need(in, "oracle")));
  }
  h.validate(1e-8);
  return h;
}

Json instance_to_json(const HypergraphInstance& inst) {
  Json out;
  out["vertices"] = inst.vertices;
  out["boundary"] = inst.boundary;
  out["domain"] = inst.domain;
  Json edges = Json::array();
  for (const auto& e : inst.edges) {
    edges.push_back(Json{{"name", e.name},
                         {"vertices", e.vertices},
                         {"weight", e.weight},
                         {"problem", hyperedge_problem_to_json(e.problem)},
                         {"witnesses", witnesses_to_json(e.witnesses)}});
  }
  out["hyperedges"] = edges;
  return out;
}

HypergraphInstance instance_from_json(const Json& j) {
  if (j.contains("generator")) {
    const Json& g = j.at("generator");
    std::string name = need(g, "name").get<std::string>();
    if (name == "dense_learning") {
      return dense_learning(need(g, "n").get<int>()).instance;
    }
    if (name == "first_marked_index") {
      int n = need(g, "n").get<int>();
      std::vector<double> alpha(n, 1.0), beta(n, 1.0);
      if (g.contains("alpha")) alpha = g.at("alpha").get<std::vector<double>>();
      if (g.contains("beta")) beta = g.at("beta").get<std::vector<double>>();
      return first_marked_index(n, alpha, beta).instance;
    }
    if (name == "minimum_finding") {
      int n = need(g, "n").get<int>();
      return minimum_finding(n, minimum_finding_inputs(n)).instance;
    }
    fail("unknown generator '" + name + "'");
  }
  HypergraphInstance inst;
  for (const auto& v : need(j, "vertices")) inst.vertices.push_back(v.get<std::string>());
  for (const auto& v : need(j, "boundary")) inst.boundary.push_back(v.get<std::string>());
  for (const auto& v : need(j, "domain")) inst.domain.push_back(v.get<std::string>());
  for (const auto& e : need(j, "hyperedges")) {
    Hyperedge he;
    if (e.contains("name")) he.name = e.at("name").get<std::string>();
    for (const auto& v : need(e, "vertices")) he.vertices.push_back(v.get<std::string>());
    he.weight = e.contains("weight") ? e.at("weight").get<double>() : 1.0;
    he.problem = hyperedge_problem_from_json(need(e, "problem"));
    he.witnesses = witnesses_from_json(need(e, "witnesses"));
    inst.edges.push_back(std::move(he));
  }
  return inst;
}

Json tree_to_json(const DecisionTree& t) {
  Json nodes = Json::array();
  for (int id = 0; id < t.size(); ++id) {
    const auto& n = t.nodes[id];
    Json jn{{"id", id}};
    if (t.is_leaf(id)) {
      jn["output"] = n.output;
    } else {
      jn["query"] = n.query;
      Json ch = Json::object();
      for (const auto& [sym, cid] : n.children) ch[sym] = cid;
      jn["children"] = ch;
      if (!n.colors.empty()) {
        Json co = Json::object();
        for (const auto& [sym, col] : n.colors) co[sym] = col;
        jn["colors"] = co;
      }
    }
    nodes.push_back(jn);
  }
  return Json{{"root", t.root}, {"nodes", nodes}};
}

DecisionTree tree_from_json(const Json& j) {
  DecisionTree t;
  t.root = need(j, "root").get<int>();
  const Json& nodes = need(j, "nodes");
  t.nodes.resize(nodes.size());
  for (const auto& jn : nodes) {
    int id = need(jn, "id").get<int>();
    if (id < 0 || id >= static_cast<int>(t.nodes.size())) fail("bad node id");
    DecisionTree::Node& n = t.nodes[id];
    if (jn.contains("output")) {
      n.output = jn.at("output").get<std::string>();
      n.query = -1;
    } else {
      n.query = need(jn, "query").get<int>();
      for (auto it = need(jn, "children").begin(); it != jn.at("children").end();
           ++it) {
        n.children[it.key()] = it.value().get<int>();
      }
      if (jn.contains("colors")) {
        for (auto it = jn.at("colors").begin(); it != jn.at("colors").end(); ++it) {
          n.colors[it.key()] = it.value().get<std::string>();
        }
      }
    }
  }
  t.validate();
  return t;
}

Json qwalk_to_json(const QWalkInstance& q) {
  Json out;
  out["graph"] = graph_to_json(q.graph);
  out["domain"] = q.domain;
  out["alphabet"] = q.alphabet;
  Json marked = Json::object();
  for (int x = 0; x < q.n_inputs(); ++x) {
    Json ms = Json::array();
    for (int v : q.marked[x]) ms.push_back(q.graph.vertices[v]);
    marked[q.domain[x]] = ms;
  }
  out["marked"] = marked;
  Json db = Json::object();
  for (int v = 0; v < q.n_vertices(); ++v) {
    Json row = Json::object();
    for (int x = 0; x < q.n_inputs(); ++x) {
      row[q.domain[x]] = q.alphabet[q.database[v][x]];
    }
    db[q.graph.vertices[v]] = row;
  }
  out["database"] = db;
  auto table = [&](const RMatrix& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
      Json row = Json::array();
      for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(row);
    }
    return rows;
  };
  out["setup_plus"] = table(q.setup_plus);
  out["setup_minus"] = table(q.setup_minus);
  out["update_plus"] = table(q.update_plus);
  out["update_minus"] = table(q.update_minus);
  Json cp = Json::array(), cm = Json::array();
  for (int v = 0; v < q.n_vertices(); ++v) {
    cp.push_back(table(q.check_plus[v]));
    cm.push_back(table(q.check_minus[v]));
  }
  out["check_plus"] = cp;
  out["check_minus"] = cm;
  return out;
}

QWalkInstance qwalk_from_json(const Json& j) {
  if (j.contains("synthesize")) {
    const Json& s = j.at("synthesize");
    Rng rng(need(s, "seed").get<std::uint64_t>());
    return random_concrete_instance(
        rng, s.contains("vertices") ? s.at("vertices").get<int>() : 5,
        s.contains("states") ? s.at("states").get<int>() : 2,
        s.contains("inputs") ? s.at("inputs").get<int>() : 4);
  }
  QWalkInstance q;
  q.graph = graph_from_json(need(j, "graph"));
  for (const auto& d : need(j, "domain")) q.domain.push_back(d.get<std::string>());
  for (const auto& a : need(j, "alphabet")) q.alphabet.push_back(a.get<std::string>());
  const Json& marked = need(j, "marked");
  q.marked.resize(q.n_inputs());
  for (int x = 0; x < q.n_inputs(); ++x) {
    if (marked.contains(q.domain[x])) {
      for (const auto& v : marked.at(q.domain[x])) {
        q.marked[x].push_back(q.graph.index_of(v.get<std::string>()));
      }
    }
  }
  const Json& db = need(j, "database");
  q.database.assign(q.n_vertices(), std::vector<int>(q.n_inputs(), 0));
  for (int v = 0; v < q.n_vertices(); ++v) {
    const Json& row = need(db, q.graph.vertices[v]);
    for (int x = 0; x < q.n_inputs(); ++x) {
      std::string state = need(row, q.domain[x]).get<std::string>();
      auto pos = std::find(q.alphabet.begin(), q.alphabet.end(), state);
      if (pos == q.alphabet.end()) fail("unknown database state '" + state + "'");
      q.database[v][x] = static_cast<int>(pos - q.alphabet.begin());
    }
  }
  auto table = [&](const Json& rows, int r, int c) {
    RMatrix m(r, c);
    if (rows.size() != static_cast<size_t>(r)) fail("size table shape");
    for (int i = 0; i < r; ++i) {
      for (int k = 0; k < c; ++k) m(i, k) = rows[i][k].get<double>();
    }
    return m;
  };
  const int nv = q.n_vertices(), ni = q.n_inputs(),
            ns = static_cast<int>(q.alphabet.size());
  q.setup_plus = table(need(j, "setup_plus"), nv, ni);
  q.setup_minus = table(need(j, "setup_minus"), nv, ni);
  q.update_plus = table(need(j, "update_plus"), q.graph.m(), ni);
  q.update_minus = table(need(j, "update_minus"), q.graph.m(), ni);
  for (int v = 0; v < nv; ++v) {
    q.check_plus.push_back(table(need(j, "check_plus")[v], ns, ni));
    q.check_minus.push_back(table(need(j, "check_minus")[v], ns, ni));
  }
  normalize_instance(&q);
  q.validate();
  return q;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError("json parse error in '" + path + "': " + e.what());
  }
  return j;
}

}  // namespace ggc
