#include "ggc/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ggc {

HyperedgeWithWitnesses single_query_edge(const std::vector<std::string>& domain,
                                         const std::vector<bool>& bit) {
  SpanProgram sp;
  sp.domain = domain;
  sp.kernel_basis = CMatrix(2, 0);
  sp.target = CVector::Zero(2);
  sp.target[1] = 1.0;
  std::vector<CVector> witnesses;
  std::vector<bool> f(bit.begin(), bit.end());
  for (size_t x = 0; x < domain.size(); ++x) {
    CMatrix proj = CMatrix::Zero(2, 2);
    proj(bit[x] ? 1 : 0, bit[x] ? 1 : 0) = 1.0;
    sp.projector.push_back(proj);
    witnesses.push_back(sp.target);  // e_1 serves both sides
  }
  return span_to_hyperedge(sp, f, witnesses);
}

int first_marked_position(const std::vector<bool>& x) {
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i]) return static_cast<int>(i) + 1;
  }
  throw AllZeroInput("first_marked_index: the all-zeros string has no marked "
                     "position");
}

CatalogFixture first_marked_index(int n, const std::vector<double>& alpha,
                                  const std::vector<double>& beta) {
  if (n < 1) throw ParseError("first_marked_index: n must be >= 1");
  if (alpha.size() != static_cast<size_t>(n) ||
      beta.size() != static_cast<size_t>(n)) {
    throw DimensionMismatch("first_marked_index: need n weights of each kind");
  }
  for (int j = 0; j < n; ++j) {
    if (alpha[j] <= 0 || beta[j] <= 0) {
      throw ParseError("first_marked_index: weights must be positive");
    }
  }
  // Domain: e_i = 0^{i-1} 1 0^{n-i}, i = 1..n.
  std::vector<std::vector<bool>> strings;
  std::vector<std::string> domain;
  for (int i = 1; i <= n; ++i) {
    std::vector<bool> s(n, false);
    s[i - 1] = true;
    strings.push_back(s);
    std::string lbl;
    for (bool b : s) lbl += b ? '1' : '0';
    domain.push_back(lbl);
  }

  CatalogFixture fx;
  fx.description = "first marked index, n=" + std::to_string(n);
  HypergraphInstance& inst = fx.instance;
  inst.domain = domain;
  inst.vertices.push_back("s");
  for (int j = 2; j <= n + 1; ++j) inst.vertices.push_back("v" + std::to_string(j));
  for (int j = 1; j <= n; ++j) inst.vertices.push_back("leaf" + std::to_string(j));
  inst.boundary.push_back("s");
  for (int j = 1; j <= n; ++j) inst.boundary.push_back("leaf" + std::to_string(j));

  auto spine_vertex = [&](int j) {
    return j == 1 ? std::string("s") : "v" + std::to_string(j);
  };
  for (int j = 1; j <= n; ++j) {
    std::vector<bool> bit_zero, bit_one;
    for (const auto& s : strings) {
      bit_zero.push_back(!s[j - 1]);
      bit_one.push_back(s[j - 1]);
    }
    Hyperedge spine;
    spine.name = "spine" + std::to_string(j);
    spine.vertices = {spine_vertex(j), spine_vertex(j + 1)};
    auto hw = single_query_edge(domain, bit_zero);
    hw.problem.vertex_set = spine.vertices;
    spine.problem = hw.problem;
    spine.witnesses = hw.witnesses;
    spine.weight = alpha[j - 1];
    inst.edges.push_back(std::move(spine));

    Hyperedge tooth;
    tooth.name = "tooth" + std::to_string(j);
    tooth.vertices = {spine_vertex(j), "leaf" + std::to_string(j)};
    auto hw1 = single_query_edge(domain, bit_one);
    hw1.problem.vertex_set = tooth.vertices;
    tooth.problem = hw1.problem;
    tooth.witnesses = hw1.witnesses;
    tooth.weight = beta[j - 1];
    inst.edges.push_back(std::move(tooth));
  }

  auto cut = resistance_cut(inst);
  fx.composed = cut.composed;
  for (int x = 0; x < inst.n_inputs(); ++x) {
    int i = first_marked_position(strings[x]);
    double plus = beta[i - 1], minus = 1.0 / alpha[i - 1];
    for (int j = 1; j < i; ++j) {
      plus += alpha[j - 1];
      minus += 1.0 / beta[j - 1];
    }
    fx.expected_plus.push_back(plus);
    fx.expected_minus.push_back(minus);
  }
  return fx;
}

CatalogFixture dense_learning(int n) {
  if (n < 1) throw ParseError("dense_learning: n must be >= 1");
  if (n > 12) throw UnsupportedShape("dense_learning: n too large for dense enumeration");
  const int count = 1 << n;
  std::vector<std::string> domain;
  std::vector<std::vector<bool>> strings;
  for (int v = 0; v < count; ++v) {
    std::vector<bool> s(n);
    std::string lbl;
    for (int j = 0; j < n; ++j) {
      s[j] = (v >> j) & 1;
      lbl += s[j] ? '1' : '0';
    }
    strings.push_back(s);
    domain.push_back(lbl);
  }

  CatalogFixture fx;
  fx.description = "dense learning, n=" + std::to_string(n);
  HypergraphInstance& inst = fx.instance;
  inst.domain = domain;
  auto node_label = [](const std::string& prefix) {
    return prefix.empty() ? std::string("root") : prefix;
  };
  // Vertices: all prefixes; boundary: root and the full strings.
  std::vector<std::string> prefixes{""};
  for (int len = 1; len <= n; ++len) {
    std::vector<std::string> next;
    for (const auto& p : prefixes) {
      if (static_cast<int>(p.size()) == len - 1) {
        next.push_back(p + "0");
        next.push_back(p + "1");
      }
    }
    prefixes.insert(prefixes.end(), next.begin(), next.end());
  }
  for (const auto& p : prefixes) inst.vertices.push_back(node_label(p));
  inst.boundary.push_back("root");
  for (const auto& p : prefixes) {
    if (static_cast<int>(p.size()) == n) inst.boundary.push_back(p);
  }

  for (const auto& p : prefixes) {
    int len = static_cast<int>(p.size());
    if (len == n) continue;
    for (int b = 0; b <= 1; ++b) {
      std::vector<bool> match;
      for (const auto& s : strings) match.push_back(s[len] == (b == 1));
      Hyperedge he;
      he.name = "q" + node_label(p) + "_" + std::to_string(b);
      he.vertices = {node_label(p), p + (b ? "1" : "0")};
      auto hw = single_query_edge(domain, match);
      hw.problem.vertex_set = he.vertices;
      he.problem = hw.problem;
      he.witnesses = hw.witnesses;
      inst.edges.push_back(std::move(he));
    }
  }

  auto cut = resistance_cut(inst);
  fx.composed = cut.composed;
  fx.expected_plus.assign(count, static_cast<double>(n));
  fx.expected_minus.assign(count, static_cast<double>(n));
  return fx;
}

std::vector<std::vector<int>> minimum_finding_inputs(int n, int count) {
  std::vector<std::vector<int>> out;
  std::vector<int> base(n);
  std::iota(base.begin(), base.end(), 0);
  out.push_back(base);
  if (count > 1) {
    std::vector<int> rev(base.rbegin(), base.rend());
    out.push_back(rev);
  }
  Rng rng(0x5eedULL + static_cast<unsigned>(n));
  while (static_cast<int>(out.size()) < count) {
    std::vector<int> p = base;
    for (int i = n - 1; i > 0; --i) {
      std::swap(p[i], p[rng.below(i + 1)]);
    }
    out.push_back(p);
  }
  return out;
}

CatalogFixture minimum_finding(int n,
                               const std::vector<std::vector<int>>& inputs) {
  if (n < 2) throw ParseError("minimum_finding: n must be >= 2");
  std::vector<std::string> domain;
  for (const auto& x : inputs) {
    if (static_cast<int>(x.size()) != n) {
      throw DimensionMismatch("minimum_finding: inputs must have length n");
    }
    std::vector<bool> seen(n, false);
    std::string lbl = "p";
    for (int v : x) {
      if (v < 0 || v >= n || seen[v]) {
        throw NotDistinct("minimum_finding: inputs must be permutations");
      }
      seen[v] = true;
      lbl += std::to_string(v) + "_";
    }
    domain.push_back(lbl);
  }
  const int ni = static_cast<int>(inputs.size());

  CatalogFixture fx;
  fx.description = "minimum finding, n=" + std::to_string(n);
  HypergraphInstance& inst = fx.instance;
  inst.domain = domain;
  inst.vertices.push_back("s");
  inst.boundary.push_back("s");
  for (int i = 0; i < n; ++i) {
    for (int k = 1; k < n; ++k) {
      inst.vertices.push_back("b" + std::to_string(i) + "_" + std::to_string(k));
    }
    inst.vertices.push_back("min" + std::to_string(i));
    inst.boundary.push_back("min" + std::to_string(i));
  }
  auto path_vertex = [&](int i, int k) {  // k = 0..n along branch i
    if (k == 0) return std::string("s");
    if (k == n) return "min" + std::to_string(i);
    return "b" + std::to_string(i) + "_" + std::to_string(k);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<bool> holds;
      for (const auto& x : inputs) holds.push_back(x[i] <= x[j]);
      Hyperedge he;
      he.name = "cmp" + std::to_string(i) + "_" + std::to_string(j);
      he.vertices = {path_vertex(i, j), path_vertex(i, j + 1)};
      auto hw = single_query_edge(domain, holds);
      hw.problem.vertex_set = he.vertices;
      he.problem = hw.problem;
      he.witnesses = hw.witnesses;
      inst.edges.push_back(std::move(he));
    }
  }

  // Routing: unit flow along the winning branch; the potential on branch i
  // falls from 1 to 0 in equal steps across its blocked comparisons.
  Routing routing;
  routing.flow_coeff.resize(ni);
  routing.vertex_potential.resize(ni);
  for (int x = 0; x < ni; ++x) {
    const auto& perm = inputs[x];
    int winner = static_cast<int>(std::min_element(perm.begin(), perm.end()) -
                                  perm.begin());
    routing.flow_coeff[x] = RVector::Zero(inst.n_edges());
    RVector phi = RVector::Zero(inst.n_vertices());
    phi[0] = 1.0;  // 's'
    for (int i = 0; i < n; ++i) {
      int blocked = 0;
      for (int j = 0; j < n; ++j) blocked += perm[i] > perm[j] ? 1 : 0;
      double level = 1.0;
      int seen = 0;
      for (int j = 0; j < n; ++j) {
        if (i == winner) routing.flow_coeff[x][i * n + j] = 1.0;
        if (perm[i] > perm[j]) {
          ++seen;
          level = 1.0 - static_cast<double>(seen) / blocked;
        }
        phi[inst.vertex_index(path_vertex(i, j + 1))] = level;
      }
    }
    routing.vertex_potential[x] = phi;
  }
  fx.composed = compose_routed(inst, routing);

  double harmonic = 0.0;
  for (int j = 2; j <= n; ++j) harmonic += 1.0 / (j - 1);
  fx.expected_plus.assign(ni, static_cast<double>(n));
  fx.expected_minus.assign(ni, harmonic);
  return fx;
}

}  // namespace ggc
