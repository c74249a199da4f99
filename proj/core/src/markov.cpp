#include "ggc/markov.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace ggc {

namespace {
constexpr double kStructTol = 1e-10;

void require_stochastic(const MarkovChain& m) {
  if (m.P.rows() != m.n() || m.P.cols() != m.n()) {
    throw DimensionMismatch("markov: P must be n x n");
  }
  for (int i = 0; i < m.n(); ++i) {
    if (std::abs(m.P.row(i).sum() - 1.0) > kStructTol) {
      throw NotNormalized("markov: row " + std::to_string(i) +
                          " of P does not sum to 1");
    }
    for (int j = 0; j < m.n(); ++j) {
      if (m.P(i, j) < -kStructTol) {
        throw NotNormalized("markov: P has a negative entry");
      }
    }
  }
}

bool strongly_connected(const RMatrix& p) {
  const int n = static_cast<int>(p.rows());
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w = 0; w < n; ++w) {
        double x = forward ? p(v, w) : p(w, v);
        if (x > 0 && !seen[w]) {
          seen[w] = 1;
          q.push(w);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c; });
  };
  return reach(true) && reach(false);
}
}  // namespace

int WeightedGraph::index_of(const std::string& label) const {
  for (int i = 0; i < n(); ++i) {
    if (vertices[i] == label) return i;
  }
  throw ParseError("graph: unknown vertex label '" + label + "'");
}

int WeightedGraph::add_vertex(const std::string& label) {
  for (int i = 0; i < n(); ++i) {
    if (vertices[i] == label) return i;
  }
  vertices.push_back(label);
  return n() - 1;
}

void WeightedGraph::add_edge(const std::string& tail, const std::string& head,
                             double r) {
  if (r <= 0) throw ParseError("graph: resistances must be positive");
  edges.push_back({add_vertex(tail), add_vertex(head), r});
}

RMatrix incidence(const WeightedGraph& g) {
  RMatrix b = RMatrix::Zero(g.n(), g.m());
  for (int e = 0; e < g.m(); ++e) {
    const auto& ed = g.edges[e];
    if (ed.tail == ed.head) continue;  // loops carry no incidence column
    double w = 1.0 / std::sqrt(ed.r);
    b(ed.tail, e) = w;
    b(ed.head, e) = -w;
  }
  return b;
}

RMatrix laplacian(const WeightedGraph& g) {
  RMatrix b = incidence(g);
  return b * b.transpose();
}

std::vector<int> components(const WeightedGraph& g) {
  std::vector<int> comp(g.n(), -1);
  int next = 0;
  for (int s = 0; s < g.n(); ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const auto& e : g.edges) {
        int other = -1;
        if (e.tail == v) other = e.head;
        if (e.head == v) other = e.tail;
        if (other >= 0 && comp[other] < 0) {
          comp[other] = next;
          q.push(other);
        }
      }
    }
    ++next;
  }
  return comp;
}

bool is_connected(const WeightedGraph& g) {
  if (g.n() == 0) return true;
  auto comp = components(g);
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

ChainWithStationary graph_to_chain(const WeightedGraph& g) {
  if (!is_connected(g)) {
    throw Disconnected("graph_to_chain: graph must be connected");
  }
  const int n = g.n();
  RVector inv_rv = RVector::Zero(n);  // 1/r_v
  for (const auto& e : g.edges) {
    inv_rv[e.tail] += 1.0 / e.r;
    if (e.head != e.tail) inv_rv[e.head] += 1.0 / e.r;
  }
  for (int v = 0; v < n; ++v) {
    if (inv_rv[v] <= 0) {
      throw Disconnected("graph_to_chain: isolated vertex '" + g.vertices[v] +
                         "'");
    }
  }
  RMatrix p = RMatrix::Zero(n, n);
  for (const auto& e : g.edges) {
    if (e.tail == e.head) {
      p(e.tail, e.tail) += (1.0 / inv_rv[e.tail]) / e.r;
    } else {
      p(e.tail, e.head) += (1.0 / inv_rv[e.tail]) / e.r;
      p(e.head, e.tail) += (1.0 / inv_rv[e.head]) / e.r;
    }
  }
  double big_r = 1.0 / inv_rv.sum();
  RVector pi(n);
  for (int v = 0; v < n; ++v) pi[v] = big_r * inv_rv[v];
  return {MarkovChain{g.vertices, std::move(p)}, std::move(pi)};
}

bool is_reversible(const MarkovChain& m, const RVector& pi, double tol) {
  for (int v = 0; v < m.n(); ++v) {
    for (int w = v + 1; w < m.n(); ++w) {
      if (std::abs(pi[v] * m.P(v, w) - pi[w] * m.P(w, v)) > tol) return false;
    }
  }
  return true;
}

StationaryAndGap stationary_and_gap(const MarkovChain& m, double tol) {
  require_stochastic(m);
  if (!strongly_connected(m.P)) {
    throw NotIrreducible("stationary_and_gap: chain is not irreducible");
  }
  const int n = m.n();
  // pi solves pi (P - I) = 0 with sum pi = 1; least-squares on the stacked
  // system keeps this robust for nearly-periodic chains.
  RMatrix a(n + 1, n);
  a.topRows(n) = m.P.transpose() - RMatrix::Identity(n, n);
  a.bottomRows(1).setOnes();
  RVector rhs = RVector::Zero(n + 1);
  rhs[n] = 1.0;
  RVector pi = min_norm_solve(a, rhs);
  if ((a.topRows(n) * pi).norm() > 1e-8 || pi.minCoeff() < -1e-10) {
    throw NumericalFailure("stationary_and_gap: stationary solve failed");
  }
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();

  double sub_one = 0.0;  // largest |eigenvalue| among non-top eigenvalues
  if (is_reversible(m, pi, 1e-8)) {
    RVector d_sqrt = pi.cwiseSqrt();
    RMatrix sym = d_sqrt.asDiagonal() * m.P * d_sqrt.cwiseInverse().asDiagonal();
    sym = (sym + sym.transpose()) / 2.0;
    Eigen::SelfAdjointEigenSolver<RMatrix> es(sym);
    // Drop exactly one eigenvalue at the top (the unique 1 for irreducible
    // chains); keep magnitudes of the rest.
    int top = 0;
    for (int i = 1; i < n; ++i) {
      if (es.eigenvalues()[i] > es.eigenvalues()[top]) top = i;
    }
    for (int i = 0; i < n; ++i) {
      if (i == top) continue;
      sub_one = std::max(sub_one, std::abs(es.eigenvalues()[i]));
    }
  } else {
    Eigen::EigenSolver<RMatrix> es(m.P);
    int top = 0;
    for (int i = 1; i < n; ++i) {
      if (std::abs(es.eigenvalues()[i] - Complex(1, 0)) <
          std::abs(es.eigenvalues()[top] - Complex(1, 0))) {
        top = i;
      }
    }
    for (int i = 0; i < n; ++i) {
      if (i == top) continue;
      sub_one = std::max(sub_one, std::abs(es.eigenvalues()[i]));
    }
  }
  double gap = (n == 1) ? 1.0 : 1.0 - sub_one;
  if (std::abs(gap) < tol) gap = 0.0;
  return {std::move(pi), gap};
}

WeightedGraph chain_to_graph(const MarkovChain& m, double tol) {
  require_stochastic(m);
  auto sg = stationary_and_gap(m);
  if (!is_reversible(m, sg.pi, tol)) {
    throw NotReversible("chain_to_graph: detailed balance fails");
  }
  WeightedGraph g;
  g.vertices = m.states;
  for (int v = 0; v < m.n(); ++v) {
    for (int w = v; w < m.n(); ++w) {
      double flux = sg.pi[v] * m.P(v, w);
      if (w == v) {
        if (m.P(v, v) > tol) g.edges.push_back({v, v, 1.0 / flux});
      } else if (m.P(v, w) > tol) {
        g.edges.push_back({v, w, 1.0 / flux});
      }
    }
  }
  return g;
}

ResistanceResult resistance(const WeightedGraph& g, const NetFlow& delta) {
  if (delta.values.size() != g.n()) {
    throw DimensionMismatch("resistance: net-flow dimension mismatch");
  }
  if (std::abs(delta.values.sum()) > 1e-8 * std::max(1.0, delta.values.norm())) {
    throw NotNormalized("resistance: net-flow entries must sum to zero");
  }
  auto comp = components(g);
  int home = -1;
  for (int v = 0; v < g.n(); ++v) {
    if (std::abs(delta.values[v]) > kStructTol) {
      if (home < 0) home = comp[v];
      if (comp[v] != home) {
        throw CrossComponent("resistance: net-flow spans components");
      }
    }
  }

  RMatrix b = incidence(g);
  RMatrix lap = b * b.transpose();

  ResistanceResult out;
  out.r_eff = delta.values.dot(pseudoinverse(lap) * delta.values);

  RVector embedded = min_norm_solve(b, delta.values);
  out.energy = embedded.squaredNorm();
  if ((b * embedded - delta.values).norm() > 1e-7 * std::max(1.0, delta.values.norm())) {
    throw NumericalFailure("resistance: flow does not reproduce net-flow");
  }
  out.flow.values.resize(g.m());
  for (int e = 0; e < g.m(); ++e) {
    out.flow.values[e] = embedded[e] / std::sqrt(g.edges[e].r);
  }
  out.flow.energy = out.energy;
  return out;
}

double spectral_resistance(const MarkovChain& m, const RVector& pi,
                           const RVector& xi, int t) {
  if (t < 1) throw ParseError("spectral_resistance: t must be >= 1");
  const int n = m.n();
  RVector d_sqrt = pi.cwiseSqrt();
  RMatrix sym = d_sqrt.asDiagonal() * m.P * d_sqrt.cwiseInverse().asDiagonal();
  sym = (sym + sym.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<RMatrix> es(sym);
  RVector xit = xi.cwiseQuotient(d_sqrt);

  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    double lam = es.eigenvalues()[j];
    if (lam >= 1.0 - 1e-12) continue;  // top eigenspace; xi~ has no weight there
    double coef = xit.dot(es.eigenvectors().col(j));
    double den = 1.0 - std::pow(lam, t);
    if (std::abs(den) < 1e-12) {
      if (coef * coef > 1e-18) return std::numeric_limits<double>::infinity();
      continue;
    }
    total += coef * coef / den;
  }
  return total;
}

ResistanceLemmaReport check_resistance_lemmas(const MarkovChain& m,
                                              const RVector& xi, int t,
                                              const RVector& sigma,
                                              const RVector& nu) {
  if (t < 1) throw ParseError("check_resistance_lemmas: t must be >= 1");
  auto sg = stationary_and_gap(m);
  if (!is_reversible(m, sg.pi, 1e-8)) {
    throw NotReversible("check_resistance_lemmas: chain is not reversible");
  }
  for (int v = 0; v < m.n(); ++v) {
    if (sigma[v] > kStructTol && nu[v] > kStructTol) {
      throw OverlappingSupport(
          "check_resistance_lemmas: sigma and nu must have disjoint support");
    }
  }

  ResistanceLemmaReport rep;
  rep.gap = sg.gap;
  WeightedGraph g = chain_to_graph(m);
  double r1 = resistance(g, NetFlow{xi}).r_eff;

  rep.fast_forwarding.lhs = r1;
  rep.fast_forwarding.rhs = t * spectral_resistance(m, sg.pi, xi, t);
  rep.fast_forwarding.holds =
      rep.fast_forwarding.lhs <= rep.fast_forwarding.rhs + 1e-9;

  rep.gap_bound.lhs = r1;
  if (sg.gap > 0) {
    double xin = xi.cwiseQuotient(sg.pi.cwiseSqrt()).squaredNorm();
    rep.gap_bound.rhs = xin / sg.gap;
  } else {
    rep.gap_bound.rhs = std::numeric_limits<double>::infinity();
    rep.gap_bound.applicable = false;
  }
  rep.gap_bound.holds = rep.gap_bound.lhs <= rep.gap_bound.rhs + 1e-9;

  rep.fraction_bound.lhs = nu.cwiseAbs2().cwiseQuotient(sg.pi).sum();
  rep.fraction_bound.rhs = 2.0 * spectral_resistance(m, sg.pi, sigma - nu, t);
  rep.fraction_bound.holds =
      rep.fraction_bound.lhs <= rep.fraction_bound.rhs + 1e-9;
  return rep;
}

SetResistance resistance_to_set(const MarkovChain& m, const RVector& pi,
                                const RVector& sigma,
                                const std::vector<int>& marked, int t) {
  const int n = m.n();
  if (marked.empty()) {
    throw SupportViolation("resistance_to_set: marked set is empty");
  }
  if (marked.size() > 20) {
    throw UnsupportedShape("resistance_to_set: marked set too large");
  }
  // K = D^{-1/2} (I - sym(P)^t)^+ D^{-1/2}; R(P^t; xi) = xi^T K xi.
  RVector d_sqrt = pi.cwiseSqrt();
  RMatrix sym = d_sqrt.asDiagonal() * m.P * d_sqrt.cwiseInverse().asDiagonal();
  sym = (sym + sym.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<RMatrix> es(sym);
  RMatrix mid = RMatrix::Zero(n, n);
  bool degenerate = false;
  for (int j = 0; j < n; ++j) {
    double lam = es.eigenvalues()[j];
    if (lam >= 1.0 - 1e-12) continue;
    double den = 1.0 - std::pow(lam, t);
    if (std::abs(den) < 1e-12) {
      degenerate = true;
      continue;
    }
    mid += es.eigenvectors().col(j) * es.eigenvectors().col(j).transpose() / den;
  }
  RMatrix k = d_sqrt.cwiseInverse().asDiagonal() * mid *
              d_sqrt.cwiseInverse().asDiagonal();
  // When P^t is degenerate (a zero denominator was dropped above), the
  // quadratic form below underestimates directions with weight on the dropped
  // eigenspace; candidates are validated with spectral_resistance instead.

  const int mcount = static_cast<int>(marked.size());
  double best = std::numeric_limits<double>::infinity();
  RVector best_nu;
  for (unsigned mask = 1; mask < (1u << mcount); ++mask) {
    std::vector<int> supp;
    for (int i = 0; i < mcount; ++i) {
      if (mask & (1u << i)) supp.push_back(marked[i]);
    }
    const int s = static_cast<int>(supp.size());
    // KKT system for min (sigma-nu)^T K (sigma-nu) s.t. nu on supp, sum = 1.
    RMatrix kkt = RMatrix::Zero(s + 1, s + 1);
    RVector rhs(s + 1);
    for (int a = 0; a < s; ++a) {
      for (int b = 0; b < s; ++b) kkt(a, b) = 2.0 * k(supp[a], supp[b]);
      kkt(a, s) = -1.0;
      kkt(s, a) = 1.0;
      rhs[a] = 2.0 * (k.row(supp[a]) * sigma)(0);
    }
    rhs[s] = 1.0;
    RVector sol = min_norm_solve(kkt, rhs);
    RVector cand(s);
    for (int a = 0; a < s; ++a) cand[a] = sol[a];
    if (cand.minCoeff() < -1e-9 || std::abs(cand.sum() - 1.0) > 1e-7) continue;
    RVector nu = RVector::Zero(n);
    for (int a = 0; a < s; ++a) nu[supp[a]] = std::max(0.0, cand[a]);
    nu /= nu.sum();
    double val = degenerate ? spectral_resistance(m, pi, sigma - nu, t)
                            : (sigma - nu).dot(k * (sigma - nu));
    if (val < best) {
      best = val;
      best_nu = nu;
    }
  }
  if (!best_nu.size()) {
    // Fall back to vertex candidates (always feasible).
    for (int i = 0; i < mcount; ++i) {
      RVector nu = RVector::Zero(n);
      nu[marked[i]] = 1.0;
      double val = spectral_resistance(m, pi, sigma - nu, t);
      if (val < best) {
        best = val;
        best_nu = nu;
      }
    }
  }
  return {best, best_nu};
}

}  // namespace ggc
