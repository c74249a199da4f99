#pragma once

#include <string>
#include <vector>

#include "ggc/numerics.hpp"

namespace ggc {

/// Undirected graph with positive edge resistances. Edge orientation
/// (tail/head) is bookkeeping for flow signs only. Self-loops are allowed;
/// they contribute no incidence column.
struct WeightedGraph {
  struct Edge {
    int tail = 0;
    int head = 0;
    double r = 1.0;
  };

  std::vector<std::string> vertices;
  std::vector<Edge> edges;

  int index_of(const std::string& label) const;
  int add_vertex(const std::string& label);
  void add_edge(const std::string& tail, const std::string& head, double r);
  int n() const { return static_cast<int>(vertices.size()); }
  int m() const { return static_cast<int>(edges.size()); }
};

struct MarkovChain {
  std::vector<std::string> states;
  RMatrix P;  // row-stochastic

  int n() const { return static_cast<int>(states.size()); }
};

/// Mean-zero vector over the vertex set of a graph (or state set of a chain).
struct NetFlow {
  RVector values;
};

/// Edge flow; energy is sum_e f_e^2 r_e.
struct Flow {
  RVector values;
  double energy = 0.0;
};

/// Weighted incidence matrix B with entries +-1/sqrt(r_e); zero columns for
/// self-loops.
RMatrix incidence(const WeightedGraph& g);

/// Graph Laplacian L = B B^T.
RMatrix laplacian(const WeightedGraph& g);

/// Connected-component id per vertex (self-loops ignored).
std::vector<int> components(const WeightedGraph& g);
bool is_connected(const WeightedGraph& g);

struct ChainWithStationary {
  MarkovChain chain;
  RVector pi;
};

/// Random walk on g: P_vw = sum_{e in N(v) cap N(w)} r_v / r_e with
/// r_v = [sum_{e in N(v)} 1/r_e]^{-1}; pi_v = R / r_v.
ChainWithStationary graph_to_chain(const WeightedGraph& g);

/// Inverse map: edge {v,w} iff P_vw > 0, with r_{vw} = 1/(pi_v P_vw).
/// Self-loop states get self-loop edges so the round trip reproduces P.
WeightedGraph chain_to_graph(const MarkovChain& m, double tol = 1e-8);

struct StationaryAndGap {
  RVector pi;
  double gap = 0.0;  // 1 - max |eigenvalue below the top one|
};

StationaryAndGap stationary_and_gap(const MarkovChain& m, double tol = 1e-9);

bool is_reversible(const MarkovChain& m, const RVector& pi, double tol = 1e-8);

struct ResistanceResult {
  double r_eff = 0.0;   // delta^T L^+ delta
  Flow flow;            // minimum-energy flow with net-flow delta
  double energy = 0.0;  // energy of the flow, equal to r_eff within tol
};

/// Effective resistance of net-flow delta, computed through the Laplacian
/// pseudoinverse and independently through the incidence least-squares flow.
ResistanceResult resistance(const WeightedGraph& g, const NetFlow& delta);

/// R_eff(P^t; xi) through the spectral formula from the fast-forwarding
/// analysis: sum over eigenvalues below one of |xi~^T v_j|^2 / (1 - l_j^t).
/// Returns +infinity when xi has weight on a zero denominator. Never builds
/// a graph from P^t (which can be reducible or periodic).
double spectral_resistance(const MarkovChain& m, const RVector& pi,
                           const RVector& xi, int t);

struct LemmaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool applicable = true;
};

struct ResistanceLemmaReport {
  LemmaCheck fast_forwarding;    // R(P;xi) <= t R(P^t;xi)
  LemmaCheck gap_bound;          // R(P;xi) <= ||D^{-1/2} xi||^2 / gap
  LemmaCheck fraction_bound;     // sum nu^2/pi <= 2 R(P^t; sigma-nu)
  double gap = 0.0;
  bool all_hold() const {
    return fast_forwarding.holds && gap_bound.holds && fraction_bound.holds;
  }
};

/// Numeric verification of the two resistance lemmas on a reversible chain.
/// sigma and nu must be distributions with disjoint support.
ResistanceLemmaReport check_resistance_lemmas(const MarkovChain& m,
                                              const RVector& xi, int t,
                                              const RVector& sigma,
                                              const RVector& nu);

struct SetResistance {
  double r_eff = 0.0;
  RVector nu;  // minimizing distribution on the marked set
};

/// min over distributions nu supported on `marked` of R_eff(P^t; sigma - nu).
/// Exact for small marked sets (KKT solve per support subset).
SetResistance resistance_to_set(const MarkovChain& m, const RVector& pi,
                                const RVector& sigma,
                                const std::vector<int>& marked, int t);

}  // namespace ggc
