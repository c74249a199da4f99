#pragma once

#include <map>
#include <string>
#include <vector>

#include "ggc/composition.hpp"

namespace ggc {

/// Rooted query tree. Children are keyed by input-alphabet symbols; edges
/// may carry a red/black coloring (at most one black edge per node).
struct DecisionTree {
  struct Node {
    int query = -1;      // queried position; -1 marks a leaf
    std::string output;  // leaf label
    std::map<std::string, int> children;
    std::map<std::string, std::string> colors;  // "red" | "black"
  };
  std::vector<Node> nodes;
  int root = 0;

  bool is_leaf(int id) const { return nodes[id].query < 0; }
  int size() const { return static_cast<int>(nodes.size()); }
  void validate() const;
  int depth() const;
  int max_red() const;
  /// Node ids visited by an input string (symbols per position), root first.
  std::vector<int> path(const std::vector<std::string>& x) const;
};

struct NodeCertificates {
  RMatrix x;
  RMatrix y;
};

struct WeightingScheme {
  std::map<int, double> weight;
  std::map<int, NodeCertificates> certs;  // internal nodes only
};

struct SchemeReport {
  double worst_leaf = 0.0;     // |w_leaf|
  double worst_psd = 0.0;      // most negative eigenvalue of any X, Y
  double worst_offdiag = 0.0;  // |X[c,c'] - Y[c,c'] - 1|
  double worst_drop = 0.0;     // violation of w_v - w_c >= X[c,c] + Y[c,c]
  bool valid = false;
};

SchemeReport validate_scheme(const DecisionTree& t, const WeightingScheme& s,
                             double tol);

struct BinaryNodeSolution {
  double w = 0.0;
  RMatrix x, y;
};

/// Closed form for binary queries: w = (w1 + w2 + sqrt((w1-w2)^2 + 4))/2,
/// realized by the rank-one certificate X = [[w-w1, 1], [1, w-w2]], Y = 0.
BinaryNodeSolution binary_analytic(double w1, double w2);

struct NodeSdpSolution {
  double w = 0.0;  // primal value
  RMatrix x, y;
  RMatrix gamma;          // hollow, ||gamma|| <= 1
  double dual_value = 0.0;  // ||diag(w_children) + gamma||
  double gap = 0.0;
  int iterations = 0;
};

/// Per-node weighting SDP: minimize max_c (w_c + X[c,c] + Y[c,c]) subject to
/// X[c1,c2] - Y[c1,c2] = 1 off the diagonal and X, Y >= 0. Solved by a
/// log-det barrier Newton method on the eliminated parametrization; the dual
/// certificate comes from the central-path multipliers.
NodeSdpSolution solve_node_sdp(const RVector& child_weights, double tol = 1e-7);

/// Explicit feasible scheme from the red/black coloring: black drops
/// sqrt(G/T), red drops 2 sqrt(T/G) - 1, root weight <= 3 sqrt(G T).
WeightingScheme bt20_scheme(const DecisionTree& t, int depth_bound = -1,
                            int red_bound = -1);

struct WdtResult {
  WeightingScheme scheme;
  double root_weight = 0.0;
};

/// Optimal weighting by the leaf-to-root SDP recursion.
WdtResult wdt(const DecisionTree& t, double tol = 1e-7);

struct TreeCompositionResult {
  HypergraphInstance instance;
  ComposedResult composed;
  double root_weight = 0.0;
};

/// One function-evaluation hyperedge per internal node, witnesses built from
/// the PSD factorizations of the node certificates. Per-input sizes are at
/// most 2 w_root.
TreeCompositionResult tree_to_composition(
    const DecisionTree& t, const WeightingScheme& s,
    const std::vector<std::vector<std::string>>& inputs, double tol = 1e-8);

}  // namespace ggc
