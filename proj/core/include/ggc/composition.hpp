#pragma once

#include <map>
#include <optional>

#include "ggc/markov.hpp"
#include "ggc/reflection.hpp"

namespace ggc {

struct Hyperedge {
  std::string name;
  std::vector<std::string> vertices;  // N(e), labels into the instance
  HyperedgeProblem problem;           // vertex_set must equal `vertices`
  WitnessFamily witnesses;
  double weight = 1.0;
};

struct HypergraphInstance {
  std::vector<std::string> vertices;
  std::vector<std::string> boundary;
  std::vector<std::string> domain;
  std::vector<Hyperedge> edges;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int n_inputs() const { return static_cast<int>(domain.size()); }
  int vertex_index(const std::string& label) const;
  bool is_boundary(int v) const;
};

struct InstanceReport {
  double max_flow_residual = 0.0;       // at internal vertices
  double max_potential_residual = 0.0;  // across edges sharing a vertex
  int worst_flow_vertex = -1;
  int worst_flow_input = -1;
  bool valid = false;
};

/// Per-vertex flow-conservation and potential-consistency residuals.
InstanceReport validate_instance(const HypergraphInstance& inst, double tol);

struct ComposedResult {
  HyperedgeProblem boundary_problem;  // on the boundary vertex set
  WitnessFamily witnesses;            // weighted direct sums over edges
  std::vector<double> plus_sizes;
  std::vector<double> minus_sizes;
  FeasibilityReport feasibility;
};

/// Glues the edge solutions: witnesses direct-sum (scaled w_e^{+-1/2}), sizes
/// add as sum_e w_e^{+-1} (R^e)_x^{+-}. The instance must validate.
ComposedResult compose(const HypergraphInstance& inst, double tol = 1e-8);

/// Per-input routing: a flow coefficient per edge (multiplying the edge's own
/// net-flow) and a potential value per vertex. Witnesses get adapted per
/// input: w+ scales with the flow, w- with the potential drop across the
/// edge's own pattern.
struct Routing {
  std::vector<RVector> flow_coeff;        // [input][edge]
  std::vector<RVector> vertex_potential;  // [input][vertex]
};

ComposedResult compose_routed(const HypergraphInstance& inst,
                              const Routing& routing, double tol = 1e-8);

struct TwoTerminalShape {
  // Per input, per edge: endpoints of the unit flow (-1 when blocked).
  std::vector<std::vector<std::pair<int, int>>> open_pair;
};

/// Checks the resistance-cut preconditions (net-flows supported on <= 2
/// vertices with a unit potential pattern) and extracts the open pairs.
TwoTerminalShape two_terminal_shape(const HypergraphInstance& inst, double tol);

struct ResistanceCutResult {
  ComposedResult composed;
  std::vector<double> formula_plus;   // R_eff(G(x), w_e (R^e)+; s<->t)
  std::vector<double> formula_minus;  // sum over the cut of (R^e)-/w_e
  std::vector<std::vector<int>> cut;  // edge indices per input
};

/// Resistance-cut theorem builder. Flows and cuts may be supplied per input
/// or derived: the auto flow is the minimum-energy flow on the open graph
/// G(x), the auto cut collects hyperedges leaving the reachable set.
ResistanceCutResult resistance_cut(
    const HypergraphInstance& inst,
    const std::optional<std::vector<RVector>>& flows = std::nullopt,
    const std::optional<std::vector<std::vector<int>>>& cuts = std::nullopt,
    double tol = 1e-8);

/// Plain composition when the instance's declared states already satisfy the
/// gluing conditions, otherwise the resistance-cut routing (the shape catalog
/// fixtures and span-program networks use).
ComposedResult compose_auto(const HypergraphInstance& inst, double tol = 1e-8);

struct ClassicEmbedResult {
  ComposedResult composed;
  std::vector<bool> positive;         // s-t connected in G(x)
  std::vector<double> formula_plus;   // R_eff(G(x), (R^e)+; s<->t)
  std::vector<double> formula_minus;  // R_eff(Gbar(x), 1/(R^e)-; s<->t)^{-1}
};

/// Simple graph composition: a graph whose edges carry span programs.
/// Positive inputs route the minimum-energy unit s-t flow; negative inputs
/// realize the potential of the component-contracted graph.
ClassicEmbedResult classic_embed(const std::vector<std::string>& vertices,
                                 const std::string& s, const std::string& t,
                                 const std::vector<std::pair<std::string, std::string>>& graph_edges,
                                 const std::vector<HyperedgeWithWitnesses>& edge_programs,
                                 const std::optional<std::vector<bool>>& declared_positive = std::nullopt,
                                 double tol = 1e-8);

struct DivideConquerResult {
  ComposedResult composed;
  HypergraphInstance instance;
  std::vector<double> aux_plus, aux_minus;
  std::vector<double> branch_plus, branch_minus;  // of the realized branch
};

/// Divide-and-conquer assembly: an auxiliary function-evaluation hyperedge
/// from `source` into the branch labels, and one branch hyperedge hanging
/// off each label. Branch edges must be quiet (zero states and witnesses)
/// on inputs routed elsewhere.
DivideConquerResult divide_conquer(
    const HyperedgeWithWitnesses& aux, const std::string& source,
    const std::map<std::string, HyperedgeWithWitnesses>& family,
    const std::vector<std::string>& aux_value, double tol = 1e-8);

}  // namespace ggc
