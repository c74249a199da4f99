#pragma once

#include <optional>

#include "ggc/catalog.hpp"
#include "ggc/composition.hpp"
#include "ggc/markov.hpp"

namespace ggc {

/// Quantum walk search instance. The sizes tier carries per-routine witness
/// sizes only; the concrete tier additionally holds full hyperedge payloads
/// for every setup/update/checking routine, enabling full composition.
struct QWalkInstance {
  WeightedGraph graph;  // requires sum_e 1/r_e = 1/2 (normalized on load)
  std::vector<std::string> domain;
  std::vector<std::vector<int>> marked;    // per input: marked vertex ids
  std::vector<std::string> alphabet;       // database states
  std::vector<std::vector<int>> database;  // [vertex][input] -> alphabet id

  // sizes tier
  RMatrix setup_plus, setup_minus;    // [vertex][input]
  RMatrix update_plus, update_minus;  // [edge][input]
  std::vector<RMatrix> check_plus, check_minus;  // per vertex: [alphabet][input]

  // concrete tier (optional); payload problems use the composed labels
  std::vector<HyperedgeWithWitnesses> setup_payload;              // per vertex
  std::vector<HyperedgeWithWitnesses> update_payload;             // per edge
  std::vector<std::vector<HyperedgeWithWitnesses>> check_payload; // [v][D]
  bool concrete = false;

  int n_vertices() const { return graph.n(); }
  int n_inputs() const { return static_cast<int>(domain.size()); }
  bool is_marked(int v, int x) const;
  void validate() const;
};

/// Rescales resistances so sum_e 1/r_e = 1/2; returns the factor applied.
double normalize_instance(QWalkInstance* q);

struct BoundReport {
  std::vector<double> plus;   // per input
  std::vector<double> minus;  // per input
  std::vector<double> setup_term, update_term, check_term;  // positive side
  std::vector<double> setup_neg, update_neg, check_neg;     // negative side
  double objective = 0.0;  // sqrt(max plus * max minus)
  void finalize();
};

struct DetectionResult {
  BoundReport report;
  std::optional<ComposedResult> composed;  // concrete tier only
};

/// Detection composition: setup edges with weight 1/sigma_v, update edges
/// with weight r_e, checking edges with weight 1/tau_v. mu_x and nu_x are
/// the positive-flow endpoints; defaults are mu = sigma and the
/// resistance-minimizing nu on the marked set.
DetectionResult build_detection(
    const QWalkInstance& q, const RVector& sigma, const RVector& tau,
    const std::optional<std::vector<RVector>>& mu = std::nullopt,
    const std::optional<std::vector<RVector>>& nu = std::nullopt,
    double tol = 1e-8);

enum class FindingMode { kUnique, kFraction };

struct FindingResult {
  BoundReport report;
  std::optional<ComposedResult> composed;
  // fraction mode: the boundary problem after known-fraction recovery, with
  // states |bot> +- |psi_x>
  std::optional<ReflectionWithWitnesses> recovered;
};

FindingResult build_finding(const QWalkInstance& q, const RVector& sigma,
                            const RVector& tau, FindingMode mode,
                            double eps = 0.0,
                            const std::optional<std::vector<RVector>>& mu =
                                std::nullopt,
                            double tol = 1e-8);

struct UnifiedBound {
  double value = 0.0;  // S + sqrt(tR) U + sqrt(1+R) C
  double s_term = 0.0, u_term = 0.0, c_term = 0.0;
  double t_param = 1;
  double r_param = 0.0;
  // verified inequality chain on a concrete instance, when supplied
  bool chain_checked = false;
  bool chain_ok = false;
  double positive_size = 0.0, positive_bound = 0.0;
  double negative_size = 0.0;
};

/// Closed-form unified walk-search bound from aggregate witness sizes. The
/// aggregates are normalized to M- = 1, M+ = M^2 before evaluation.
UnifiedBound unified_bound(double s_plus, double s_minus, double u_plus,
                           double u_minus, double c_plus, double c_minus,
                           int t, double big_r);

/// Evaluates the unified bound on an instance: R is computed as
/// max_x R_eff(P^t; sigma - nu_x) for the t-free construction's nu_x, and the
/// inequality chain (positive <= S^2 + tRU^2 + 2(1+R)C^2, negative <= 3) is
/// verified against build_detection's sizes.
UnifiedBound unified_bound_on_instance(const QWalkInstance& q,
                                       const RVector& sigma, int t);

/// Variable-query detection: per-routine rescalings push all weight to the
/// negative side; each positive term is at most 1.
struct VariableQueryReport {
  BoundReport report;
  std::vector<double> pos_setup, pos_update, pos_check;  // each <= 1
  double eps = 0.0;
  double big_r = 0.0;
};

VariableQueryReport variable_query_bounds(const QWalkInstance& q,
                                          const RVector& sigma,
                                          const RVector& tau, int variant);

struct MnrsReport {
  BoundReport report;
  double eps = 0.0;
  double gap = 0.0;
  // per positive input: R_eff(G,r; pi - pi|_M/eps) <= (1/eps - 1)/gap
  std::vector<double> resistance_lhs;
  std::vector<double> resistance_rhs;
  bool inequality_holds = false;
};

/// Variable-query MNRS with sigma = tau = pi, including the numeric check
/// of the resistance inequality that backs the bound.
MnrsReport mnrs_bounds(const QWalkInstance& q);

/// Deterministic random concrete instance for tests: payload routines are
/// synthesized so their witness sizes match the declared tables exactly.
/// `forced_marked` pins the marked sets (payloads depend on them).
QWalkInstance random_concrete_instance(
    Rng& rng, int n_vertices, int n_states, int n_inputs,
    bool allow_empty_marked = true,
    const std::vector<std::vector<int>>* forced_marked = nullptr);

}  // namespace ggc
