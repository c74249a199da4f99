#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ggc/numerics.hpp"

namespace ggc {

/// Block-diagonal involution (O^2 = I). Simple problems use a single block;
/// composed problems keep one block per hyperedge so oracles never have to be
/// materialized as dense matrices over the full direct sum.
struct Involution {
  std::vector<CMatrix> blocks;
  std::vector<int> offsets;
  int dim = 0;

  Involution() = default;
  explicit Involution(CMatrix single);
  static Involution direct_sum(const std::vector<const Involution*>& parts);

  CVector apply(const CVector& v) const;
  CVector apply_adjoint(const CVector& v) const;
  CMatrix dense() const;
  /// max over blocks of ||B^2 - I||
  double involution_defect() const;
};

/// Reflection I - 2 P_{span(minus)}; fixes everything orthogonal to the given
/// minus vectors. Throws NotOrthogonal if a plus vector overlaps them.
Involution involution_fixing(int dim, const std::vector<CVector>& plus,
                             const std::vector<CVector>& minus,
                             double tol = 1e-9);

struct StateConversionProblem {
  std::vector<std::string> domain;
  std::vector<CVector> sigma;   // inputs, in V1
  std::vector<CVector> tau;     // outputs, in V2
  std::vector<CMatrix> oracle;  // unitary on M, one per input

  int size() const { return static_cast<int>(domain.size()); }
  int dim_v1() const { return sigma.empty() ? 0 : static_cast<int>(sigma[0].size()); }
  int dim_v2() const { return tau.empty() ? 0 : static_cast<int>(tau[0].size()); }
  int dim_m() const { return oracle.empty() ? 0 : static_cast<int>(oracle[0].rows()); }
  bool is_unit_norm(double tol = 1e-9) const;
  void validate() const;
};

struct StateReflectionProblem {
  std::vector<std::string> domain;
  std::vector<CVector> sigma_plus;
  std::vector<CVector> sigma_minus;
  std::vector<Involution> oracle;

  int size() const { return static_cast<int>(domain.size()); }
  int dim_v() const {
    return sigma_plus.empty() ? 0 : static_cast<int>(sigma_plus[0].size());
  }
  int dim_h() const { return oracle.empty() ? 0 : oracle[0].dim; }
  void validate(double tol = 1e-9) const;
};

struct WitnessFamily {
  std::vector<CVector> w_plus;
  std::vector<CVector> w_minus;

  int size() const { return static_cast<int>(w_plus.size()); }
  double plus_size(int x) const { return w_plus[x].squaredNorm(); }
  double minus_size(int x) const { return w_minus[x].squaredNorm(); }
  double max_plus_size() const;
  double max_minus_size() const;
};

/// State-reflection problem whose positive state is a mean-zero net-flow and
/// whose negative state is a potential, both over a labeled vertex set.
struct HyperedgeProblem {
  std::vector<std::string> vertex_set;
  std::vector<std::string> domain;
  std::vector<RVector> delta;      // net-flow per input
  std::vector<RVector> potential;  // U_x per input
  std::vector<Involution> oracle;

  int size() const { return static_cast<int>(domain.size()); }
  int n_vertices() const { return static_cast<int>(vertex_set.size()); }
  int vertex_index(const std::string& label) const;
  StateReflectionProblem as_reflection() const;
  /// Checks sum(delta)=0 and that U is constant on supp(delta).
  void validate(double tol = 1e-9) const;
};

/// Span program (H, x -> H(x), K, |w0>) with K given by an orthonormal basis.
struct SpanProgram {
  std::vector<std::string> domain;
  std::vector<CMatrix> projector;  // onto H(x)
  CMatrix kernel_basis;            // orthonormal columns spanning K
  CVector target;                  // |w0>, orthogonal to K

  int size() const { return static_cast<int>(domain.size()); }
  int dim_h() const { return static_cast<int>(target.size()); }
  void validate(double tol = 1e-9) const;
};

struct FeasibilityReport {
  double max_violation = 0.0;
  bool feasible = false;
  int worst_x = -1, worst_y = -1;
  RMatrix pair_residuals;  // max over sign pairs, per (x, y)
};

/// Adversary-bound Gram check for a state-reflection problem:
/// <w_x^s|(I - O_x^dag O_y)|w_y^t> = (1 - st) <sigma_x^s|sigma_y^t>.
FeasibilityReport check_feasibility(const StateReflectionProblem& problem,
                                    const WitnessFamily& witnesses, double tol);
FeasibilityReport check_feasibility(const HyperedgeProblem& problem,
                                    const WitnessFamily& witnesses, double tol);

/// Gram check for a state-conversion problem. Witness vectors live in
/// M (x) W with the W dimension inferred from their size.
FeasibilityReport check_conversion_feasibility(
    const StateConversionProblem& problem, const std::vector<CVector>& w,
    double tol);

struct ReflectionWithWitnesses {
  StateReflectionProblem problem;
  WitnessFamily witnesses;
};

/// Reformulates a unit-norm unitary-oracle state-conversion problem as a
/// state-reflection problem: sigma^pm = (sigma (+) pm tau)/sqrt2, the block
/// oracle is swap * (O (+) O^dag), and witnesses map to
/// (w (+) pm O w)/sqrt2, preserving sizes.
ReflectionWithWitnesses to_reflection(const StateConversionProblem& p,
                                      const std::vector<CVector>& w,
                                      double tol = 1e-9);

/// Reverse direction of the reformulation lemma: maps witnesses for the
/// reflection of `p` back to a witness map for `p` with
/// ||w_x||^2 = (R_x^+ + R_x^-)/2. The output is validated; InfeasibleInput
/// signals a family outside the construction's reach.
std::vector<CVector> from_reflection(const StateConversionProblem& p,
                                     const WitnessFamily& witnesses,
                                     double tol = 1e-9);

/// Rescaling freedom: states (a+ D sigma^+, a- D^{-dag} sigma^-), witnesses
/// (a+ w^+, a- w^-). Sizes scale by |a+|^2 and |a-|^2.
ReflectionWithWitnesses rescale(const StateReflectionProblem& r,
                                const WitnessFamily& w, const CMatrix& d,
                                Complex alpha_plus, Complex alpha_minus,
                                double tol = 1e-9);

/// U_x <- U_x + C_x * 1. Feasible witnesses stay feasible.
HyperedgeProblem shift_potential(const HyperedgeProblem& h,
                                 const std::vector<double>& c);

struct HyperedgeWithWitnesses {
  HyperedgeProblem problem;
  WitnessFamily witnesses;
};

/// Span program to a two-vertex hyperedge on {s, t}: unit flow when
/// f(x) = 1, unit potential difference when f(x) = 0, oracle 2 P_{H(x)} - I.
HyperedgeWithWitnesses span_to_hyperedge(const SpanProgram& sp,
                                         const std::vector<bool>& f,
                                         const std::vector<CVector>& witnesses,
                                         double tol = 1e-9);

struct SpanFromHyperedge {
  SpanProgram program;
  std::vector<CVector> witnesses;
  double complexity = 0.0;  // sqrt(max witness size)
};

/// Reverse of span_to_hyperedge for two-vertex hyperedges.
SpanFromHyperedge hyperedge_to_span(const HyperedgeProblem& h,
                                    const WitnessFamily& w, double tol = 1e-9);

/// Database-update hyperedge: delta = 1_xi - 1_eta, U = 1_xi + 1_eta.
/// Function evaluation is the special case xi = bottom for all inputs.
HyperedgeWithWitnesses database_hyperedge(
    const std::vector<std::string>& domain,
    const std::vector<std::string>& input_label,
    const std::vector<std::string>& output_label,
    const std::vector<Involution>& oracles, const WitnessFamily& witnesses,
    double tol = 1e-9);

/// Builds feasible database-hyperedge witnesses from conversion-problem data
/// (w_x, unitary O_x): w^pm = w (+) pm O w on H (+) H, sizes 2||w||^2.
/// Requires input labels disjoint from output labels.
HyperedgeWithWitnesses database_hyperedge_from_conversion(
    const std::vector<std::string>& domain,
    const std::vector<std::string>& input_label,
    const std::vector<std::string>& output_label,
    const std::vector<CMatrix>& unitary_oracle, const std::vector<CVector>& w,
    double tol = 1e-9);

/// Known-marked-fraction recovery: the state-reflection problem with states
/// |bot> pm |psi_x> is rescaled to the hyperedge problem with
/// delta = 1_bot - pi|_{M_x}/eps and U = 1_bot + 1_{M_x}; witnesses carry
/// over unchanged.
HyperedgeWithWitnesses known_fraction_rescale(
    const std::vector<std::string>& vertex_labels, const RVector& pi,
    double eps, const std::vector<std::vector<int>>& marked,
    const std::vector<Involution>& oracles, const WitnessFamily& witnesses,
    double tol = 1e-9);

struct LasVegasResult {
  WitnessFamily witnesses;
  Involution oracle_template;  // block oracle shape shared by inputs
  std::vector<Involution> oracles;
  std::vector<double> plus_sizes;
  std::vector<double> minus_sizes;
};

/// Witness family for a quantum Monte-Carlo trace: per input a list of
/// query-controlled state components Pi_{H_t} psi_{x,t} with oracle O_x, and
/// a positive schedule alpha. Sizes are sum_t alpha_t^{pm 1} ||phi_t||^2.
LasVegasResult las_vegas_witnesses(
    const std::vector<std::vector<CVector>>& traces,
    const std::vector<CMatrix>& unitary_oracle,
    const std::vector<double>& alpha);

/// Size-only variant: expected schedule mass before the stopping time,
/// E[sum_{t < T_x} alpha_t^{pm 1}] for each input's stopping distribution.
std::vector<std::pair<double, double>> las_vegas_sizes(
    const std::vector<std::vector<double>>& stop_dist,
    const std::vector<double>& alpha);

/// Projects a family onto the oracle eigenspaces (the normal form is without
/// loss of generality). Returns the largest discarded component norm.
double normalize_to_eigenform(const StateReflectionProblem& problem,
                              WitnessFamily& witnesses);

struct ConversionFixture {
  StateConversionProblem problem;
  std::vector<CVector> witnesses;
};

struct GramWitnesses {
  std::vector<CMatrix> oracles;  // unitary involutions on M
  std::vector<CVector> witnesses;
};

/// Conversion-problem witnesses realizing prescribed Gram targets
/// T_xy = <w_x|(I - O_x O_y)|w_y> for a real symmetric hollow T: Householder
/// oracles on basis vectors plus a padding coordinate per input that lets the
/// norms float upward. Used to synthesize routines with given constraint
/// values (database updates in particular).
GramWitnesses prescribed_gram_witnesses(Rng& rng, const RMatrix& targets);

/// Random unit-norm unitary-oracle conversion problem together with a
/// feasible witness map: the witnesses are drawn first and the state Grams
/// are factored to match their constraint values.
ConversionFixture random_conversion_fixture(Rng& rng, int n_inputs, int dim_m,
                                            int dim_w);

}  // namespace ggc
