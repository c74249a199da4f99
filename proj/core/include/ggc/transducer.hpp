#pragma once

#include "ggc/reflection.hpp"

namespace ggc {

/// Unitary on V (+) H. Built here as the reflection 2 P_A - I through the
/// span of the positive witness embeddings.
struct Transducer {
  CMatrix u;
  int dim_v = 0;
  int dim_h = 0;

  void validate(double tol = 1e-9) const;
};

/// A = span{ sigma_x^+ (+) w_x^+ }. The returned unitary is 2 P_A - I.
/// Throws NotOrthogonal when some sigma_y^- (+) (-w_y^-) overlaps A beyond
/// tol, which signals an infeasible witness family.
Transducer build_reflection(const StateReflectionProblem& r,
                            const WitnessFamily& w, double tol = 1e-9);

/// U * (I (+) O_x) as a plain transducer, for the solve/emulate entry points.
Transducer fold_oracle(const Transducer& t, const Involution& ox);

struct TransductionReport {
  double plus_residual = 0.0;
  double minus_residual = 0.0;
  bool ok = false;
};

/// Checks U (I (+) O_x) (sigma^pm (+) w^pm) = pm sigma^pm (+) w^pm.
TransductionReport verify_transduction(const Transducer& t, const Involution& ox,
                                       const CVector& sigma_plus,
                                       const CVector& sigma_minus,
                                       const CVector& w_plus,
                                       const CVector& w_minus, double tol);

struct TransduceResult {
  CVector tau;
  CVector w_min;  // minimal catalyst
  double residual = 0.0;
};

/// With U = [[A,B],[C,D]] over V (+) H, solves (I - D) w = C sigma for the
/// minimal-norm catalyst and returns tau = A sigma + B w.
TransduceResult transduce_solve(const Transducer& t, const CVector& sigma,
                                double tol = 1e-8);

struct EmulationResult {
  CVector output;       // renormalized V register after K rounds
  double error = 0.0;   // || output - tau_exact ||
  double bound = 0.0;   // 2 ||w_min|| / sqrt(K), reported for comparison
  double catalyst_norm = 0.0;
};

/// Experimental K-call emulation: K rounds on V (+) (H tensor C^K), feeding
/// the accumulated catalyst register back in and averaging the V outputs
/// (mean-ergodic averaging). Calls U (I (+) O_x) exactly K times. The error
/// is measured against transduce_solve, not assumed.
EmulationResult emulate(const Transducer& t, const Involution& ox,
                        const CVector& sigma, int k);

}  // namespace ggc
