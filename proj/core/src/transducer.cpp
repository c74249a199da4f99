#include "ggc/transducer.hpp"

#include <cmath>

namespace ggc {

void Transducer::validate(double tol) const {
  const int n = dim_v + dim_h;
  if (u.rows() != n || u.cols() != n) {
    throw DimensionMismatch("transducer: U must act on V (+) H");
  }
  if ((u.adjoint() * u - CMatrix::Identity(n, n)).norm() > tol * n) {
    throw InvalidInstance("transducer: U is not unitary");
  }
}

Transducer build_reflection(const StateReflectionProblem& r,
                            const WitnessFamily& w, double tol) {
  r.validate(std::max(tol, 1e-9));
  const int dv = r.dim_v();
  const int dh = r.dim_h();
  const int n = dv + dh;

  // Modified Gram-Schmidt with re-orthogonalization; witness spans across
  // inputs are often highly collinear.
  std::vector<CVector> basis;
  for (int x = 0; x < r.size(); ++x) {
    CVector v(n);
    v.head(dv) = r.sigma_plus[x];
    v.tail(dh) = w.w_plus[x];
    double original = v.norm();
    if (original < 1e-14) continue;
    for (const CVector& q : basis) v -= q.dot(v) * q;
    for (const CVector& q : basis) v -= q.dot(v) * q;
    if (v.norm() > 1e-10 * original) basis.push_back(v.normalized());
  }

  // Sandwich condition: every sigma_y^- (+) (-w_y^-) must be orthogonal to A.
  for (int y = 0; y < r.size(); ++y) {
    CVector neg(n);
    neg.head(dv) = r.sigma_minus[y];
    neg.tail(dh) = -w.w_minus[y];
    double scale = std::max(1.0, neg.norm());
    for (const CVector& q : basis) {
      if (std::abs(q.dot(neg)) > tol * scale) {
        throw NotOrthogonal(
            "build_reflection: negative vector for input " + r.domain[y] +
            " overlaps the positive span (infeasible witnesses?)");
      }
    }
  }

  Transducer t;
  t.dim_v = dv;
  t.dim_h = dh;
  t.u = -CMatrix::Identity(n, n);
  for (const CVector& q : basis) t.u += 2.0 * q * q.adjoint();
  return t;
}

Transducer fold_oracle(const Transducer& t, const Involution& ox) {
  if (ox.dim != t.dim_h) {
    throw DimensionMismatch("fold_oracle: oracle does not act on H");
  }
  const int n = t.dim_v + t.dim_h;
  CMatrix io = CMatrix::Identity(n, n);
  io.bottomRightCorner(t.dim_h, t.dim_h) = ox.dense();
  Transducer out;
  out.dim_v = t.dim_v;
  out.dim_h = t.dim_h;
  out.u = t.u * io;
  return out;
}

TransductionReport verify_transduction(const Transducer& t, const Involution& ox,
                                       const CVector& sigma_plus,
                                       const CVector& sigma_minus,
                                       const CVector& w_plus,
                                       const CVector& w_minus, double tol) {
  if (sigma_plus.size() != t.dim_v || w_plus.size() != t.dim_h ||
      sigma_minus.size() != t.dim_v || w_minus.size() != t.dim_h) {
    throw DimensionMismatch("verify_transduction: vector dimensions mismatch");
  }
  Transducer folded = fold_oracle(t, ox);
  auto run = [&](const CVector& s, const CVector& w, double sign) {
    CVector in(t.dim_v + t.dim_h);
    in.head(t.dim_v) = s;
    in.tail(t.dim_h) = w;
    CVector out = folded.u * in;
    CVector want(t.dim_v + t.dim_h);
    want.head(t.dim_v) = sign * s;
    want.tail(t.dim_h) = w;
    return (out - want).norm();
  };
  TransductionReport rep;
  rep.plus_residual = run(sigma_plus, w_plus, 1.0);
  rep.minus_residual = run(sigma_minus, w_minus, -1.0);
  rep.ok = rep.plus_residual <= tol && rep.minus_residual <= tol;
  return rep;
}

TransduceResult transduce_solve(const Transducer& t, const CVector& sigma,
                                double tol) {
  if (sigma.size() != t.dim_v) {
    throw DimensionMismatch("transduce_solve: sigma must live in V");
  }
  const auto a = t.u.topLeftCorner(t.dim_v, t.dim_v);
  const auto b = t.u.topRightCorner(t.dim_v, t.dim_h);
  const auto c = t.u.bottomLeftCorner(t.dim_h, t.dim_v);
  const auto d = t.u.bottomRightCorner(t.dim_h, t.dim_h);

  TransduceResult out;
  out.w_min = min_norm_solve(
      CMatrix(CMatrix::Identity(t.dim_h, t.dim_h) - d), CVector(c * sigma));
  out.tau = a * sigma + b * out.w_min;

  CVector in(t.dim_v + t.dim_h), want(t.dim_v + t.dim_h);
  in.head(t.dim_v) = sigma;
  in.tail(t.dim_h) = out.w_min;
  want.head(t.dim_v) = out.tau;
  want.tail(t.dim_h) = out.w_min;
  out.residual = (t.u * in - want).norm();
  double scale = std::max(1.0, in.norm());
  if (out.residual > tol * scale) {
    throw NumericalFailure("transduce_solve: catalyst equation residual " +
                           std::to_string(out.residual));
  }
  if (std::abs(out.tau.norm() - sigma.norm()) > tol * scale) {
    throw NumericalFailure("transduce_solve: ||tau|| != ||sigma||");
  }
  return out;
}

EmulationResult emulate(const Transducer& t, const Involution& ox,
                        const CVector& sigma, int k) {
  if (k < 1) throw ParseError("emulate: K must be >= 1");
  Transducer folded = fold_oracle(t, ox);
  TransduceResult exact = transduce_solve(folded, sigma);

  // Round j re-feeds sigma with the catalyst register accumulated so far and
  // averages the V outputs; the mean-ergodic limit of the H-block powers makes
  // the average converge to tau.
  CVector h = CVector::Zero(t.dim_h);
  CVector v_sum = CVector::Zero(t.dim_v);
  CVector in(t.dim_v + t.dim_h);
  for (int j = 0; j < k; ++j) {
    in.head(t.dim_v) = sigma;
    in.tail(t.dim_h) = h;
    CVector stepped = folded.u * in;
    v_sum += stepped.head(t.dim_v);
    h = stepped.tail(t.dim_h);
  }
  CVector avg = v_sum / static_cast<double>(k);

  EmulationResult out;
  out.catalyst_norm = exact.w_min.norm();
  out.bound = 2.0 * out.catalyst_norm / std::sqrt(static_cast<double>(k));
  if (avg.norm() > 1e-14) {
    out.output = avg * (sigma.norm() / avg.norm());
  } else {
    out.output = avg;
  }
  out.error = (out.output - exact.tau).norm();
  return out;
}

}  // namespace ggc
