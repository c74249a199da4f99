#include "ggc/reflection.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace ggc {

namespace {

CVector embed(const CVector& a, const CVector& b) {
  CVector out(a.size() + b.size());
  out.head(a.size()) = a;
  out.tail(b.size()) = b;
  return out;
}

CVector to_complex(const RVector& v) { return v.cast<Complex>(); }

}  // namespace

Involution::Involution(CMatrix single) {
  dim = static_cast<int>(single.rows());
  offsets = {0};
  blocks = {std::move(single)};
}

Involution Involution::direct_sum(const std::vector<const Involution*>& parts) {
  Involution out;
  for (const Involution* p : parts) {
    for (size_t b = 0; b < p->blocks.size(); ++b) {
      out.offsets.push_back(out.dim + p->offsets[b]);
      out.blocks.push_back(p->blocks[b]);
    }
    out.dim += p->dim;
  }
  return out;
}

CVector Involution::apply(const CVector& v) const {
  if (v.size() != dim) throw DimensionMismatch("Involution::apply: bad size");
  CVector out = v;
  for (size_t b = 0; b < blocks.size(); ++b) {
    int off = offsets[b];
    int sz = static_cast<int>(blocks[b].rows());
    out.segment(off, sz) = blocks[b] * v.segment(off, sz);
  }
  return out;
}

CVector Involution::apply_adjoint(const CVector& v) const {
  if (v.size() != dim) throw DimensionMismatch("Involution::apply: bad size");
  CVector out = v;
  for (size_t b = 0; b < blocks.size(); ++b) {
    int off = offsets[b];
    int sz = static_cast<int>(blocks[b].rows());
    out.segment(off, sz) = blocks[b].adjoint() * v.segment(off, sz);
  }
  return out;
}

CMatrix Involution::dense() const {
  CMatrix out = CMatrix::Identity(dim, dim);
  for (size_t b = 0; b < blocks.size(); ++b) {
    int off = offsets[b];
    int sz = static_cast<int>(blocks[b].rows());
    out.block(off, off, sz, sz) = blocks[b];
  }
  return out;
}

double Involution::involution_defect() const {
  double worst = 0.0;
  for (const auto& b : blocks) {
    worst = std::max(
        worst, (b * b - CMatrix::Identity(b.rows(), b.cols())).norm());
  }
  return worst;
}

Involution involution_fixing(int dim, const std::vector<CVector>& plus,
                             const std::vector<CVector>& minus, double tol) {
  // Orthonormalize the minus vectors, then reflect through their span.
  std::vector<CVector> basis;
  for (const CVector& v : minus) {
    CVector u = v;
    for (const CVector& q : basis) u -= q.dot(u) * q;
    for (const CVector& q : basis) u -= q.dot(u) * q;  // re-orthogonalize
    if (u.norm() > 1e-12 * std::max(1.0, v.norm())) basis.push_back(u.normalized());
  }
  for (const CVector& p : plus) {
    for (const CVector& q : basis) {
      if (std::abs(q.dot(p)) > tol * std::max(1.0, p.norm())) {
        throw NotOrthogonal(
            "involution_fixing: plus vector overlaps the minus span");
      }
    }
  }
  CMatrix o = CMatrix::Identity(dim, dim);
  for (const CVector& q : basis) o -= 2.0 * q * q.adjoint();
  return Involution(std::move(o));
}

bool StateConversionProblem::is_unit_norm(double tol) const {
  for (int x = 0; x < size(); ++x) {
    if (std::abs(sigma[x].norm() - 1.0) > tol) return false;
    if (std::abs(tau[x].norm() - 1.0) > tol) return false;
  }
  return true;
}

void StateConversionProblem::validate() const {
  const size_t n = domain.size();
  if (sigma.size() != n || tau.size() != n || oracle.size() != n) {
    throw DimensionMismatch("conversion problem: per-input arrays disagree");
  }
  for (int x = 0; x < size(); ++x) {
    if (sigma[x].size() != dim_v1() || tau[x].size() != dim_v2() ||
        oracle[x].rows() != dim_m() || oracle[x].cols() != dim_m()) {
      throw DimensionMismatch("conversion problem: inconsistent dimensions");
    }
    CMatrix uu = oracle[x].adjoint() * oracle[x];
    if ((uu - CMatrix::Identity(dim_m(), dim_m())).norm() > 1e-8) {
      throw InvalidInstance("conversion problem: oracle is not unitary");
    }
  }
}

void StateReflectionProblem::validate(double tol) const {
  const size_t n = domain.size();
  if (sigma_plus.size() != n || sigma_minus.size() != n || oracle.size() != n) {
    throw DimensionMismatch("reflection problem: per-input arrays disagree");
  }
  for (int x = 0; x < size(); ++x) {
    if (sigma_plus[x].size() != dim_v() || sigma_minus[x].size() != dim_v() ||
        oracle[x].dim != dim_h()) {
      throw DimensionMismatch("reflection problem: inconsistent dimensions");
    }
    if (oracle[x].involution_defect() > tol) {
      throw InvalidInstance("reflection problem: oracle is not an involution");
    }
    double overlap = std::abs(sigma_plus[x].dot(sigma_minus[x]));
    double scale = std::max(1.0, sigma_plus[x].norm() * sigma_minus[x].norm());
    if (overlap > tol * scale) {
      throw InvalidInstance(
          "reflection problem: sigma+ and sigma- are not orthogonal at input " +
          domain[x]);
    }
  }
}

double WitnessFamily::max_plus_size() const {
  double m = 0.0;
  for (const auto& w : w_plus) m = std::max(m, w.squaredNorm());
  return m;
}

double WitnessFamily::max_minus_size() const {
  double m = 0.0;
  for (const auto& w : w_minus) m = std::max(m, w.squaredNorm());
  return m;
}

int HyperedgeProblem::vertex_index(const std::string& label) const {
  for (int i = 0; i < n_vertices(); ++i) {
    if (vertex_set[i] == label) return i;
  }
  throw ParseError("hyperedge: unknown vertex '" + label + "'");
}

StateReflectionProblem HyperedgeProblem::as_reflection() const {
  StateReflectionProblem r;
  r.domain = domain;
  r.oracle = oracle;
  for (int x = 0; x < size(); ++x) {
    r.sigma_plus.push_back(to_complex(delta[x]));
    r.sigma_minus.push_back(to_complex(potential[x]));
  }
  return r;
}

void HyperedgeProblem::validate(double tol) const {
  if (delta.size() != domain.size() || potential.size() != domain.size()) {
    throw DimensionMismatch("hyperedge: per-input arrays disagree");
  }
  for (int x = 0; x < size(); ++x) {
    if (delta[x].size() != n_vertices() || potential[x].size() != n_vertices()) {
      throw DimensionMismatch("hyperedge: vector sizes disagree with vertex set");
    }
    if (std::abs(delta[x].sum()) > tol * std::max(1.0, delta[x].norm())) {
      throw InvalidInstance("hyperedge: net-flow does not sum to zero at " +
                            domain[x]);
    }
    // U constant on supp(delta)
    bool have = false;
    double value = 0.0;
    for (int v = 0; v < n_vertices(); ++v) {
      if (std::abs(delta[x][v]) > tol) {
        if (!have) {
          value = potential[x][v];
          have = true;
        } else if (std::abs(potential[x][v] - value) > tol) {
          throw InvalidInstance(
              "hyperedge: potential not constant on the flow support at " +
              domain[x]);
        }
      }
    }
  }
}

void SpanProgram::validate(double tol) const {
  const int d = dim_h();
  for (const auto& p : projector) {
    if (p.rows() != d || p.cols() != d) {
      throw DimensionMismatch("span program: projector dimension mismatch");
    }
    if ((p * p - p).norm() > tol || (p - p.adjoint()).norm() > tol) {
      throw InvalidInstance("span program: projector is not Hermitian idempotent");
    }
  }
  if (kernel_basis.size() > 0) {
    if (kernel_basis.rows() != d) {
      throw DimensionMismatch("span program: kernel basis dimension mismatch");
    }
    CMatrix gram = kernel_basis.adjoint() * kernel_basis;
    if ((gram - CMatrix::Identity(gram.rows(), gram.cols())).norm() > tol) {
      throw InvalidInstance("span program: kernel basis is not orthonormal");
    }
    if ((kernel_basis.adjoint() * target).norm() > tol * std::max(1.0, target.norm())) {
      throw InvalidInstance("span program: target vector is not orthogonal to K");
    }
  }
}

namespace {

FeasibilityReport feasibility_impl(const std::vector<CVector>& sp,
                                   const std::vector<CVector>& sm,
                                   const std::vector<Involution>& oracle,
                                   const WitnessFamily& w, double tol) {
  const int n = static_cast<int>(sp.size());
  if (w.w_plus.size() != static_cast<size_t>(n) ||
      w.w_minus.size() != static_cast<size_t>(n)) {
    throw DimensionMismatch("check_feasibility: witness count mismatch");
  }
  // Precompute O_x applied to each witness; the Gram entry
  // <w_x^s|(I - O_x^dag O_y)|w_y^t> becomes <w_x^s|w_y^t> - <O w_x^s|O w_y^t>.
  std::vector<CVector> op(n), om(n);
  for (int x = 0; x < n; ++x) {
    if (w.w_plus[x].size() != oracle[x].dim || w.w_minus[x].size() != oracle[x].dim) {
      throw DimensionMismatch("check_feasibility: witness dimension mismatch");
    }
    op[x] = oracle[x].apply(w.w_plus[x]);
    om[x] = oracle[x].apply(w.w_minus[x]);
  }
  FeasibilityReport rep;
  rep.pair_residuals = RMatrix::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      double worst = 0.0;
      for (int s = 0; s < 2; ++s) {
        for (int t = 0; t < 2; ++t) {
          const CVector& wx = s == 0 ? w.w_plus[x] : w.w_minus[x];
          const CVector& owx = s == 0 ? op[x] : om[x];
          const CVector& wy = t == 0 ? w.w_plus[y] : w.w_minus[y];
          const CVector& owy = t == 0 ? op[y] : om[y];
          Complex lhs = wx.dot(wy) - owx.dot(owy);
          double st = (s == t) ? 1.0 : -1.0;
          const CVector& sx = s == 0 ? sp[x] : sm[x];
          const CVector& sy = t == 0 ? sp[y] : sm[y];
          Complex rhs = (1.0 - st) * sx.dot(sy);
          worst = std::max(worst, std::abs(lhs - rhs));
        }
      }
      rep.pair_residuals(x, y) = worst;
      if (worst > rep.max_violation) {
        rep.max_violation = worst;
        rep.worst_x = x;
        rep.worst_y = y;
      }
    }
  }
  rep.feasible = rep.max_violation <= tol;
  return rep;
}

}  // namespace

FeasibilityReport check_feasibility(const StateReflectionProblem& problem,
                                    const WitnessFamily& witnesses,
                                    double tol) {
  return feasibility_impl(problem.sigma_plus, problem.sigma_minus,
                          problem.oracle, witnesses, tol);
}

FeasibilityReport check_feasibility(const HyperedgeProblem& problem,
                                    const WitnessFamily& witnesses,
                                    double tol) {
  return check_feasibility(problem.as_reflection(), witnesses, tol);
}

FeasibilityReport check_conversion_feasibility(
    const StateConversionProblem& problem, const std::vector<CVector>& w,
    double tol) {
  const int n = problem.size();
  if (w.size() != static_cast<size_t>(n)) {
    throw DimensionMismatch("conversion feasibility: witness count mismatch");
  }
  const int m = problem.dim_m();
  // Infer the W dimension; oracle acts as O (x) I_W, i.e. blockwise when the
  // layout is W-major: v = (v_1 .. v_k) with each v_i in M.
  std::vector<CVector> ow(n);
  int k = -1;
  for (int x = 0; x < n; ++x) {
    if (m == 0 || w[x].size() % m != 0) {
      throw DimensionMismatch("conversion feasibility: witness not in M (x) W");
    }
    int kk = static_cast<int>(w[x].size()) / m;
    if (k < 0) k = kk;
    if (kk != k) {
      throw DimensionMismatch("conversion feasibility: inconsistent W dims");
    }
    ow[x].resize(w[x].size());
    for (int b = 0; b < k; ++b) {
      ow[x].segment(b * m, m) = problem.oracle[x] * w[x].segment(b * m, m);
    }
  }
  FeasibilityReport rep;
  rep.pair_residuals = RMatrix::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      Complex lhs = w[x].dot(w[y]) - ow[x].dot(ow[y]);
      Complex rhs = problem.sigma[x].dot(problem.sigma[y]) -
                    problem.tau[x].dot(problem.tau[y]);
      double r = std::abs(lhs - rhs);
      rep.pair_residuals(x, y) = r;
      if (r > rep.max_violation) {
        rep.max_violation = r;
        rep.worst_x = x;
        rep.worst_y = y;
      }
    }
  }
  rep.feasible = rep.max_violation <= tol;
  return rep;
}

ReflectionWithWitnesses to_reflection(const StateConversionProblem& p,
                                      const std::vector<CVector>& w,
                                      double tol) {
  p.validate();
  if (!p.is_unit_norm(1e-8)) {
    throw InvalidInstance("to_reflection: problem must be unit-norm");
  }
  auto base = check_conversion_feasibility(p, w, tol);
  if (!base.feasible) {
    throw InfeasibleInput("to_reflection: witness map violates the Gram "
                          "constraints (max violation " +
                          std::to_string(base.max_violation) + ")");
  }
  const int m = p.dim_m();
  const int k = static_cast<int>(w[0].size()) / m;
  const int h = m * k;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  ReflectionWithWitnesses out;
  out.problem.domain = p.domain;
  for (int x = 0; x < p.size(); ++x) {
    out.problem.sigma_plus.push_back(inv_sqrt2 * embed(p.sigma[x], p.tau[x]));
    out.problem.sigma_minus.push_back(
        inv_sqrt2 * embed(p.sigma[x], CVector(-p.tau[x])));
    // Block oracle swap * (O (+) O^dag) on H (+) H.
    CMatrix big = CMatrix::Zero(2 * h, 2 * h);
    for (int b = 0; b < k; ++b) {
      big.block(b * m, h + b * m, m, m) = p.oracle[x].adjoint();
      big.block(h + b * m, b * m, m, m) = p.oracle[x];
    }
    out.problem.oracle.emplace_back(std::move(big));

    CVector oww(h);
    for (int b = 0; b < k; ++b) {
      oww.segment(b * m, m) = p.oracle[x] * w[x].segment(b * m, m);
    }
    out.witnesses.w_plus.push_back(inv_sqrt2 * embed(w[x], oww));
    out.witnesses.w_minus.push_back(inv_sqrt2 * embed(w[x], CVector(-oww)));
  }
  out.problem.validate(tol);
  auto rep = check_feasibility(out.problem, out.witnesses, std::max(tol, 1e-9));
  if (!rep.feasible) {
    throw NumericalFailure("to_reflection: constructed family fails its own "
                           "feasibility check");
  }
  return out;
}

std::vector<CVector> from_reflection(const StateConversionProblem& p,
                                     const WitnessFamily& witnesses,
                                     double tol) {
  p.validate();
  const int m = p.dim_m();
  if (witnesses.size() != p.size()) {
    throw DimensionMismatch("from_reflection: witness count mismatch");
  }
  const int two_h = static_cast<int>(witnesses.w_plus[0].size());
  if (two_h % (2 * m) != 0) {
    throw DimensionMismatch("from_reflection: witnesses do not live on H(+)H");
  }
  const int h = two_h / 2;
  const int k = h / m;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  std::vector<CVector> out;
  for (int x = 0; x < p.size(); ++x) {
    auto apply_bar = [&](const CVector& v) {
      // swap * (O (+) O^dag) blockwise
      CVector r(two_h);
      for (int b = 0; b < k; ++b) {
        r.segment(h + b * m, m) = p.oracle[x] * v.segment(b * m, m);
        r.segment(b * m, m) = p.oracle[x].adjoint() * v.segment(h + b * m, m);
      }
      return r;
    };
    auto eig_part = [&](const CVector& v, double sign) {
      return CVector((v + sign * apply_bar(v)) / 2.0);
    };
    // Region A hosts the +1 part of w^+ plus the -1 part of w^-, region B the
    // complementary projections; both get I (+) O^dag applied blockwise.
    CVector ra = eig_part(witnesses.w_plus[x], 1.0) +
                 eig_part(witnesses.w_minus[x], -1.0);
    CVector rb = eig_part(witnesses.w_plus[x], -1.0) +
                 eig_part(witnesses.w_minus[x], 1.0);
    auto twist = [&](CVector v) {
      for (int b = 0; b < k; ++b) {
        v.segment(h + b * m, m) = p.oracle[x].adjoint() * v.segment(h + b * m, m);
      }
      return v;
    };
    CVector wx(2 * two_h);
    wx.head(two_h) = twist(ra);
    wx.tail(two_h) = twist(rb);
    out.push_back(inv_sqrt2 * wx);
  }
  auto rep = check_conversion_feasibility(p, out, std::max(tol, 1e-8));
  if (!rep.feasible) {
    throw InfeasibleInput(
        "from_reflection: reconstructed witness map is infeasible (violation " +
        std::to_string(rep.max_violation) + ")");
  }
  return out;
}

ReflectionWithWitnesses rescale(const StateReflectionProblem& r,
                                const WitnessFamily& w, const CMatrix& d,
                                Complex alpha_plus, Complex alpha_minus,
                                double tol) {
  if (d.rows() != r.dim_v() || d.cols() != r.dim_v()) {
    throw DimensionMismatch("rescale: D must act on V");
  }
  Eigen::JacobiSVD<CMatrix> svd(d, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (smin <= tol * smax) {
    throw SingularScaling("rescale: D is singular at the working tolerance");
  }
  CMatrix dinv_dag = d.inverse().adjoint();

  ReflectionWithWitnesses out;
  out.problem.domain = r.domain;
  out.problem.oracle = r.oracle;
  for (int x = 0; x < r.size(); ++x) {
    out.problem.sigma_plus.push_back(alpha_plus * (d * r.sigma_plus[x]));
    out.problem.sigma_minus.push_back(alpha_minus * (dinv_dag * r.sigma_minus[x]));
    out.witnesses.w_plus.push_back(alpha_plus * w.w_plus[x]);
    out.witnesses.w_minus.push_back(alpha_minus * w.w_minus[x]);
  }
  return out;
}

HyperedgeProblem shift_potential(const HyperedgeProblem& h,
                                 const std::vector<double>& c) {
  if (c.size() != h.domain.size()) {
    throw DimensionMismatch("shift_potential: one constant per input required");
  }
  HyperedgeProblem out = h;
  for (int x = 0; x < h.size(); ++x) {
    out.potential[x].array() += c[x];
  }
  return out;
}

HyperedgeWithWitnesses span_to_hyperedge(const SpanProgram& sp,
                                         const std::vector<bool>& f,
                                         const std::vector<CVector>& witnesses,
                                         double tol) {
  sp.validate(tol);
  const int n = sp.size();
  if (f.size() != static_cast<size_t>(n) ||
      witnesses.size() != static_cast<size_t>(n)) {
    throw DimensionMismatch("span_to_hyperedge: per-input arrays disagree");
  }
  const int d = sp.dim_h();
  CMatrix pk = sp.kernel_basis.size() > 0
                   ? CMatrix(sp.kernel_basis * sp.kernel_basis.adjoint())
                   : CMatrix(CMatrix::Zero(d, d));
  for (int x = 0; x < n; ++x) {
    const CVector& wx = witnesses[x];
    double scale = std::max(1.0, wx.norm());
    if (f[x]) {
      if (((CMatrix::Identity(d, d) - sp.projector[x]) * wx).norm() > tol * scale) {
        throw InvalidWitness("span_to_hyperedge: positive witness not in H(x)");
      }
      if (((CMatrix::Identity(d, d) - pk) * (wx - sp.target)).norm() >
          tol * std::max(1.0, (wx - sp.target).norm())) {
        throw InvalidWitness(
            "span_to_hyperedge: positive witness minus target not in K");
      }
    } else {
      if ((sp.projector[x] * wx).norm() > tol * scale) {
        throw InvalidWitness("span_to_hyperedge: negative witness not in H(x)^perp");
      }
      if ((pk * wx).norm() > tol * scale) {
        throw InvalidWitness("span_to_hyperedge: negative witness not in K^perp");
      }
      if (std::abs(sp.target.dot(wx) - Complex(1, 0)) > tol) {
        throw InvalidWitness(
            "span_to_hyperedge: negative witness has <w0|w> != 1");
      }
    }
  }

  HyperedgeWithWitnesses out;
  out.problem.vertex_set = {"s", "t"};
  out.problem.domain = sp.domain;
  for (int x = 0; x < n; ++x) {
    RVector delta(2), pot(2);
    if (f[x]) {
      delta << 1, -1;
      pot << 0, 0;
    } else {
      delta << 0, 0;
      pot << 0, -1;
    }
    out.problem.delta.push_back(delta);
    out.problem.potential.push_back(pot);
    out.problem.oracle.emplace_back(
        CMatrix(2.0 * sp.projector[x] - CMatrix::Identity(d, d)));
    out.witnesses.w_plus.push_back(f[x] ? witnesses[x] : CVector(CVector::Zero(d)));
    out.witnesses.w_minus.push_back(f[x] ? CVector(CVector::Zero(d)) : witnesses[x]);
  }
  out.problem.validate(tol);
  auto rep = check_feasibility(out.problem, out.witnesses, std::max(tol, 1e-9));
  if (!rep.feasible) {
    throw InvalidWitness(
        "span_to_hyperedge: carried witnesses fail the hyperedge Gram check");
  }
  return out;
}

SpanFromHyperedge hyperedge_to_span(const HyperedgeProblem& h,
                                    const WitnessFamily& w, double tol) {
  if (h.n_vertices() != 2) {
    throw UnsupportedShape("hyperedge_to_span: two-vertex hyperedges only");
  }
  h.validate(tol);
  const int n = h.size();
  const int d = h.oracle.empty() ? 0 : h.oracle[0].dim;
  std::vector<bool> positive(n);
  for (int x = 0; x < n; ++x) positive[x] = h.delta[x].norm() > tol;

  // A = span{ sigma_x^+ (+) w_x^+ } over positive inputs; vectors split into
  // the flow line span{1_s - 1_t} and the kernel K of zero-flow combinations.
  std::vector<CVector> gs;
  for (int x = 0; x < n; ++x) {
    if (!positive[x]) continue;
    CVector v(2 + d);
    v.head(2) = to_complex(h.delta[x]);
    v.tail(d) = w.w_plus[x];
    gs.push_back(v);
  }
  std::vector<CVector> basis;
  for (const CVector& v : gs) {
    CVector u = v;
    for (const CVector& q : basis) u -= q.dot(u) * q;
    for (const CVector& q : basis) u -= q.dot(u) * q;
    if (u.norm() > 1e-10 * std::max(1.0, v.norm())) basis.push_back(u.normalized());
  }
  const int rank = static_cast<int>(basis.size());
  CVector flow_dir(2 + d);
  flow_dir.setZero();
  flow_dir[0] = 1.0 / std::sqrt(2.0);
  flow_dir[1] = -1.0 / std::sqrt(2.0);

  CVector g(rank);
  for (int i = 0; i < rank; ++i) g[i] = flow_dir.dot(basis[i]);

  SpanFromHyperedge out;
  out.program.domain = h.domain;
  for (int x = 0; x < n; ++x) {
    CMatrix o = h.oracle[x].dense();
    out.program.projector.push_back((CMatrix::Identity(d, d) + o) / 2.0);
  }

  // K: combinations with zero flow coefficient.
  std::vector<CVector> kvecs;
  if (rank > 0 && g.norm() > 1e-10) {
    CVector gn = g.normalized();
    // complete gn to a basis of C^rank; columns orthogonal to gn give K
    CMatrix proj = CMatrix::Identity(rank, rank) - gn * gn.adjoint();
    Eigen::JacobiSVD<CMatrix> svd(proj, Eigen::ComputeThinU);
    for (int i = 0; i < rank; ++i) {
      if (svd.singularValues()[i] > 0.5) {
        CVector c = svd.matrixU().col(i);
        CVector amb = CVector::Zero(2 + d);
        for (int j = 0; j < rank; ++j) amb += c[j] * basis[j];
        kvecs.push_back(amb.tail(d));
      }
    }
    // psi*: member of A with flow part exactly (1_s - 1_t)
    CVector cstar = std::sqrt(2.0) * g / g.squaredNorm();
    CVector psi = CVector::Zero(2 + d);
    for (int j = 0; j < rank; ++j) psi += cstar[j] * basis[j];
    CVector w0 = psi.tail(d);
    for (const CVector& kv : kvecs) {
      CVector kn = kv.normalized();
      w0 -= kn.dot(w0) * kn;
    }
    out.program.target = w0;
  } else {
    // No positive inputs: pick the minimal-norm w0 with <w0|w_x^-> = 1.
    std::vector<int> negs;
    for (int x = 0; x < n; ++x) {
      if (!positive[x]) negs.push_back(x);
    }
    CMatrix a(negs.size(), d);
    for (size_t i = 0; i < negs.size(); ++i) {
      a.row(i) = w.w_minus[negs[i]].adjoint();
    }
    CVector ones = CVector::Ones(static_cast<int>(negs.size()));
    out.program.target = min_norm_solve(a, ones);
    CVector check = a * out.program.target;
    if ((check - ones).norm() > tol * std::sqrt(double(negs.size()) + 1.0)) {
      throw UnsupportedShape(
          "hyperedge_to_span: no target vector reproduces the negative "
          "witnesses");
    }
  }
  if (!kvecs.empty()) {
    out.program.kernel_basis.resize(d, static_cast<int>(kvecs.size()));
    for (size_t i = 0; i < kvecs.size(); ++i) {
      out.program.kernel_basis.col(static_cast<int>(i)) = kvecs[i].normalized();
    }
  } else {
    out.program.kernel_basis.resize(d, 0);
  }

  double worst = 0.0;
  for (int x = 0; x < n; ++x) {
    out.witnesses.push_back(positive[x] ? w.w_plus[x] : w.w_minus[x]);
    worst = std::max(worst, out.witnesses.back().squaredNorm());
  }
  out.complexity = std::sqrt(worst);
  out.program.validate(std::max(tol, 1e-8));
  return out;
}

HyperedgeWithWitnesses database_hyperedge(
    const std::vector<std::string>& domain,
    const std::vector<std::string>& input_label,
    const std::vector<std::string>& output_label,
    const std::vector<Involution>& oracles, const WitnessFamily& witnesses,
    double tol) {
  const int n = static_cast<int>(domain.size());
  if (input_label.size() != static_cast<size_t>(n) ||
      output_label.size() != static_cast<size_t>(n) ||
      oracles.size() != static_cast<size_t>(n)) {
    throw DimensionMismatch("database_hyperedge: per-input arrays disagree");
  }
  HyperedgeWithWitnesses out;
  out.problem.domain = domain;
  auto vid = [&](const std::string& label) {
    auto& vs = out.problem.vertex_set;
    for (size_t i = 0; i < vs.size(); ++i) {
      if (vs[i] == label) return static_cast<int>(i);
    }
    vs.push_back(label);
    return static_cast<int>(vs.size() - 1);
  };
  std::vector<std::pair<int, int>> ends(n);
  for (int x = 0; x < n; ++x) {
    ends[x] = {vid(input_label[x]), vid(output_label[x])};
  }
  const int nv = out.problem.n_vertices();
  for (int x = 0; x < n; ++x) {
    RVector delta = RVector::Zero(nv), pot = RVector::Zero(nv);
    delta[ends[x].first] += 1;
    delta[ends[x].second] -= 1;
    pot[ends[x].first] += 1;
    pot[ends[x].second] += 1;
    out.problem.delta.push_back(delta);
    out.problem.potential.push_back(pot);
    out.problem.oracle.push_back(oracles[x]);
  }
  out.witnesses = witnesses;
  out.problem.validate(tol);
  auto rep = check_feasibility(out.problem, out.witnesses, std::max(tol, 1e-9));
  if (!rep.feasible) {
    throw InfeasibleInput(
        "database_hyperedge: witnesses are infeasible (violation " +
        std::to_string(rep.max_violation) + ")");
  }
  return out;
}

HyperedgeWithWitnesses database_hyperedge_from_conversion(
    const std::vector<std::string>& domain,
    const std::vector<std::string>& input_label,
    const std::vector<std::string>& output_label,
    const std::vector<CMatrix>& unitary_oracle, const std::vector<CVector>& w,
    double tol) {
  for (const auto& in : input_label) {
    for (const auto& outl : output_label) {
      if (in == outl) {
        throw UnsupportedShape(
            "database_hyperedge_from_conversion: input and output labels "
            "must be disjoint");
      }
    }
  }
  const int n = static_cast<int>(domain.size());
  const int m = static_cast<int>(unitary_oracle[0].rows());
  WitnessFamily fam;
  std::vector<Involution> oracles;
  for (int x = 0; x < n; ++x) {
    const int k = static_cast<int>(w[x].size()) / m;
    const int h = static_cast<int>(w[x].size());
    CVector ow(h);
    for (int b = 0; b < k; ++b) {
      ow.segment(b * m, m) = unitary_oracle[x] * w[x].segment(b * m, m);
    }
    fam.w_plus.push_back(embed(w[x], ow));
    fam.w_minus.push_back(embed(w[x], CVector(-ow)));
    CMatrix big = CMatrix::Zero(2 * h, 2 * h);
    for (int b = 0; b < k; ++b) {
      big.block(b * m, h + b * m, m, m) = unitary_oracle[x].adjoint();
      big.block(h + b * m, b * m, m, m) = unitary_oracle[x];
    }
    oracles.emplace_back(std::move(big));
  }
  return database_hyperedge(domain, input_label, output_label, oracles, fam,
                            tol);
}

HyperedgeWithWitnesses known_fraction_rescale(
    const std::vector<std::string>& vertex_labels, const RVector& pi,
    double eps, const std::vector<std::vector<int>>& marked,
    const std::vector<Involution>& oracles, const WitnessFamily& witnesses,
    double tol) {
  const int nv = static_cast<int>(vertex_labels.size());
  const int n = static_cast<int>(marked.size());
  if (pi.size() != nv) {
    throw DimensionMismatch("known_fraction_rescale: pi size mismatch");
  }
  for (int x = 0; x < n; ++x) {
    double mass = 0.0;
    for (int v : marked[x]) mass += pi[v];
    if (std::abs(mass - eps) > 1e-10) {
      throw FractionMismatch(
          "known_fraction_rescale: marked fraction deviates from eps at input " +
          std::to_string(x));
    }
  }
  HyperedgeWithWitnesses out;
  out.problem.vertex_set.push_back("bot");
  for (const auto& l : vertex_labels) out.problem.vertex_set.push_back(l);
  for (int x = 0; x < n; ++x) {
    out.problem.domain.push_back("x" + std::to_string(x));
    RVector delta = RVector::Zero(nv + 1), pot = RVector::Zero(nv + 1);
    delta[0] = 1.0;
    pot[0] = 1.0;
    for (int v : marked[x]) {
      delta[v + 1] = -pi[v] / eps;
      pot[v + 1] = 1.0;
    }
    out.problem.delta.push_back(delta);
    out.problem.potential.push_back(pot);
    out.problem.oracle.push_back(oracles[x]);
  }
  out.witnesses = witnesses;
  out.problem.validate(tol);
  auto rep = check_feasibility(out.problem, out.witnesses, std::max(tol, 1e-9));
  if (!rep.feasible) {
    throw InfeasibleInput(
        "known_fraction_rescale: witnesses are infeasible (violation " +
        std::to_string(rep.max_violation) + ")");
  }
  return out;
}

LasVegasResult las_vegas_witnesses(
    const std::vector<std::vector<CVector>>& traces,
    const std::vector<CMatrix>& unitary_oracle,
    const std::vector<double>& alpha) {
  const int n = static_cast<int>(traces.size());
  size_t tmax = 0;
  for (const auto& tr : traces) tmax = std::max(tmax, tr.size());
  if (alpha.size() < tmax) {
    throw ScheduleMismatch("las_vegas_witnesses: schedule shorter than trace");
  }
  for (double a : alpha) {
    if (a <= 0) throw ScheduleMismatch("las_vegas_witnesses: alpha_t must be > 0");
  }
  const int m = n > 0 ? static_cast<int>(unitary_oracle[0].rows()) : 0;
  const int steps = static_cast<int>(tmax);
  LasVegasResult out;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int x = 0; x < n; ++x) {
    CVector wp = CVector::Zero(2 * m * steps), wm = CVector::Zero(2 * m * steps);
    double sp = 0.0, sm = 0.0;
    CMatrix big = CMatrix::Zero(2 * m * steps, 2 * m * steps);
    for (int t = 0; t < steps; ++t) {
      big.block(2 * m * t, 2 * m * t + m, m, m) = unitary_oracle[x].adjoint();
      big.block(2 * m * t + m, 2 * m * t, m, m) = unitary_oracle[x];
      if (t >= static_cast<int>(traces[x].size())) continue;
      const CVector& phi = traces[x][t];
      CVector ophi = unitary_oracle[x] * phi;
      double ap = std::sqrt(alpha[t]);
      double am = 1.0 / ap;
      wp.segment(2 * m * t, m) = ap * inv_sqrt2 * phi;
      wp.segment(2 * m * t + m, m) = ap * inv_sqrt2 * ophi;
      wm.segment(2 * m * t, m) = am * inv_sqrt2 * phi;
      wm.segment(2 * m * t + m, m) = -am * inv_sqrt2 * ophi;
      sp += alpha[t] * phi.squaredNorm();
      sm += phi.squaredNorm() / alpha[t];
    }
    out.witnesses.w_plus.push_back(wp);
    out.witnesses.w_minus.push_back(wm);
    out.plus_sizes.push_back(sp);
    out.minus_sizes.push_back(sm);
    out.oracles.emplace_back(std::move(big));
  }
  if (!out.oracles.empty()) out.oracle_template = out.oracles[0];
  return out;
}

std::vector<std::pair<double, double>> las_vegas_sizes(
    const std::vector<std::vector<double>>& stop_dist,
    const std::vector<double>& alpha) {
  std::vector<std::pair<double, double>> out;
  for (const auto& dist : stop_dist) {
    if (alpha.size() + 1 < dist.size()) {
      throw ScheduleMismatch("las_vegas_sizes: schedule shorter than support");
    }
    double total = 0.0;
    for (double p : dist) total += p;
    if (std::abs(total - 1.0) > 1e-9) {
      throw NotNormalized("las_vegas_sizes: stopping distribution must sum to 1");
    }
    double wp = 0.0, wm = 0.0, accp = 0.0, accm = 0.0;
    for (size_t k = 0; k < dist.size(); ++k) {
      // acc = sum_{t<k} alpha_t^{pm 1}
      wp += dist[k] * accp;
      wm += dist[k] * accm;
      if (k < alpha.size()) {
        accp += alpha[k];
        accm += 1.0 / alpha[k];
      }
    }
    out.emplace_back(wp, wm);
  }
  return out;
}

GramWitnesses prescribed_gram_witnesses(Rng& rng, const RMatrix& targets) {
  const int n = static_cast<int>(targets.rows());
  if (targets.cols() != n || (targets - targets.transpose()).norm() > 1e-12 ||
      targets.diagonal().cwiseAbs().maxCoeff() > 1e-12) {
    throw DimensionMismatch(
        "prescribed_gram_witnesses: targets must be symmetric and hollow");
  }
  const int m = 2 * n;  // basis block + padding block
  double tmax = std::max(1e-12, targets.cwiseAbs().maxCoeff());
  double d = std::max(1.0, std::sqrt(tmax));
  GramWitnesses out;
  for (int x = 0; x < n; ++x) {
    CMatrix o = CMatrix::Identity(m, m);
    o(x, x) = -1.0;  // Householder flip on the x-th basis vector
    out.oracles.push_back(std::move(o));
    CVector w = CVector::Zero(m);
    w[x] = d;
    double base = d * d;
    for (int y = 0; y < n; ++y) {
      if (y == x) continue;
      double c = targets(x, y) / (4.0 * d);
      w[y] = c;
      base += c * c;
    }
    w[n + x] = std::sqrt(base * rng.uniform(0.05, 0.9));  // pad coordinate
    out.witnesses.push_back(std::move(w));
  }
  return out;
}

ConversionFixture random_conversion_fixture(Rng& rng, int n_inputs, int dim_m,
                                            int dim_w) {
  const int n = n_inputs;
  // Witnesses first; the state Grams S = I + G/2 and T = I - G/2 have unit
  // diagonals automatically (G_xx = 0) and become PSD once the witnesses are
  // scaled down enough.
  std::vector<CMatrix> oracles;
  std::vector<CVector> w;
  for (int x = 0; x < n; ++x) {
    oracles.push_back(random_unitary(rng, dim_m));
    w.push_back(random_cvector(rng, dim_m * dim_w));
  }
  auto gram_of = [&](double scale) {
    CMatrix g(n, n);
    std::vector<CVector> ow(n);
    for (int x = 0; x < n; ++x) {
      ow[x] = w[x];
      for (int b = 0; b < dim_w; ++b) {
        ow[x].segment(b * dim_m, dim_m) = oracles[x] * w[x].segment(b * dim_m, dim_m);
      }
    }
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        g(x, y) = scale * scale * (w[x].dot(w[y]) - ow[x].dot(ow[y]));
      }
    }
    return g;
  };
  // Target Gram magnitudes in [0.6, 1.8): large enough that corrupting a
  // witness is detectable, small enough that I +- G/2 stays positive.
  double scale = 0.5;
  CMatrix gram;
  for (int attempt = 0; attempt < 200; ++attempt) {
    gram = gram_of(scale);
    double top = hermitian_eig(gram, 1e-6).values.cwiseAbs().maxCoeff();
    if (top >= 1.8) {
      scale *= 0.7;
    } else if (top < 0.6 && n > 1) {
      scale *= 1.25;
    } else {
      break;
    }
  }
  auto factor_cols = [&](const CMatrix& g) {
    auto eig = hermitian_eig(CMatrix((g + g.adjoint()) / 2.0), 1e-6);
    RVector lam = eig.values.cwiseMax(0.0);
    CMatrix a = lam.cwiseSqrt().asDiagonal() * eig.vectors.adjoint();
    std::vector<CVector> cols;
    for (int x = 0; x < g.cols(); ++x) cols.push_back(a.col(x));
    return cols;
  };
  ConversionFixture out;
  auto sig = factor_cols(CMatrix(CMatrix::Identity(n, n) + gram / 2.0));
  auto tau = factor_cols(CMatrix(CMatrix::Identity(n, n) - gram / 2.0));
  for (int x = 0; x < n; ++x) {
    out.problem.domain.push_back("x" + std::to_string(x));
    out.problem.sigma.push_back(sig[x]);
    out.problem.tau.push_back(tau[x]);
    out.problem.oracle.push_back(oracles[x]);
    out.witnesses.push_back(scale * w[x]);
  }
  return out;
}

double normalize_to_eigenform(const StateReflectionProblem& problem,
                              WitnessFamily& witnesses) {
  double discarded = 0.0;
  for (int x = 0; x < problem.size(); ++x) {
    CVector owp = problem.oracle[x].apply(witnesses.w_plus[x]);
    CVector owm = problem.oracle[x].apply(witnesses.w_minus[x]);
    CVector keep_p = (witnesses.w_plus[x] + owp) / 2.0;
    CVector keep_m = (witnesses.w_minus[x] - owm) / 2.0;
    discarded = std::max(discarded, (witnesses.w_plus[x] - keep_p).norm());
    discarded = std::max(discarded, (witnesses.w_minus[x] - keep_m).norm());
    witnesses.w_plus[x] = keep_p;
    witnesses.w_minus[x] = keep_m;
  }
  return discarded;
}

}  // namespace ggc
