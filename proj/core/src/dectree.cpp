#include "ggc/dectree.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>

namespace ggc {

void DecisionTree::validate() const {
  if (nodes.empty() || root < 0 || root >= size()) {
    throw InvalidInstance("decision tree: bad root");
  }
  std::vector<int> state(size(), 0);
  std::function<void(int)> visit = [&](int id) {
    if (id < 0 || id >= size()) throw InvalidInstance("decision tree: bad child id");
    if (state[id] == 1) throw InvalidInstance("decision tree: cycle detected");
    if (state[id] == 2) throw InvalidInstance("decision tree: node reused");
    state[id] = 1;
    const Node& n = nodes[id];
    if (!is_leaf(id)) {
      if (n.children.empty()) {
        throw InvalidInstance("decision tree: internal node without children");
      }
      int black = 0;
      for (const auto& [sym, cid] : n.children) {
        auto it = n.colors.find(sym);
        if (it != n.colors.end()) {
          if (it->second == "black") ++black;
          else if (it->second != "red") {
            throw InvalidColoring("decision tree: color must be red or black");
          }
        }
        visit(cid);
      }
      if (black > 1) {
        throw InvalidColoring("decision tree: more than one black edge at a node");
      }
    }
    state[id] = 2;
  };
  visit(root);
}

int DecisionTree::depth() const {
  std::function<int(int)> go = [&](int id) -> int {
    if (is_leaf(id)) return 0;
    int best = 0;
    for (const auto& [sym, cid] : nodes[id].children) {
      best = std::max(best, 1 + go(cid));
    }
    return best;
  };
  return go(root);
}

int DecisionTree::max_red() const {
  std::function<int(int)> go = [&](int id) -> int {
    if (is_leaf(id)) return 0;
    int best = 0;
    for (const auto& [sym, cid] : nodes[id].children) {
      auto it = nodes[id].colors.find(sym);
      bool red = it == nodes[id].colors.end() || it->second == "red";
      best = std::max(best, (red ? 1 : 0) + go(cid));
    }
    return best;
  };
  return go(root);
}

std::vector<int> DecisionTree::path(const std::vector<std::string>& x) const {
  std::vector<int> out;
  int id = root;
  out.push_back(id);
  while (!is_leaf(id)) {
    const Node& n = nodes[id];
    if (n.query < 0 || n.query >= static_cast<int>(x.size())) {
      throw ParseError("decision tree: query position out of range");
    }
    auto it = n.children.find(x[n.query]);
    if (it == n.children.end()) {
      throw ParseError("decision tree: no child for symbol '" + x[n.query] + "'");
    }
    id = it->second;
    out.push_back(id);
  }
  return out;
}

SchemeReport validate_scheme(const DecisionTree& t, const WeightingScheme& s,
                             double tol) {
  t.validate();
  SchemeReport rep;
  for (int id = 0; id < t.size(); ++id) {
    double w = s.weight.count(id) ? s.weight.at(id) : 0.0;
    if (t.is_leaf(id)) {
      rep.worst_leaf = std::max(rep.worst_leaf, std::abs(w));
      continue;
    }
    if (!s.certs.count(id)) {
      rep.worst_offdiag = std::max(rep.worst_offdiag, 1.0);
      continue;
    }
    const auto& cert = s.certs.at(id);
    const int k = static_cast<int>(t.nodes[id].children.size());
    if (cert.x.rows() != k || cert.y.rows() != k) {
      throw DimensionMismatch("validate_scheme: certificate size mismatch");
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> ex(cert.x), ey(cert.y);
    rep.worst_psd = std::max(rep.worst_psd, std::max(0.0, -ex.eigenvalues().minCoeff()));
    rep.worst_psd = std::max(rep.worst_psd, std::max(0.0, -ey.eigenvalues().minCoeff()));
    int ci = 0;
    for (const auto& [sym, cid] : t.nodes[id].children) {
      double wc = s.weight.count(cid) ? s.weight.at(cid) : 0.0;
      double drop = cert.x(ci, ci) + cert.y(ci, ci);
      rep.worst_drop = std::max(rep.worst_drop, drop - (w - wc));
      for (int cj = 0; cj < k; ++cj) {
        if (cj == ci) continue;
        rep.worst_offdiag = std::max(
            rep.worst_offdiag, std::abs(cert.x(ci, cj) - cert.y(ci, cj) - 1.0));
      }
      ++ci;
    }
  }
  rep.worst_drop = std::max(rep.worst_drop, 0.0);
  rep.valid = rep.worst_leaf <= tol && rep.worst_psd <= tol &&
              rep.worst_offdiag <= tol && rep.worst_drop <= tol;
  return rep;
}

BinaryNodeSolution binary_analytic(double w1, double w2) {
  if (w1 < 0 || w2 < 0) throw ParseError("binary_analytic: weights must be >= 0");
  BinaryNodeSolution out;
  double d = w1 - w2;
  out.w = (w1 + w2 + std::sqrt(d * d + 4.0)) / 2.0;
  double g1 = out.w - w1;
  double g2 = out.w - w2;  // g1 g2 = 1
  out.x.resize(2, 2);
  out.x << g1, 1.0, 1.0, g2;
  out.y = RMatrix::Zero(2, 2);
  return out;
}

namespace {

struct BarrierWork {
  int k = 0;
  RVector w;
  // theta = [t, dx(k), dy(k), z(k(k-1)/2)]
  int nz = 0;
  int dim = 0;

  int iz(int i, int j) const {  // i < j
    // row-major upper triangle
    return 1 + 2 * k + (i * (2 * k - i - 1)) / 2 + (j - i - 1);
  }

  RMatrix make_x(const RVector& th) const {
    RMatrix x = RMatrix::Zero(k, k);
    for (int c = 0; c < k; ++c) x(c, c) = th[1 + c];
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) x(i, j) = x(j, i) = th[iz(i, j)];
    }
    return x;
  }
  RMatrix make_y(const RVector& th) const {
    RMatrix y = RMatrix::Zero(k, k);
    for (int c = 0; c < k; ++c) y(c, c) = th[1 + k + c];
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) y(i, j) = y(j, i) = th[iz(i, j)] - 1.0;
    }
    return y;
  }
  RVector slacks(const RVector& th) const {
    RVector s(k);
    for (int c = 0; c < k; ++c) s[c] = th[0] - w[c] - th[1 + c] - th[1 + k + c];
    return s;
  }
  bool feasible(const RVector& th) const {
    if (slacks(th).minCoeff() <= 0) return false;
    Eigen::LLT<RMatrix> lx(make_x(th));
    if (lx.info() != Eigen::Success) return false;
    Eigen::LLT<RMatrix> ly(make_y(th));
    return ly.info() == Eigen::Success;
  }
  double value(const RVector& th, double mu) const {
    Eigen::LLT<RMatrix> lx(make_x(th)), ly(make_y(th));
    double ld = 0.0;
    for (int c = 0; c < k; ++c) {
      ld += 2.0 * std::log(lx.matrixL()(c, c)) + 2.0 * std::log(ly.matrixL()(c, c));
    }
    RVector s = slacks(th);
    double ls = 0.0;
    for (int c = 0; c < k; ++c) ls += std::log(s[c]);
    return th[0] - mu * (ld + ls);
  }
  void grad_hess(const RVector& th, double mu, RVector* g, RMatrix* h) const {
    RMatrix p = make_x(th).inverse();
    RMatrix q = make_y(th).inverse();
    RVector s = slacks(th);
    g->setZero(dim);
    h->setZero(dim, dim);
    (*g)[0] = 1.0;
    for (int c = 0; c < k; ++c) {
      double u = 1.0 / s[c];
      (*g)[0] -= mu * u;
      (*g)[1 + c] = mu * (u - p(c, c));
      (*g)[1 + k + c] = mu * (u - q(c, c));
      // slack Hessian: mu u^2 (ds/da)(ds/db), ds/dt = 1, ds/ddx = ds/ddy = -1
      double uu = mu * u * u;
      int a = 1 + c, b = 1 + k + c;
      (*h)(0, 0) += uu;
      (*h)(0, a) -= uu;
      (*h)(a, 0) -= uu;
      (*h)(0, b) -= uu;
      (*h)(b, 0) -= uu;
      (*h)(a, a) += uu;
      (*h)(b, b) += uu;
      (*h)(a, b) += uu;
      (*h)(b, a) += uu;
    }
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        (*g)[iz(i, j)] = -2.0 * mu * (p(i, j) + q(i, j));
      }
    }
    // log-det Hessian blocks, tr(P E_a P E_b)
    for (int c = 0; c < k; ++c) {
      for (int d = 0; d < k; ++d) {
        (*h)(1 + c, 1 + d) += mu * p(c, d) * p(c, d);
        (*h)(1 + k + c, 1 + k + d) += mu * q(c, d) * q(c, d);
      }
    }
    for (int c = 0; c < k; ++c) {
      for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
          (*h)(1 + c, iz(i, j)) += mu * 2.0 * p(c, i) * p(c, j);
          (*h)(iz(i, j), 1 + c) += mu * 2.0 * p(c, i) * p(c, j);
          (*h)(1 + k + c, iz(i, j)) += mu * 2.0 * q(c, i) * q(c, j);
          (*h)(iz(i, j), 1 + k + c) += mu * 2.0 * q(c, i) * q(c, j);
        }
      }
    }
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        for (int a = 0; a < k; ++a) {
          for (int b = a + 1; b < k; ++b) {
            double vx = 2.0 * (p(i, a) * p(j, b) + p(i, b) * p(j, a));
            double vy = 2.0 * (q(i, a) * q(j, b) + q(i, b) * q(j, a));
            (*h)(iz(i, j), iz(a, b)) += mu * (vx + vy);
          }
        }
      }
    }
  }
};

}  // namespace

NodeSdpSolution solve_node_sdp(const RVector& child_weights, double tol) {
  const int k = static_cast<int>(child_weights.size());
  if (k < 1) throw ParseError("solve_node_sdp: at least one child required");
  for (int c = 0; c < k; ++c) {
    if (child_weights[c] < 0) {
      throw ParseError("solve_node_sdp: child weights must be >= 0");
    }
  }
  NodeSdpSolution out;
  if (k == 1) {
    out.w = child_weights[0];
    out.x = RMatrix::Zero(1, 1);
    out.y = RMatrix::Zero(1, 1);
    out.gamma = RMatrix::Zero(1, 1);
    out.dual_value = child_weights[0];
    out.gap = 0.0;
    return out;
  }

  BarrierWork work;
  work.k = k;
  work.w = child_weights;
  work.nz = k * (k - 1) / 2;
  work.dim = 1 + 2 * k + work.nz;

  RVector th(work.dim);
  double diag0 = static_cast<double>(k);
  th[0] = child_weights.maxCoeff() + 2.0 * diag0 + 1.0;
  for (int c = 0; c < k; ++c) {
    th[1 + c] = diag0;
    th[1 + k + c] = diag0;
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) th[work.iz(i, j)] = 0.5;
  }
  if (!work.feasible(th)) {
    throw NumericalFailure("solve_node_sdp: initial point infeasible");
  }

  // Dual certificate from the central-path multipliers at barrier weight mu:
  // with P = X^{-1} the slack matrix mu P has diagonal mu/s at a centered
  // point, Gamma = -2 (mu P)_offdiag keeps diag(p) +- Gamma/2 psd, and the
  // paper form divides out diag(p)^{1/2}.
  auto dual_candidate = [&](const RVector& theta, double mu, RMatrix* gamma_out) {
    RMatrix p_inv = work.make_x(theta).inverse();
    RVector s = work.slacks(theta);
    RVector p(k);
    for (int c = 0; c < k; ++c) p[c] = mu / s[c];
    double psum = p.sum();
    p /= psum;
    RMatrix gamma = RMatrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i != j) gamma(i, j) = -2.0 * mu * p_inv(i, j) / psum;
      }
    }
    RVector d_half = p.cwiseSqrt().cwiseInverse();
    RMatrix gp = 0.5 * d_half.asDiagonal() * gamma * d_half.asDiagonal();
    gp = (gp + gp.transpose()) / 2.0;
    Eigen::SelfAdjointEigenSolver<RMatrix> eg(gp);
    double gnorm = eg.eigenvalues().cwiseAbs().maxCoeff();
    if (gnorm > 1.0) gp /= gnorm * (1.0 + 1e-14);
    Eigen::SelfAdjointEigenSolver<RMatrix> ed(
        RMatrix(RMatrix(child_weights.asDiagonal()) + gp));
    *gamma_out = gp;
    return ed.eigenvalues().cwiseAbs().maxCoeff();
  };
  auto primal_value = [&](const RVector& theta) {
    RMatrix x = work.make_x(theta), y = work.make_y(theta);
    double v = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      v = std::max(v, child_weights[c] + x(c, c) + y(c, c));
    }
    return v;
  };

  const int max_total = 500;
  int total = 0;
  double mu = 1.0;
  const double mu_end = 1e-12;
  RVector g(work.dim);
  RMatrix h(work.dim, work.dim);
  double best_primal = primal_value(th);
  RVector best_theta = th;
  double best_dual = -std::numeric_limits<double>::infinity();
  RMatrix best_gamma = RMatrix::Zero(k, k);
  while (mu > mu_end && total < max_total) {
    for (int inner = 0; inner < 60 && total < max_total; ++inner, ++total) {
      work.grad_hess(th, mu, &g, &h);
      if (g.norm() <= std::max(1e-12, 1e-7 * mu)) break;
      RMatrix hreg = h;
      Eigen::LDLT<RMatrix> ldlt(hreg);
      RVector step = -ldlt.solve(g);
      double lambda = 1e-10;
      while ((ldlt.info() != Eigen::Success || step.dot(g) >= 0 ||
              !step.allFinite()) &&
             lambda < 1e6) {
        hreg = h + lambda * RMatrix::Identity(work.dim, work.dim);
        ldlt.compute(hreg);
        step = -ldlt.solve(g);
        lambda *= 10;
      }
      double base = work.value(th, mu);
      double slope = g.dot(step);
      double alpha = 1.0;
      while (alpha > 1e-14) {
        RVector cand = th + alpha * step;
        if (work.feasible(cand) &&
            work.value(cand, mu) <= base + 1e-4 * alpha * slope) {
          th = cand;
          break;
        }
        alpha /= 2.0;
      }
      if (alpha <= 1e-14) break;
    }
    // Bracket update at this barrier stage.
    double pv = primal_value(th);
    if (pv < best_primal) {
      best_primal = pv;
      best_theta = th;
    }
    RMatrix gamma_stage;
    double dv = dual_candidate(th, mu, &gamma_stage);
    if (dv > best_dual) {
      best_dual = dv;
      best_gamma = gamma_stage;
    }
    if (best_primal - best_dual <= 1e-8 * std::max(1.0, best_primal)) break;
    mu *= 0.2;
  }
  out.iterations = total;
  out.x = work.make_x(best_theta);
  out.y = work.make_y(best_theta);
  out.w = best_primal;
  out.gamma = best_gamma;
  out.dual_value = best_dual;
  out.gap = std::max(0.0, best_primal - best_dual);

  if (!(out.gap <= std::max(tol, 1e-6)) || !std::isfinite(out.gap)) {
    throw NoConvergence("solve_node_sdp: duality gap " + std::to_string(out.gap) +
                        " after " + std::to_string(out.iterations) + " iterations");
  }
  return out;
}

WeightingScheme bt20_scheme(const DecisionTree& t, int depth_bound,
                            int red_bound) {
  t.validate();
  int depth = depth_bound > 0 ? depth_bound : t.depth();
  int red = red_bound > 0 ? red_bound : std::max(1, t.max_red());
  if (red < 1 || depth < red) {
    throw InvalidColoring("bt20_scheme: need depth >= red count >= 1");
  }
  double alpha = std::sqrt(static_cast<double>(depth) / red);

  WeightingScheme scheme;
  std::function<double(int)> go = [&](int id) -> double {
    if (t.is_leaf(id)) {
      scheme.weight[id] = 0.0;
      return 0.0;
    }
    const auto& node = t.nodes[id];
    const int k = static_cast<int>(node.children.size());
    RVector v(k);
    std::vector<bool> is_black(k, false);
    int ci = 0;
    for (const auto& [sym, cid] : node.children) {
      auto it = node.colors.find(sym);
      is_black[ci] = it != node.colors.end() && it->second == "black";
      v[ci] = is_black[ci] ? 1.0 / std::sqrt(alpha) : std::sqrt(alpha);
      ++ci;
    }
    NodeCertificates cert;
    cert.x = v * v.transpose();
    cert.y = RMatrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (!is_black[i] && !is_black[j]) cert.y(i, j) = alpha - 1.0;
      }
    }
    double w = 0.0;
    ci = 0;
    for (const auto& [sym, cid] : node.children) {
      double wc = go(cid);
      w = std::max(w, wc + cert.x(ci, ci) + cert.y(ci, ci));
      ++ci;
    }
    scheme.certs[id] = std::move(cert);
    scheme.weight[id] = w;
    return w;
  };
  go(t.root);
  return scheme;
}

WdtResult wdt(const DecisionTree& t, double tol) {
  t.validate();
  WdtResult out;
  std::function<double(int)> go = [&](int id) -> double {
    if (t.is_leaf(id)) {
      out.scheme.weight[id] = 0.0;
      return 0.0;
    }
    const auto& node = t.nodes[id];
    RVector cw(node.children.size());
    int ci = 0;
    for (const auto& [sym, cid] : node.children) cw[ci++] = go(cid);
    auto sol = solve_node_sdp(cw, tol);
    out.scheme.certs[id] = {sol.x, sol.y};
    out.scheme.weight[id] = sol.w;
    return sol.w;
  };
  out.root_weight = go(t.root);
  return out;
}

namespace {

RVector real_kron(const RVector& a, const RVector& b) {
  RVector out(a.size() * b.size());
  for (int i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a[i] * b;
  }
  return out;
}

// PSD square root columns with a small negative-eigenvalue clip.
RMatrix psd_factor(const RMatrix& m, double clip) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es((m + m.transpose()) / 2.0);
  double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  RVector lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) {
    if (lam[i] < -clip * scale) {
      throw InvalidScheme("tree_to_composition: certificate is not PSD "
                          "(eigenvalue " + std::to_string(lam[i]) + ")");
    }
    lam[i] = std::max(0.0, lam[i]);
  }
  return lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

TreeCompositionResult tree_to_composition(
    const DecisionTree& t, const WeightingScheme& s,
    const std::vector<std::vector<std::string>>& inputs, double tol) {
  auto rep = validate_scheme(t, s, 1e-6);
  if (!rep.valid) {
    throw InvalidScheme("tree_to_composition: scheme fails validation");
  }
  TreeCompositionResult out;
  out.root_weight = s.weight.count(t.root) ? s.weight.at(t.root) : 0.0;

  HypergraphInstance& inst = out.instance;
  for (const auto& x : inputs) {
    std::string lbl;
    for (const auto& sym : x) lbl += sym + ".";
    inst.domain.push_back(lbl);
  }
  auto node_label = [](int id) { return "n" + std::to_string(id); };
  for (int id = 0; id < t.size(); ++id) inst.vertices.push_back(node_label(id));
  inst.boundary.push_back(node_label(t.root));
  for (int id = 0; id < t.size(); ++id) {
    if (t.is_leaf(id)) inst.boundary.push_back(node_label(id));
  }

  std::vector<std::vector<int>> paths;
  for (const auto& x : inputs) paths.push_back(t.path(x));
  if (inputs.empty()) {
    out.composed.feasibility.feasible = true;
    return out;
  }

  for (int id = 0; id < t.size(); ++id) {
    if (t.is_leaf(id)) continue;
    const auto& node = t.nodes[id];
    const int k = static_cast<int>(node.children.size());
    const auto& cert = s.certs.at(id);
    RMatrix uplus = psd_factor(cert.x, 1e-10);
    RMatrix uminus = psd_factor(cert.y, 1e-10);

    Hyperedge he;
    he.name = "node" + std::to_string(id);
    he.vertices.push_back(node_label(id));
    std::vector<int> child_ids;
    for (const auto& [sym, cid] : node.children) {
      he.vertices.push_back(node_label(cid));
      child_ids.push_back(cid);
    }
    he.problem.vertex_set = he.vertices;
    he.problem.domain = inst.domain;
    const int hdim = 2 * k * (1 + k);
    for (size_t xi = 0; xi < inputs.size(); ++xi) {
      RVector delta = RVector::Zero(k + 1), pot = RVector::Zero(k + 1);
      CVector wp = CVector::Zero(hdim), wm = CVector::Zero(hdim);
      auto pos = std::find(paths[xi].begin(), paths[xi].end(), id);
      if (pos != paths[xi].end()) {
        int next = *(pos + 1);
        int ai = static_cast<int>(std::find(child_ids.begin(), child_ids.end(),
                                            next) -
                                  child_ids.begin());
        delta[0] = 1;
        delta[ai + 1] = -1;
        pot[0] = 1;
        pot[ai + 1] = 1;
        RVector up = uplus.col(ai), um = uminus.col(ai);
        RVector left_p(2 * k), left_m(2 * k);
        left_p << up, um;
        left_m << up, -um;
        RVector mark_p = RVector::Zero(1 + k), mark_m = RVector::Zero(1 + k);
        mark_p[0] = 1;
        mark_p[ai + 1] = 1;
        mark_m[0] = 1;
        mark_m[ai + 1] = -1;
        wp = real_kron(left_p, mark_p).cast<Complex>();
        wm = real_kron(left_m, mark_m).cast<Complex>();
      }
      he.problem.delta.push_back(delta);
      he.problem.potential.push_back(pot);
      if (wm.norm() > 1e-12) {
        CVector unit = wm.normalized();
        CMatrix o = CMatrix::Identity(hdim, hdim) - 2.0 * unit * unit.adjoint();
        he.problem.oracle.emplace_back(std::move(o));
      } else {
        he.problem.oracle.emplace_back(CMatrix(CMatrix::Identity(hdim, hdim)));
      }
      he.witnesses.w_plus.push_back(std::move(wp));
      he.witnesses.w_minus.push_back(std::move(wm));
    }
    inst.edges.push_back(std::move(he));
  }

  out.composed = compose(inst, tol);
  return out;
}

}  // namespace ggc
