#include "ggc/qwalk.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ggc {

namespace {

std::string vd_label(int v, int d) {
  return "v" + std::to_string(v) + "_d" + std::to_string(d);
}

void require_distribution(const RVector& p, const std::string& name) {
  if (p.minCoeff() < -1e-12 || std::abs(p.sum() - 1.0) > 1e-9) {
    throw NotNormalized("qwalk: " + name + " is not a probability distribution");
  }
}

double half_sum_check(const WeightedGraph& g) {
  double s = 0.0;
  for (const auto& e : g.edges) s += 1.0 / e.r;
  return s;
}

}  // namespace

bool QWalkInstance::is_marked(int v, int x) const {
  return std::find(marked[x].begin(), marked[x].end(), v) != marked[x].end();
}

void QWalkInstance::validate() const {
  const int nv = n_vertices();
  const int ni = n_inputs();
  if (static_cast<int>(marked.size()) != ni) {
    throw DimensionMismatch("qwalk: marked sets per input required");
  }
  if (static_cast<int>(database.size()) != nv) {
    throw DimensionMismatch("qwalk: database table must cover every vertex");
  }
  for (const auto& row : database) {
    if (static_cast<int>(row.size()) != ni) {
      throw DimensionMismatch("qwalk: database row size mismatch");
    }
    for (int d : row) {
      if (d < 0 || d >= static_cast<int>(alphabet.size())) {
        throw ParseError("qwalk: database entry outside the alphabet");
      }
    }
  }
  if (std::abs(half_sum_check(graph) - 0.5) > 1e-9) {
    throw NotNormalized("qwalk: resistances must satisfy sum 1/r = 1/2");
  }
  if (setup_plus.rows() != nv || setup_plus.cols() != ni ||
      setup_minus.rows() != nv || update_plus.rows() != graph.m() ||
      update_minus.rows() != graph.m()) {
    throw DimensionMismatch("qwalk: size tables have wrong shape");
  }
  if (static_cast<int>(check_plus.size()) != nv ||
      static_cast<int>(check_minus.size()) != nv) {
    throw DimensionMismatch("qwalk: checking tables must cover every vertex");
  }
}

double normalize_instance(QWalkInstance* q) {
  double s = half_sum_check(q->graph);
  if (s <= 0) throw ParseError("qwalk: graph has no edges");
  double factor = 2.0 * s;  // r <- factor * r makes sum 1/r = 1/2
  if (std::abs(factor - 1.0) < 1e-12) return 1.0;
  for (auto& e : q->graph.edges) e.r *= factor;
  return factor;
}

void BoundReport::finalize() {
  double mp = 0.0, mm = 0.0;
  for (double v : plus) mp = std::max(mp, v);
  for (double v : minus) mm = std::max(mm, v);
  objective = std::sqrt(mp * mm);
}

namespace {

// Shared detection/finding builder. In finding mode every input is treated
// as positive and checking edges land on per-vertex outputs.
struct WalkComposer {
  const QWalkInstance& q;
  RVector sigma, tau;
  bool finding = false;

  std::vector<int> sigma_supp, tau_supp;

  explicit WalkComposer(const QWalkInstance& qq, const RVector& s,
                        const RVector& t, bool find)
      : q(qq), sigma(s), tau(t), finding(find) {
    q.validate();
    require_distribution(sigma, "sigma");
    require_distribution(tau, "tau");
    for (int v = 0; v < q.n_vertices(); ++v) {
      if (sigma[v] > 1e-12) sigma_supp.push_back(v);
      if (tau[v] > 1e-12) tau_supp.push_back(v);
    }
  }

  // Detection shares one sink; finding gives every checking routine (v, D)
  // its own sink so that erring wrong-database programs never straddle the
  // potential of a marked vertex.
  std::string sink_label(int v, int d) const {
    return finding ? "t" + std::to_string(v) + "_" + std::to_string(d) : "t";
  }

  // Positive-side flow data for one input.
  struct FlowPlan {
    RVector mu, nu;
    RVector update_flow;  // per graph edge, along tail -> head
    double update_energy = 0.0;
  };

  FlowPlan plan_flow(int x, const RVector& mu, const RVector& nu) const {
    for (int v = 0; v < q.n_vertices(); ++v) {
      if (mu[v] > 1e-12 && sigma[v] <= 1e-12) {
        throw SupportViolation("qwalk: mu not supported on supp(sigma)");
      }
      if (nu[v] > 1e-12 && (tau[v] <= 1e-12 || !q.is_marked(v, x))) {
        throw SupportViolation("qwalk: nu not supported on M_x cap supp(tau)");
      }
    }
    require_distribution(mu, "mu");
    require_distribution(nu, "nu");
    WeightedGraph mod = q.graph;
    for (int e = 0; e < mod.m(); ++e) {
      double scale = q.update_plus(e, x);
      if (scale <= 0) {
        throw UnsupportedShape("qwalk: update routine with zero positive size");
      }
      mod.edges[e].r *= scale;
    }
    FlowPlan plan;
    plan.mu = mu;
    plan.nu = nu;
    auto res = resistance(mod, NetFlow{mu - nu});
    plan.update_flow = res.flow.values;
    plan.update_energy = res.r_eff;
    return plan;
  }

  // nu minimizing the flow energy on the (U+)-scaled graph.
  RVector auto_nu(int x) const {
    std::vector<int> m;
    for (int v : q.marked[x]) {
      if (tau[v] > 1e-12) m.push_back(v);
    }
    if (m.empty()) {
      throw SupportViolation("qwalk: no marked vertex inside supp(tau)");
    }
    WeightedGraph mod = q.graph;
    for (int e = 0; e < mod.m(); ++e) mod.edges[e].r *= q.update_plus(e, x);
    auto cw = graph_to_chain(mod);
    return resistance_to_set(cw.chain, cw.pi, sigma, m, 1).nu;
  }

  double formula_plus(int x, const FlowPlan& plan) const {
    double s_term = 0.0, c_term = 0.0;
    for (int v : sigma_supp) {
      s_term += plan.mu[v] * plan.mu[v] / sigma[v] * q.setup_plus(v, x);
    }
    for (int v : tau_supp) {
      if (plan.nu[v] <= 1e-15) continue;
      int d = q.database[v][x];
      c_term += plan.nu[v] * plan.nu[v] / tau[v] * q.check_plus[v](d, x);
    }
    return s_term + plan.update_energy + c_term;
  }

  struct NegParts {
    double setup = 0.0, update = 0.0, check = 0.0;
    double total() const { return setup + update + check; }
  };

  NegParts formula_minus(int x, const std::set<int>& excluded_checks) const {
    NegParts out;
    for (int v : sigma_supp) out.setup += sigma[v] * q.setup_minus(v, x);
    for (int e = 0; e < q.graph.m(); ++e) {
      out.update += q.update_minus(e, x) / q.graph.edges[e].r;
    }
    for (int v : tau_supp) {
      if (excluded_checks.count(v)) continue;
      int d = q.database[v][x];
      out.check += tau[v] * q.check_minus[v](d, x);
    }
    return out;
  }

  // --- concrete tier ---

  HypergraphInstance skeleton() const {
    if (!q.concrete) {
      throw InvalidInstance("qwalk: concrete payloads are not present");
    }
    HypergraphInstance inst;
    inst.domain = q.domain;
    inst.vertices.push_back("s");
    for (int v = 0; v < q.n_vertices(); ++v) {
      for (int d = 0; d < static_cast<int>(q.alphabet.size()); ++d) {
        inst.vertices.push_back(vd_label(v, d));
      }
    }
    inst.boundary.push_back("s");
    if (finding) {
      for (int v : tau_supp) {
        for (int d = 0; d < static_cast<int>(q.alphabet.size()); ++d) {
          inst.vertices.push_back(sink_label(v, d));
          inst.boundary.push_back(sink_label(v, d));
        }
      }
    } else {
      inst.vertices.push_back("t");
      inst.boundary.push_back("t");
    }
    for (int v : sigma_supp) {
      Hyperedge he;
      he.name = "setup" + std::to_string(v);
      he.problem = q.setup_payload[v].problem;
      he.witnesses = q.setup_payload[v].witnesses;
      he.vertices = he.problem.vertex_set;
      he.weight = 1.0 / sigma[v];
      inst.edges.push_back(std::move(he));
    }
    for (int e = 0; e < q.graph.m(); ++e) {
      Hyperedge he;
      he.name = "update" + std::to_string(e);
      he.problem = q.update_payload[e].problem;
      he.witnesses = q.update_payload[e].witnesses;
      he.vertices = he.problem.vertex_set;
      he.weight = q.graph.edges[e].r;
      inst.edges.push_back(std::move(he));
    }
    for (int v : tau_supp) {
      for (int d = 0; d < static_cast<int>(q.alphabet.size()); ++d) {
        Hyperedge he;
        he.name = "check" + std::to_string(v) + "_" + std::to_string(d);
        he.problem = q.check_payload[v][d].problem;
        he.witnesses = q.check_payload[v][d].witnesses;
        he.problem.vertex_set = {vd_label(v, d), sink_label(v, d)};
        he.vertices = he.problem.vertex_set;
        he.weight = 1.0 / tau[v];
        inst.edges.push_back(std::move(he));
      }
    }
    return inst;
  }

  Routing route(const HypergraphInstance& inst,
                const std::vector<std::optional<FlowPlan>>& plans) const {
    Routing routing;
    routing.flow_coeff.resize(q.n_inputs());
    routing.vertex_potential.resize(q.n_inputs());
    const int ns = static_cast<int>(q.alphabet.size());
    for (int x = 0; x < q.n_inputs(); ++x) {
      RVector coeff = RVector::Zero(inst.n_edges());
      RVector phi(inst.n_vertices());
      bool positive = plans[x].has_value();
      if (positive && !finding) {
        phi.setOnes();
      } else {
        phi.setZero();
        phi[inst.vertex_index("s")] = 1.0;
        for (int v = 0; v < q.n_vertices(); ++v) {
          phi[inst.vertex_index(vd_label(v, q.database[v][x]))] = 1.0;
        }
        if (finding) {
          for (int v : tau_supp) {
            if (q.is_marked(v, x)) {
              phi[inst.vertex_index(sink_label(v, q.database[v][x]))] = 1.0;
            }
          }
        }
      }
      if (positive) {
        const FlowPlan& plan = *plans[x];
        int idx = 0;
        for (int v : sigma_supp) coeff[idx++] = plan.mu[v];
        for (int e = 0; e < q.graph.m(); ++e) coeff[idx++] = plan.update_flow[e];
        for (int v : tau_supp) {
          for (int d = 0; d < ns; ++d) {
            coeff[idx++] = (d == q.database[v][x]) ? plan.nu[v] : 0.0;
          }
        }
      }
      routing.flow_coeff[x] = coeff;
      routing.vertex_potential[x] = phi;
    }
    return routing;
  }
};

}  // namespace

DetectionResult build_detection(const QWalkInstance& q, const RVector& sigma,
                                const RVector& tau,
                                const std::optional<std::vector<RVector>>& mu,
                                const std::optional<std::vector<RVector>>& nu,
                                double tol) {
  WalkComposer wc(q, sigma, tau, false);
  DetectionResult out;
  std::vector<std::optional<WalkComposer::FlowPlan>> plans(q.n_inputs());
  for (int x = 0; x < q.n_inputs(); ++x) {
    bool positive = !q.marked[x].empty();
    if (positive) {
      RVector mx = mu ? (*mu)[x] : sigma;
      RVector nx = nu ? (*nu)[x] : wc.auto_nu(x);
      plans[x] = wc.plan_flow(x, mx, nx);
      out.report.plus.push_back(wc.formula_plus(x, *plans[x]));
      out.report.minus.push_back(0.0);
      out.report.setup_term.push_back(out.report.plus.back() -
                                      plans[x]->update_energy);
      out.report.update_term.push_back(plans[x]->update_energy);
      out.report.check_term.push_back(0.0);
      out.report.setup_neg.push_back(0.0);
      out.report.update_neg.push_back(0.0);
      out.report.check_neg.push_back(0.0);
    } else {
      auto neg = wc.formula_minus(x, {});
      out.report.plus.push_back(0.0);
      out.report.minus.push_back(neg.total());
      out.report.setup_term.push_back(0.0);
      out.report.update_term.push_back(0.0);
      out.report.check_term.push_back(0.0);
      out.report.setup_neg.push_back(neg.setup);
      out.report.update_neg.push_back(neg.update);
      out.report.check_neg.push_back(neg.check);
    }
  }
  out.report.finalize();
  if (q.concrete) {
    auto inst = wc.skeleton();
    auto routing = wc.route(inst, plans);
    out.composed = compose_routed(inst, routing, tol);
  }
  return out;
}

FindingResult build_finding(const QWalkInstance& q, const RVector& sigma,
                            const RVector& tau, FindingMode mode, double eps,
                            const std::optional<std::vector<RVector>>& mu,
                            double tol) {
  WalkComposer wc(q, sigma, tau, true);
  FindingResult out;
  std::vector<std::optional<WalkComposer::FlowPlan>> plans(q.n_inputs());
  for (int x = 0; x < q.n_inputs(); ++x) {
    if (q.marked[x].empty()) {
      throw SupportViolation("build_finding: input " + q.domain[x] +
                             " has no marked vertex");
    }
    RVector nx = RVector::Zero(q.n_vertices());
    std::set<int> excluded;
    if (mode == FindingMode::kUnique) {
      if (q.marked[x].size() != 1) {
        throw NotUnique("build_finding: marked vertex is not unique at input " +
                        q.domain[x]);
      }
      int m = q.marked[x][0];
      if (tau[m] <= 1e-12) {
        throw SupportViolation("build_finding: marked vertex outside supp(tau)");
      }
      nx[m] = 1.0;
      excluded.insert(m);
    } else {
      double mass = 0.0;
      for (int v : q.marked[x]) mass += tau[v];
      if (std::abs(mass - eps) > 1e-9) {
        throw FractionMismatch("build_finding: marked fraction " +
                               std::to_string(mass) + " != eps at input " +
                               q.domain[x]);
      }
      for (int v : q.marked[x]) {
        nx[v] = tau[v] / eps;
        excluded.insert(v);
      }
    }
    RVector mx = mu ? (*mu)[x] : sigma;
    plans[x] = wc.plan_flow(x, mx, nx);
    double plus = wc.formula_plus(x, *plans[x]);
    auto neg = wc.formula_minus(x, excluded);
    out.report.plus.push_back(plus);
    out.report.minus.push_back(neg.total());
    out.report.setup_term.push_back(plus - plans[x]->update_energy);
    out.report.update_term.push_back(plans[x]->update_energy);
    out.report.check_term.push_back(0.0);
    out.report.setup_neg.push_back(neg.setup);
    out.report.update_neg.push_back(neg.update);
    out.report.check_neg.push_back(neg.check);
  }
  out.report.finalize();
  if (q.concrete) {
    auto inst = wc.skeleton();
    auto routing = wc.route(inst, plans);
    out.composed = compose_routed(inst, routing, tol);
    if (mode == FindingMode::kFraction) {
      // Undo the known-fraction diagonal to exhibit the unit-norm states
      // |bot> +- |psi_x> on {s} u sinks. The sink distribution is
      // pi(t_{v,D}) = tau_v/|S| with marked fraction eps/|S|, so the diagonal
      // entry per sink is -sqrt(eps/tau_v).
      const auto& bp = out.composed->boundary_problem;
      const int nb = bp.n_vertices();
      const int ns = static_cast<int>(q.alphabet.size());
      CMatrix dinv = CMatrix::Identity(nb, nb);
      for (int b = 1; b < nb; ++b) {
        int v = wc.tau_supp[(b - 1) / ns];  // boundary order: s, then (v, d)
        dinv(b, b) = -std::sqrt(eps) / std::sqrt(tau[v]);
      }
      out.recovered = rescale(bp.as_reflection(), out.composed->witnesses, dinv,
                              1.0, 1.0, tol);
    }
  }
  return out;
}

UnifiedBound unified_bound(double s_plus, double s_minus, double u_plus,
                           double u_minus, double c_plus, double c_minus,
                           int t, double big_r) {
  if (t < 1) throw ParseError("unified_bound: t must be >= 1");
  UnifiedBound out;
  out.t_param = t;
  out.r_param = big_r;
  out.s_term = std::sqrt(std::max(0.0, s_plus * s_minus));
  out.u_term = std::sqrt(static_cast<double>(t) * big_r) *
               std::sqrt(std::max(0.0, u_plus * u_minus));
  out.c_term = std::sqrt(1.0 + big_r) * std::sqrt(std::max(0.0, c_plus * c_minus));
  out.value = out.s_term + out.u_term + out.c_term;
  return out;
}

UnifiedBound unified_bound_on_instance(const QWalkInstance& q,
                                       const RVector& sigma, int t) {
  q.validate();
  auto cw = graph_to_chain(q.graph);
  RVector tau = (sigma + cw.pi) / 2.0;

  // Aggregate sizes over all routines and inputs.
  double sp = 0, sm = 0, up = 0, um = 0, cp = 0, cm = 0;
  for (int v = 0; v < q.n_vertices(); ++v) {
    for (int x = 0; x < q.n_inputs(); ++x) {
      if (sigma[v] > 1e-12) {
        sp = std::max(sp, q.setup_plus(v, x));
        sm = std::max(sm, q.setup_minus(v, x));
      }
      int d = q.database[v][x];
      cp = std::max(cp, q.check_plus[v](d, x));
      cm = std::max(cm, q.check_minus[v](d, x));
    }
  }
  for (int e = 0; e < q.graph.m(); ++e) {
    for (int x = 0; x < q.n_inputs(); ++x) {
      up = std::max(up, q.update_plus(e, x));
      um = std::max(um, q.update_minus(e, x));
    }
  }

  // Class rescaling M- = 1, M+ = M^2 applied to the tables.
  if (sm <= 0) sm = 1.0;
  if (um <= 0) um = 1.0;
  if (cm <= 0) cm = 1.0;
  QWalkInstance qr = q;
  qr.concrete = false;
  for (int v = 0; v < q.n_vertices(); ++v) {
    for (int x = 0; x < q.n_inputs(); ++x) {
      qr.setup_plus(v, x) *= sm;
      qr.setup_minus(v, x) /= sm;
      for (int d = 0; d < static_cast<int>(q.alphabet.size()); ++d) {
        qr.check_plus[v](d, x) *= cm;
        qr.check_minus[v](d, x) /= cm;
      }
    }
  }
  for (int e = 0; e < q.graph.m(); ++e) {
    for (int x = 0; x < q.n_inputs(); ++x) {
      qr.update_plus(e, x) *= um;
      qr.update_minus(e, x) /= um;
    }
  }

  // t-free construction: nu_x minimizes R_eff(P; sigma - nu); R is the
  // t-step spectral resistance of those fixed flows.
  WalkComposer wc(qr, sigma, tau, false);
  double big_r = 0.0;
  std::vector<std::optional<WalkComposer::FlowPlan>> plans(q.n_inputs());
  double pos_size = 0.0, neg_size = 0.0;
  std::vector<RVector> nus(q.n_inputs());
  for (int x = 0; x < q.n_inputs(); ++x) {
    if (q.marked[x].empty()) {
      neg_size = std::max(neg_size, wc.formula_minus(x, {}).total());
      continue;
    }
    std::vector<int> m;
    for (int v : q.marked[x]) {
      if (tau[v] > 1e-12) m.push_back(v);
    }
    auto sr = resistance_to_set(cw.chain, cw.pi, sigma, m, 1);
    nus[x] = sr.nu;
    big_r = std::max(big_r, spectral_resistance(cw.chain, cw.pi,
                                                sigma - sr.nu, t));
    plans[x] = wc.plan_flow(x, sigma, sr.nu);
    pos_size = std::max(pos_size, wc.formula_plus(x, *plans[x]));
  }

  UnifiedBound out = unified_bound(sp, sm, up, um, cp, cm, t, big_r);
  out.chain_checked = true;
  out.positive_size = pos_size;
  out.negative_size = neg_size;
  double s2 = sp * sm, u2 = up * um, c2 = cp * cm;
  out.positive_bound = s2 + t * big_r * u2 + 2.0 * (1.0 + big_r) * c2;
  out.chain_ok = pos_size <= out.positive_bound + 1e-9 && neg_size <= 3.0 + 1e-9;
  return out;
}

VariableQueryReport variable_query_bounds(const QWalkInstance& q,
                                          const RVector& sigma,
                                          const RVector& tau, int variant) {
  q.validate();
  require_distribution(sigma, "sigma");
  require_distribution(tau, "tau");
  if (sigma.minCoeff() <= 0 || tau.minCoeff() <= 0) {
    throw SupportViolation("variable_query_bounds: sigma and tau need full support");
  }
  if (variant != 1 && variant != 2) {
    throw ParseError("variable_query_bounds: variant must be 1 or 2");
  }
  auto cw = graph_to_chain(q.graph);
  const int ni = q.n_inputs();
  std::vector<bool> positive(ni);
  for (int x = 0; x < ni; ++x) positive[x] = !q.marked[x].empty();

  // Per-routine class maxima (falling back to the overall max when a class
  // is empty).
  auto class_max = [&](auto get, bool over_positive) {
    double best = -1.0;
    for (int x = 0; x < ni; ++x) {
      if (positive[x] == over_positive) best = std::max(best, get(x));
    }
    if (best < 0) {
      for (int x = 0; x < ni; ++x) best = std::max(best, get(x));
    }
    return best;
  };

  RVector setup_cap(q.n_vertices()), update_cap(q.graph.m());
  for (int v = 0; v < q.n_vertices(); ++v) {
    setup_cap[v] = class_max([&](int x) { return q.setup_plus(v, x); }, true);
  }
  for (int e = 0; e < q.graph.m(); ++e) {
    update_cap[e] = class_max([&](int x) { return q.update_plus(e, x); }, true);
  }
  // C^+_{v,D}: class max over the routine consulted for input x.
  auto check_cap = [&](int v, int x) {
    int d = q.database[v][x];
    return class_max([&](int y) { return q.check_plus[v](d, y); }, true);
  };

  double ebar = 0.0;  // E_{v~sigma}[S_v^+]
  for (int v = 0; v < q.n_vertices(); ++v) ebar += sigma[v] * setup_cap[v];

  VariableQueryReport out;
  std::vector<RVector> nus(ni);
  std::vector<double> eps_x(ni, 1.0);
  double big_r = 0.0;
  for (int x = 0; x < ni; ++x) {
    if (!positive[x]) continue;
    if (variant == 1) {
      auto sr = resistance_to_set(cw.chain, cw.pi, sigma, q.marked[x], 1);
      nus[x] = sr.nu;
      double e = 0.0;
      for (int v = 0; v < q.n_vertices(); ++v) {
        e += nus[x][v] * nus[x][v] / tau[v];
      }
      eps_x[x] = 1.0 / e;
      big_r = std::max(big_r, sr.r_eff);
    } else {
      double mass = 0.0;
      for (int v : q.marked[x]) mass += tau[v];
      eps_x[x] = mass;
      RVector nu = RVector::Zero(q.n_vertices());
      for (int v : q.marked[x]) nu[v] = tau[v] / mass;
      nus[x] = nu;
      big_r = std::max(
          big_r, (sigma - nu).dot(pseudoinverse(laplacian(q.graph)) * (sigma - nu)));
    }
  }
  out.eps = 1.0;
  for (int x = 0; x < ni; ++x) {
    if (positive[x]) out.eps = std::min(out.eps, eps_x[x]);
  }
  out.big_r = big_r;

  for (int x = 0; x < ni; ++x) {
    if (positive[x]) {
      // three rescaled positive terms, each at most 1
      double t_setup = 0.0;
      for (int v = 0; v < q.n_vertices(); ++v) {
        t_setup += sigma[v] * q.setup_plus(v, x);
      }
      t_setup /= ebar;
      WeightedGraph mod = q.graph;
      for (int e = 0; e < mod.m(); ++e) {
        mod.edges[e].r *= q.update_plus(e, x) / (big_r * update_cap[e]);
      }
      double t_update = resistance(mod, NetFlow{sigma - nus[x]}).r_eff;
      double t_check = 0.0;
      for (int v = 0; v < q.n_vertices(); ++v) {
        if (nus[x][v] <= 1e-15) continue;
        int d = q.database[v][x];
        t_check += nus[x][v] * nus[x][v] / tau[v] * out.eps *
                   q.check_plus[v](d, x) / check_cap(v, x);
      }
      out.pos_setup.push_back(t_setup);
      out.pos_update.push_back(t_update);
      out.pos_check.push_back(t_check);
      out.report.plus.push_back(t_setup + t_update + t_check);
      out.report.minus.push_back(0.0);
      out.report.setup_neg.push_back(0.0);
      out.report.update_neg.push_back(0.0);
      out.report.check_neg.push_back(0.0);
    } else {
      // amortized negative expression of the variable-query bound
      double n_setup = 0.0, n_update = 0.0, n_check = 0.0;
      for (int v = 0; v < q.n_vertices(); ++v) {
        n_setup += sigma[v] * q.setup_minus(v, x);
      }
      n_setup *= ebar;
      for (int e = 0; e < q.graph.m(); ++e) {
        n_update += 2.0 / q.graph.edges[e].r * update_cap[e] *
                    q.update_minus(e, x);
      }
      n_update *= big_r;
      for (int v = 0; v < q.n_vertices(); ++v) {
        int d = q.database[v][x];
        n_check += tau[v] * check_cap(v, x) * q.check_minus[v](d, x);
      }
      n_check /= out.eps;
      out.pos_setup.push_back(0.0);
      out.pos_update.push_back(0.0);
      out.pos_check.push_back(0.0);
      out.report.plus.push_back(0.0);
      out.report.minus.push_back(n_setup + n_update + n_check);
      out.report.setup_neg.push_back(n_setup);
      out.report.update_neg.push_back(n_update);
      out.report.check_neg.push_back(n_check);
    }
    out.report.setup_term.push_back(0.0);
    out.report.update_term.push_back(0.0);
    out.report.check_term.push_back(0.0);
  }
  out.report.finalize();
  return out;
}

MnrsReport mnrs_bounds(const QWalkInstance& q) {
  q.validate();
  auto sg = stationary_and_gap(graph_to_chain(q.graph).chain);
  const RVector& pi = sg.pi;
  MnrsReport out;
  out.gap = sg.gap;

  const int ni = q.n_inputs();
  std::vector<bool> positive(ni);
  double eps = 1.0;
  for (int x = 0; x < ni; ++x) {
    positive[x] = !q.marked[x].empty();
    if (positive[x]) {
      double e = 0.0;
      for (int v : q.marked[x]) e += pi[v];
      eps = std::min(eps, e);
    }
  }
  out.eps = eps;

  auto class_max = [&](auto get, bool over_positive) {
    double best = -1.0;
    for (int x = 0; x < ni; ++x) {
      if (positive[x] == over_positive) best = std::max(best, get(x));
    }
    if (best < 0) {
      for (int x = 0; x < ni; ++x) best = std::max(best, get(x));
    }
    return best;
  };

  RMatrix lap_pinv = pseudoinverse(laplacian(q.graph));
  out.inequality_holds = true;
  for (int x = 0; x < ni; ++x) {
    if (positive[x]) {
      double eps_x = 0.0;
      for (int v : q.marked[x]) eps_x += pi[v];
      RVector xi = pi;
      for (int v : q.marked[x]) xi[v] -= pi[v] / eps_x;
      double lhs = xi.dot(lap_pinv * xi);
      double excess = 1.0 / eps_x - 1.0;  // 0 when everything is marked
      double rhs = excess <= 1e-15 ? 0.0
                   : out.gap > 0   ? excess / out.gap
                                   : std::numeric_limits<double>::infinity();
      out.resistance_lhs.push_back(lhs);
      out.resistance_rhs.push_back(rhs);
      if (lhs > rhs + 1e-9) out.inequality_holds = false;
      out.report.plus.push_back(1.0);  // O(1) by the variable-query rescaling
      out.report.minus.push_back(0.0);
      out.report.setup_neg.push_back(0.0);
      out.report.update_neg.push_back(0.0);
      out.report.check_neg.push_back(0.0);
    } else {
      double n_setup = 0.0, n_update = 0.0, n_check = 0.0;
      double es_plus = 0.0;
      for (int v = 0; v < q.n_vertices(); ++v) {
        es_plus += pi[v] * class_max([&](int y) { return q.setup_plus(v, y); }, true);
        n_setup += pi[v] * q.setup_minus(v, x);
      }
      n_setup *= es_plus;
      for (int e = 0; e < q.graph.m(); ++e) {
        double uplus = class_max([&](int y) { return q.update_plus(e, y); }, true);
        n_update += 2.0 / q.graph.edges[e].r * uplus * q.update_minus(e, x);
      }
      n_update /= std::max(out.gap, 1e-300);
      n_update /= eps;
      for (int v = 0; v < q.n_vertices(); ++v) {
        int d = q.database[v][x];
        double cplus = class_max([&](int y) { return q.check_plus[v](d, y); },
                                 true);
        n_check += pi[v] * cplus * q.check_minus[v](d, x);
      }
      n_check /= eps;
      out.report.plus.push_back(0.0);
      out.report.minus.push_back(n_setup + n_update + n_check);
      out.report.setup_neg.push_back(n_setup);
      out.report.update_neg.push_back(n_update);
      out.report.check_neg.push_back(n_check);
    }
    out.report.setup_term.push_back(0.0);
    out.report.update_term.push_back(0.0);
    out.report.check_term.push_back(0.0);
  }
  out.report.finalize();
  return out;
}

namespace {

void skew_witnesses(HyperedgeWithWitnesses* hw, double lambda) {
  for (auto& w : hw->witnesses.w_plus) w *= lambda;
  for (auto& w : hw->witnesses.w_minus) w /= lambda;
}

}  // namespace

QWalkInstance random_concrete_instance(
    Rng& rng, int n_vertices, int n_states, int n_inputs,
    bool allow_empty_marked, const std::vector<std::vector<int>>* forced_marked) {
  if (n_vertices < 2 || n_states < 1 || n_inputs < 1) {
    throw ParseError("random_concrete_instance: degenerate shape");
  }
  QWalkInstance q;
  for (int v = 0; v < n_vertices; ++v) {
    q.graph.add_vertex("w" + std::to_string(v));
  }
  for (int v = 1; v < n_vertices; ++v) {
    int u = static_cast<int>(rng.below(v));
    q.graph.edges.push_back({u, v, rng.uniform(0.5, 2.0)});
  }
  int extra = n_vertices > 2 ? static_cast<int>(rng.below(n_vertices)) : 0;
  for (int i = 0; i < extra; ++i) {
    int u = static_cast<int>(rng.below(n_vertices));
    int v = static_cast<int>(rng.below(n_vertices));
    if (u != v) q.graph.edges.push_back({u, v, rng.uniform(0.5, 2.0)});
  }
  normalize_instance(&q);

  for (int d = 0; d < n_states; ++d) q.alphabet.push_back("D" + std::to_string(d));
  for (int x = 0; x < n_inputs; ++x) q.domain.push_back("x" + std::to_string(x));
  q.database.assign(n_vertices, std::vector<int>(n_inputs, 0));
  for (int v = 0; v < n_vertices; ++v) {
    for (int x = 0; x < n_inputs; ++x) {
      q.database[v][x] = static_cast<int>(rng.below(n_states));
    }
  }
  q.marked.assign(n_inputs, {});
  if (forced_marked) {
    if (static_cast<int>(forced_marked->size()) != n_inputs) {
      throw DimensionMismatch("random_concrete_instance: forced marked sets");
    }
    q.marked = *forced_marked;
  } else {
    for (int x = 0; x < n_inputs; ++x) {
      bool empty = allow_empty_marked && (x % 2 == 1);
      if (!empty) {
        int count = 1 + static_cast<int>(rng.below(std::max(1, n_vertices / 2)));
        std::set<int> chosen;
        while (static_cast<int>(chosen.size()) < count) {
          chosen.insert(static_cast<int>(rng.below(n_vertices)));
        }
        q.marked[x].assign(chosen.begin(), chosen.end());
      }
    }
  }

  // Setup payloads: database updates s -> (v, D_{v,x}).
  q.setup_plus.resize(n_vertices, n_inputs);
  q.setup_minus.resize(n_vertices, n_inputs);
  for (int v = 0; v < n_vertices; ++v) {
    RMatrix t(n_inputs, n_inputs);
    for (int x = 0; x < n_inputs; ++x) {
      for (int y = 0; y < n_inputs; ++y) {
        t(x, y) = (x == y) ? 0.0
                           : 1.0 - (q.database[v][x] == q.database[v][y] ? 1.0 : 0.0);
      }
    }
    auto recipe = prescribed_gram_witnesses(rng, t);
    std::vector<std::string> in_labels(n_inputs, "s"), out_labels;
    for (int x = 0; x < n_inputs; ++x) {
      out_labels.push_back(vd_label(v, q.database[v][x]));
    }
    auto hw = database_hyperedge_from_conversion(q.domain, in_labels, out_labels,
                                                 recipe.oracles, recipe.witnesses);
    skew_witnesses(&hw, rng.uniform(0.75, 1.35));
    for (int x = 0; x < n_inputs; ++x) {
      q.setup_plus(v, x) = hw.witnesses.plus_size(x);
      q.setup_minus(v, x) = hw.witnesses.minus_size(x);
    }
    q.setup_payload.push_back(std::move(hw));
  }

  // Update payloads: (v, D_{v,x}) -> (w, D_{w,x}).
  q.update_plus.resize(q.graph.m(), n_inputs);
  q.update_minus.resize(q.graph.m(), n_inputs);
  for (int e = 0; e < q.graph.m(); ++e) {
    int a = q.graph.edges[e].tail, b = q.graph.edges[e].head;
    RMatrix t(n_inputs, n_inputs);
    for (int x = 0; x < n_inputs; ++x) {
      for (int y = 0; y < n_inputs; ++y) {
        double in_eq = q.database[a][x] == q.database[a][y] ? 1.0 : 0.0;
        double out_eq = q.database[b][x] == q.database[b][y] ? 1.0 : 0.0;
        t(x, y) = (x == y) ? 0.0 : in_eq - out_eq;
      }
    }
    auto recipe = prescribed_gram_witnesses(rng, t);
    std::vector<std::string> in_labels, out_labels;
    for (int x = 0; x < n_inputs; ++x) {
      in_labels.push_back(vd_label(a, q.database[a][x]));
      out_labels.push_back(vd_label(b, q.database[b][x]));
    }
    auto hw = database_hyperedge_from_conversion(q.domain, in_labels, out_labels,
                                                 recipe.oracles, recipe.witnesses);
    skew_witnesses(&hw, rng.uniform(0.75, 1.35));
    for (int x = 0; x < n_inputs; ++x) {
      q.update_plus(e, x) = hw.witnesses.plus_size(x);
      q.update_minus(e, x) = hw.witnesses.minus_size(x);
    }
    q.update_payload.push_back(std::move(hw));
  }

  // Checking payloads: single-query span programs; C_{v,D} answers correctly
  // when D = D_{v,x} and deliberately claims "unmarked" otherwise.
  q.check_plus.assign(n_vertices, RMatrix::Ones(n_states, n_inputs));
  q.check_minus.assign(n_vertices, RMatrix::Ones(n_states, n_inputs));
  q.check_payload.resize(n_vertices);
  for (int v = 0; v < n_vertices; ++v) {
    for (int d = 0; d < n_states; ++d) {
      std::vector<bool> f;
      for (int x = 0; x < n_inputs; ++x) {
        f.push_back(q.database[v][x] == d && q.is_marked(v, x));
      }
      auto hw = single_query_edge(q.domain, f);
      for (int x = 0; x < n_inputs; ++x) {
        q.check_plus[v](d, x) = hw.witnesses.plus_size(x);
        q.check_minus[v](d, x) = hw.witnesses.minus_size(x);
      }
      q.check_payload[v].push_back(std::move(hw));
    }
  }
  q.concrete = true;
  return q;
}

}  // namespace ggc
