#include "ggc/composition.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace ggc {

namespace {

// Instance-vertex index of each edge-local vertex.
std::vector<std::vector<int>> edge_vertex_maps(const HypergraphInstance& inst) {
  std::vector<std::vector<int>> maps(inst.n_edges());
  for (int e = 0; e < inst.n_edges(); ++e) {
    const auto& edge = inst.edges[e];
    maps[e].reserve(edge.vertices.size());
    for (const auto& label : edge.vertices) {
      maps[e].push_back(inst.vertex_index(label));
    }
  }
  return maps;
}

void check_edge_consistency(const HypergraphInstance& inst, double tol) {
  for (int e = 0; e < inst.n_edges(); ++e) {
    const auto& edge = inst.edges[e];
    if (edge.weight <= 0) {
      throw InvalidInstance("instance: weights must be positive (edge " +
                            std::to_string(e) + ")");
    }
    if (edge.problem.vertex_set != edge.vertices) {
      throw InvalidInstance("instance: edge " + std::to_string(e) +
                            " problem vertex set disagrees with N(e)");
    }
    if (edge.problem.domain != inst.domain) {
      throw InvalidInstance("instance: edge " + std::to_string(e) +
                            " domain disagrees with the instance domain");
    }
    if (edge.witnesses.size() != inst.n_inputs()) {
      throw InvalidInstance("instance: edge " + std::to_string(e) +
                            " witness count mismatch");
    }
    edge.problem.validate(std::max(tol, 1e-9));
  }
}

// Potential drop coefficient: the value c with phi|_N = c * u + shift * 1.
// When u is constant on N(e) the split is ambiguous; the convention follows
// the cut accounting: c = mean(phi)/mean(u) for a nonzero constant pattern
// (database-style potentials) and c = 0 for a vanishing one (open span
// edges). Returns false when no decomposition exists at tol.
bool extract_drop(const RVector& u, const RVector& phi, double tol, double* c) {
  const int n = static_cast<int>(u.size());
  RVector uc = u.array() - u.mean();
  double un = uc.norm();
  if (un <= tol * std::max(1.0, u.norm())) {
    *c = std::abs(u.mean()) > tol ? phi.mean() / u.mean() : 0.0;
    RVector r = phi.array() - phi.mean();
    return r.norm() <= tol * std::max(1.0, phi.norm()) * std::sqrt(double(n));
  }
  *c = uc.dot(phi) / (un * un);
  RVector resid = phi - *c * u;
  resid.array() -= resid.mean();
  return resid.norm() <= tol * std::max({1.0, phi.norm(), std::abs(*c)}) *
                             std::sqrt(double(n));
}

}  // namespace

int HypergraphInstance::vertex_index(const std::string& label) const {
  for (int i = 0; i < n_vertices(); ++i) {
    if (vertices[i] == label) return i;
  }
  throw ParseError("instance: unknown vertex '" + label + "'");
}

bool HypergraphInstance::is_boundary(int v) const {
  const std::string& label = vertices[v];
  return std::find(boundary.begin(), boundary.end(), label) != boundary.end();
}

InstanceReport validate_instance(const HypergraphInstance& inst, double tol) {
  check_edge_consistency(inst, tol);
  auto maps = edge_vertex_maps(inst);
  InstanceReport rep;
  constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
  for (int x = 0; x < inst.n_inputs(); ++x) {
    RVector flow = RVector::Zero(inst.n_vertices());
    RVector pot(inst.n_vertices());
    pot.setConstant(kUnset);
    for (int e = 0; e < inst.n_edges(); ++e) {
      const auto& edge = inst.edges[e];
      for (size_t lv = 0; lv < maps[e].size(); ++lv) {
        int gv = maps[e][lv];
        flow[gv] += edge.problem.delta[x][static_cast<int>(lv)];
        double uval = edge.problem.potential[x][static_cast<int>(lv)];
        if (std::isnan(pot[gv])) {
          pot[gv] = uval;
        } else {
          double dev = std::abs(pot[gv] - uval);
          rep.max_potential_residual = std::max(rep.max_potential_residual, dev);
        }
      }
    }
    for (int v = 0; v < inst.n_vertices(); ++v) {
      if (inst.is_boundary(v)) continue;
      double r = std::abs(flow[v]);
      if (r > rep.max_flow_residual) {
        rep.max_flow_residual = r;
        rep.worst_flow_vertex = v;
        rep.worst_flow_input = x;
      }
    }
  }
  rep.valid = rep.max_flow_residual <= tol && rep.max_potential_residual <= tol;
  return rep;
}

namespace {

ComposedResult assemble(const HypergraphInstance& inst,
                        const std::vector<RVector>& flow_coeff,
                        const std::vector<RVector>& drop_coeff,
                        const std::vector<RVector>& boundary_potential,
                        double tol) {
  auto maps = edge_vertex_maps(inst);
  const int nb = static_cast<int>(inst.boundary.size());
  std::vector<int> bidx(nb);
  for (int b = 0; b < nb; ++b) bidx[b] = inst.vertex_index(inst.boundary[b]);

  std::vector<int> h_offset(inst.n_edges() + 1, 0);
  for (int e = 0; e < inst.n_edges(); ++e) {
    h_offset[e + 1] = h_offset[e] + inst.edges[e].problem.oracle[0].dim;
  }
  const int htot = h_offset[inst.n_edges()];

  ComposedResult out;
  out.boundary_problem.vertex_set = inst.boundary;
  out.boundary_problem.domain = inst.domain;
  for (int x = 0; x < inst.n_inputs(); ++x) {
    RVector vertex_flow = RVector::Zero(inst.n_vertices());
    CVector wp = CVector::Zero(htot), wm = CVector::Zero(htot);
    double plus = 0.0, minus = 0.0;
    std::vector<const Involution*> parts;
    parts.reserve(inst.n_edges());
    for (int e = 0; e < inst.n_edges(); ++e) {
      const auto& edge = inst.edges[e];
      double cf = flow_coeff[x][e];
      double cd = drop_coeff[x][e];
      for (size_t lv = 0; lv < maps[e].size(); ++lv) {
        vertex_flow[maps[e][lv]] += cf * edge.problem.delta[x][static_cast<int>(lv)];
      }
      double sq = std::sqrt(edge.weight);
      int off = h_offset[e], sz = edge.problem.oracle[0].dim;
      wp.segment(off, sz) = (sq * cf) * edge.witnesses.w_plus[x];
      wm.segment(off, sz) = (cd / sq) * edge.witnesses.w_minus[x];
      plus += edge.weight * cf * cf * edge.witnesses.plus_size(x);
      minus += cd * cd * edge.witnesses.minus_size(x) / edge.weight;
      parts.push_back(&edge.problem.oracle[x]);
    }
    for (int v = 0; v < inst.n_vertices(); ++v) {
      if (!inst.is_boundary(v) &&
          std::abs(vertex_flow[v]) > tol * std::max(1.0, vertex_flow.norm())) {
        throw InvalidInstance("compose: routed flow does not vanish at internal "
                              "vertex '" + inst.vertices[v] + "' for input " +
                              inst.domain[x]);
      }
    }
    RVector bd(nb), bu(nb);
    for (int b = 0; b < nb; ++b) {
      bd[b] = vertex_flow[bidx[b]];
      bu[b] = boundary_potential[x][b];
    }
    out.boundary_problem.delta.push_back(bd);
    out.boundary_problem.potential.push_back(bu);
    out.boundary_problem.oracle.push_back(Involution::direct_sum(parts));
    out.witnesses.w_plus.push_back(std::move(wp));
    out.witnesses.w_minus.push_back(std::move(wm));
    out.plus_sizes.push_back(plus);
    out.minus_sizes.push_back(minus);
  }
  out.boundary_problem.validate(std::max(tol, 1e-8));
  out.feasibility = check_feasibility(out.boundary_problem, out.witnesses, tol);
  return out;
}

}  // namespace

ComposedResult compose(const HypergraphInstance& inst, double tol) {
  auto rep = validate_instance(inst, tol);
  if (!rep.valid) {
    throw InvalidInstance("compose: instance validation failed (flow residual " +
                          std::to_string(rep.max_flow_residual) +
                          ", potential residual " +
                          std::to_string(rep.max_potential_residual) + ")");
  }
  auto maps = edge_vertex_maps(inst);
  // Identity routing: each edge contributes its own states; the vertex
  // potential comes from the per-vertex consensus validated above.
  std::vector<RVector> flows(inst.n_inputs()), drops(inst.n_inputs()),
      bpot(inst.n_inputs());
  const int nb = static_cast<int>(inst.boundary.size());
  for (int x = 0; x < inst.n_inputs(); ++x) {
    flows[x] = RVector::Ones(inst.n_edges());
    drops[x] = RVector::Ones(inst.n_edges());
    RVector pot = RVector::Zero(inst.n_vertices());
    for (int e = 0; e < inst.n_edges(); ++e) {
      for (size_t lv = 0; lv < maps[e].size(); ++lv) {
        pot[maps[e][lv]] = inst.edges[e].problem.potential[x][static_cast<int>(lv)];
      }
    }
    bpot[x].resize(nb);
    for (int b = 0; b < nb; ++b) {
      bpot[x][b] = pot[inst.vertex_index(inst.boundary[b])];
    }
  }
  return assemble(inst, flows, drops, bpot, tol);
}

ComposedResult compose_routed(const HypergraphInstance& inst,
                              const Routing& routing, double tol) {
  check_edge_consistency(inst, tol);
  auto maps = edge_vertex_maps(inst);
  const int nb = static_cast<int>(inst.boundary.size());
  std::vector<RVector> drops(inst.n_inputs()), bpot(inst.n_inputs());
  for (int x = 0; x < inst.n_inputs(); ++x) {
    if (routing.flow_coeff[x].size() != inst.n_edges() ||
        routing.vertex_potential[x].size() != inst.n_vertices()) {
      throw DimensionMismatch("compose_routed: routing arrays mismatch");
    }
    drops[x].resize(inst.n_edges());
    const RVector& phi = routing.vertex_potential[x];
    for (int e = 0; e < inst.n_edges(); ++e) {
      const auto& edge = inst.edges[e];
      if (std::abs(routing.flow_coeff[x][e]) > tol &&
          edge.problem.delta[x].norm() <= tol) {
        throw InvalidInstance("compose_routed: flow routed through an edge "
                              "with zero net-flow at input " + inst.domain[x]);
      }
      RVector phi_local(maps[e].size());
      for (size_t lv = 0; lv < maps[e].size(); ++lv) {
        phi_local[static_cast<int>(lv)] = phi[maps[e][lv]];
      }
      double c = 0.0;
      if (!extract_drop(edge.problem.potential[x], phi_local, std::max(tol, 1e-8), &c)) {
        throw NotCut("compose_routed: potential on edge '" +
                     (edge.name.empty() ? std::to_string(e) : edge.name) +
                     "' is not realizable for input " + inst.domain[x]);
      }
      drops[x][e] = c;
    }
    bpot[x].resize(nb);
    for (int b = 0; b < nb; ++b) {
      bpot[x][b] = phi[inst.vertex_index(inst.boundary[b])];
    }
  }
  return assemble(inst, routing.flow_coeff, drops, bpot, tol);
}

TwoTerminalShape two_terminal_shape(const HypergraphInstance& inst, double tol) {
  auto maps = edge_vertex_maps(inst);
  TwoTerminalShape shape;
  shape.open_pair.resize(inst.n_inputs());
  for (int x = 0; x < inst.n_inputs(); ++x) {
    shape.open_pair[x].resize(inst.n_edges(), {-1, -1});
    for (int e = 0; e < inst.n_edges(); ++e) {
      const RVector& d = inst.edges[e].problem.delta[x];
      int pos = -1, neg = -1;
      for (int lv = 0; lv < d.size(); ++lv) {
        if (std::abs(d[lv]) <= tol) continue;
        if (d[lv] > 0) {
          if (pos >= 0) throw UnsupportedShape("resistance_cut: net-flow has more than two support vertices");
          pos = lv;
        } else {
          if (neg >= 0) throw UnsupportedShape("resistance_cut: net-flow has more than two support vertices");
          neg = lv;
        }
      }
      if (pos < 0 && neg < 0) continue;  // blocked
      if (pos < 0 || neg < 0 || std::abs(d[pos] - 1.0) > 1e-6 ||
          std::abs(d[neg] + 1.0) > 1e-6) {
        throw UnsupportedShape(
            "resistance_cut: edge net-flow is not a unit two-vertex flow");
      }
      shape.open_pair[x][e] = {maps[e][pos], maps[e][neg]};
    }
  }
  return shape;
}

ResistanceCutResult resistance_cut(
    const HypergraphInstance& inst,
    const std::optional<std::vector<RVector>>& flows,
    const std::optional<std::vector<std::vector<int>>>& cuts, double tol) {
  check_edge_consistency(inst, tol);
  auto shape = two_terminal_shape(inst, tol);
  auto maps = edge_vertex_maps(inst);

  Routing routing;
  routing.flow_coeff.resize(inst.n_inputs());
  routing.vertex_potential.resize(inst.n_inputs());
  ResistanceCutResult result;
  result.formula_plus.resize(inst.n_inputs());
  result.formula_minus.resize(inst.n_inputs());
  result.cut.resize(inst.n_inputs());

  std::vector<int> boundary_ids;
  for (const auto& b : inst.boundary) boundary_ids.push_back(inst.vertex_index(b));

  for (int x = 0; x < inst.n_inputs(); ++x) {
    // Open graph G(x) with resistances w_e (R^e)_x^+.
    WeightedGraph gx;
    gx.vertices = inst.vertices;
    std::vector<int> open_edges;
    for (int e = 0; e < inst.n_edges(); ++e) {
      auto [u, v] = shape.open_pair[x][e];
      if (u < 0) continue;
      double r = inst.edges[e].weight * inst.edges[e].witnesses.plus_size(x);
      if (r <= 0) {
        throw UnsupportedShape(
            "resistance_cut: open edge with zero positive witness size");
      }
      gx.edges.push_back({u, v, r});
      open_edges.push_back(e);
    }
    auto comp = components(gx);
    // The flow component must contain exactly the declared boundary pair.
    int flow_comp = -1;
    for (int c = 0;; ++c) {
      bool any = false;
      int count = 0;
      for (int b : boundary_ids) {
        if (comp[b] == c) ++count;
      }
      for (int v = 0; v < inst.n_vertices(); ++v) any |= comp[v] == c;
      if (!any) break;
      if (count >= 2) {
        if (flow_comp >= 0 || count > 2) {
          throw UnsupportedShape(
              "resistance_cut: open graph links more than one boundary pair "
              "at input " + inst.domain[x]);
        }
        flow_comp = c;
      }
    }
    if (flow_comp < 0) {
      throw NotConnected("resistance_cut: no boundary pair connected at input " +
                         inst.domain[x]);
    }
    int sx = -1, tx = -1;
    for (int b : boundary_ids) {
      if (comp[b] == flow_comp) (sx < 0 ? sx : tx) = b;
    }

    RVector coeff = RVector::Zero(inst.n_edges());
    if (flows) {
      coeff = (*flows)[x];
      double rplus = 0.0;
      for (int e = 0; e < inst.n_edges(); ++e) {
        rplus += inst.edges[e].weight * coeff[e] * coeff[e] *
                 inst.edges[e].witnesses.plus_size(x);
      }
      result.formula_plus[x] = rplus;
    } else {
      // solve on the flow component only; the rest of G(x) carries no flow
      std::vector<int> local(inst.n_vertices(), -1);
      WeightedGraph sub;
      for (int v = 0; v < inst.n_vertices(); ++v) {
        if (comp[v] == flow_comp) {
          local[v] = sub.add_vertex(inst.vertices[v]);
        }
      }
      std::vector<int> sub_edges;
      for (size_t i = 0; i < open_edges.size(); ++i) {
        const auto& ge = gx.edges[i];
        if (comp[ge.tail] != flow_comp) continue;
        sub.edges.push_back({local[ge.tail], local[ge.head], ge.r});
        sub_edges.push_back(open_edges[i]);
      }
      NetFlow delta{RVector::Zero(sub.n())};
      delta.values[local[sx]] = 1.0;
      delta.values[local[tx]] = -1.0;
      auto res = resistance(sub, delta);
      for (size_t i = 0; i < sub_edges.size(); ++i) {
        coeff[sub_edges[i]] = res.flow.values[static_cast<int>(i)];
      }
      result.formula_plus[x] = res.r_eff;
    }
    routing.flow_coeff[x] = coeff;

    // Reachable set and cut.
    std::vector<char> reach(inst.n_vertices(), 0);
    std::vector<int> cut_edges;
    if (cuts) {
      cut_edges = (*cuts)[x];
      std::set<int> cut_set(cut_edges.begin(), cut_edges.end());
      std::queue<int> q;
      q.push(sx);
      reach[sx] = 1;
      while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int e = 0; e < inst.n_edges(); ++e) {
          bool member = std::find(maps[e].begin(), maps[e].end(), v) != maps[e].end();
          if (!member) continue;
          auto [u, w] = shape.open_pair[x][e];
          bool blocked = u < 0;
          if (!blocked) {
            // flow-connected pair is always traversable
            if (u == v && !reach[w]) { reach[w] = 1; q.push(w); }
            if (w == v && !reach[u]) { reach[u] = 1; q.push(u); }
          }
          if (blocked && !cut_set.count(e)) {
            for (int gv : maps[e]) {
              if (!reach[gv]) { reach[gv] = 1; q.push(gv); }
            }
          }
        }
      }
      if (!reach[tx]) {
        throw NotCut("resistance_cut: declared cut separates the boundary pair "
                     "itself at input " + inst.domain[x]);
      }
      for (int b : boundary_ids) {
        if (b != sx && b != tx && reach[b]) {
          throw NotCut("resistance_cut: cut fails to separate boundary vertex '" +
                       inst.vertices[b] + "' at input " + inst.domain[x]);
        }
      }
    } else {
      for (int v = 0; v < inst.n_vertices(); ++v) reach[v] = comp[v] == flow_comp;
      for (int e = 0; e < inst.n_edges(); ++e) {
        bool touches = false, inside = true;
        for (int gv : maps[e]) {
          if (reach[gv]) touches = true;
          else inside = false;
        }
        if (touches && !inside) cut_edges.push_back(e);
      }
    }
    result.cut[x] = cut_edges;
    double rminus = 0.0;
    for (int e : cut_edges) {
      rminus += inst.edges[e].witnesses.minus_size(x) / inst.edges[e].weight;
    }
    result.formula_minus[x] = rminus;

    RVector phi(inst.n_vertices());
    for (int v = 0; v < inst.n_vertices(); ++v) phi[v] = reach[v] ? 1.0 : 0.0;
    routing.vertex_potential[x] = phi;
  }

  result.composed = compose_routed(inst, routing, tol);
  return result;
}

ComposedResult compose_auto(const HypergraphInstance& inst, double tol) {
  auto rep = validate_instance(inst, tol);
  if (rep.valid) return compose(inst, tol);
  return resistance_cut(inst, std::nullopt, std::nullopt, tol).composed;
}

ClassicEmbedResult classic_embed(
    const std::vector<std::string>& vertices, const std::string& s,
    const std::string& t,
    const std::vector<std::pair<std::string, std::string>>& graph_edges,
    const std::vector<HyperedgeWithWitnesses>& edge_programs,
    const std::optional<std::vector<bool>>& declared_positive, double tol) {
  if (graph_edges.size() != edge_programs.size()) {
    throw DimensionMismatch("classic_embed: one program per edge required");
  }
  HypergraphInstance inst;
  inst.vertices = vertices;
  inst.boundary = {s, t};
  inst.domain = edge_programs.empty() ? std::vector<std::string>{}
                                      : edge_programs[0].problem.domain;
  for (size_t e = 0; e < graph_edges.size(); ++e) {
    Hyperedge he;
    he.name = "edge" + std::to_string(e);
    he.vertices = {graph_edges[e].first, graph_edges[e].second};
    he.problem = edge_programs[e].problem;
    if (he.problem.n_vertices() != 2) {
      throw UnsupportedShape("classic_embed: edge programs must be two-vertex");
    }
    he.problem.vertex_set = he.vertices;  // relabel {s,t} -> actual endpoints
    he.witnesses = edge_programs[e].witnesses;
    he.weight = 1.0;
    inst.edges.push_back(std::move(he));
  }
  const int sx = inst.vertex_index(s), txv = inst.vertex_index(t);
  auto maps = edge_vertex_maps(inst);

  ClassicEmbedResult out;
  Routing routing;
  routing.flow_coeff.resize(inst.n_inputs());
  routing.vertex_potential.resize(inst.n_inputs());
  out.formula_plus.assign(inst.n_inputs(), 0.0);
  out.formula_minus.assign(inst.n_inputs(), 0.0);

  for (int x = 0; x < inst.n_inputs(); ++x) {
    WeightedGraph gx;
    gx.vertices = inst.vertices;
    std::vector<int> open_edges;
    for (int e = 0; e < inst.n_edges(); ++e) {
      if (inst.edges[e].problem.delta[x].norm() <= tol) continue;
      double r = inst.edges[e].witnesses.plus_size(x);
      if (r <= 0) throw UnsupportedShape("classic_embed: zero positive size");
      gx.edges.push_back({maps[e][0], maps[e][1], r});
      open_edges.push_back(e);
    }
    auto comp = components(gx);
    bool connected = comp[sx] == comp[txv];
    out.positive.push_back(connected);
    if (declared_positive && (*declared_positive)[x] != connected) {
      throw NotConnected("classic_embed: declared classification disagrees "
                         "with s-t connectivity at input " + inst.domain[x]);
    }

    routing.flow_coeff[x] = RVector::Zero(inst.n_edges());
    if (connected) {
      NetFlow delta{RVector::Zero(inst.n_vertices())};
      delta.values[sx] = 1.0;
      delta.values[txv] = -1.0;
      auto res = resistance(gx, delta);
      for (size_t i = 0; i < open_edges.size(); ++i) {
        routing.flow_coeff[x][open_edges[i]] = res.flow.values[static_cast<int>(i)];
      }
      out.formula_plus[x] = res.r_eff;
      routing.vertex_potential[x] = RVector::Ones(inst.n_vertices());
    } else {
      // Contract the components of G(x); blocked edges carry resistance
      // 1/(R^e)^-; R^- is the reciprocal resistance of the contracted graph.
      int ncomp = *std::max_element(comp.begin(), comp.end()) + 1;
      WeightedGraph quot;
      for (int c = 0; c < ncomp; ++c) quot.add_vertex("c" + std::to_string(c));
      for (int e = 0; e < inst.n_edges(); ++e) {
        if (inst.edges[e].problem.delta[x].norm() > tol) continue;
        int cu = comp[maps[e][0]], cv = comp[maps[e][1]];
        if (cu == cv) continue;
        double rminus = inst.edges[e].witnesses.minus_size(x);
        if (rminus <= 0) {
          throw UnsupportedShape("classic_embed: blocked edge with zero "
                                 "negative witness size");
        }
        quot.edges.push_back({cu, cv, 1.0 / rminus});
      }
      RVector phi(inst.n_vertices());
      auto qcomp = components(quot);
      if (qcomp[comp[sx]] != qcomp[comp[txv]]) {
        // nothing connects the two sides at all; zero negative witness works
        for (int v = 0; v < inst.n_vertices(); ++v) {
          phi[v] = qcomp[comp[v]] == qcomp[comp[sx]] ? 1.0 : 0.0;
        }
        out.formula_minus[x] = 0.0;
      } else {
        NetFlow delta{RVector::Zero(quot.n())};
        delta.values[comp[sx]] = 1.0;
        delta.values[comp[txv]] = -1.0;
        auto res = resistance(quot, delta);
        RVector psi = pseudoinverse(laplacian(quot)) * delta.values;
        double diff = psi[comp[sx]] - psi[comp[txv]];
        psi /= diff;  // unit potential difference between s and t sides
        for (int v = 0; v < inst.n_vertices(); ++v) phi[v] = psi[comp[v]];
        out.formula_minus[x] = 1.0 / res.r_eff;
      }
      routing.vertex_potential[x] = phi;
    }
  }
  out.composed = compose_routed(inst, routing, tol);
  return out;
}

DivideConquerResult divide_conquer(
    const HyperedgeWithWitnesses& aux, const std::string& source,
    const std::map<std::string, HyperedgeWithWitnesses>& family,
    const std::vector<std::string>& aux_value, double tol) {
  std::vector<std::string> branch_labels;
  for (const auto& v : aux.problem.vertex_set) {
    if (v != source) branch_labels.push_back(v);
  }
  for (const auto& b : branch_labels) {
    if (!family.count(b)) {
      throw OutputMismatch("divide_conquer: no branch hyperedge for output '" +
                           b + "'");
    }
  }
  if (family.size() != branch_labels.size()) {
    throw OutputMismatch("divide_conquer: branch labels disagree with the "
                         "auxiliary output set");
  }

  DivideConquerResult out;
  HypergraphInstance& inst = out.instance;
  inst.domain = aux.problem.domain;
  for (const auto& v : aux.problem.vertex_set) inst.vertices.push_back(v);
  inst.boundary.push_back(source);
  Hyperedge ae;
  ae.name = "aux";
  ae.vertices = aux.problem.vertex_set;
  ae.problem = aux.problem;
  ae.witnesses = aux.witnesses;
  inst.edges.push_back(std::move(ae));
  for (const auto& b : branch_labels) {
    const auto& hw = family.at(b);
    bool rooted = false;
    for (const auto& v : hw.problem.vertex_set) {
      if (v == b) rooted = true;
      else {
        bool fresh = std::find(inst.vertices.begin(), inst.vertices.end(), v) ==
                     inst.vertices.end();
        if (!fresh) {
          throw OutputMismatch("divide_conquer: branch '" + b +
                               "' shares vertex '" + v + "' with another edge");
        }
        inst.vertices.push_back(v);
        inst.boundary.push_back(v);
      }
    }
    if (!rooted) {
      throw OutputMismatch("divide_conquer: branch '" + b +
                           "' does not hang off its output vertex");
    }
    Hyperedge he;
    he.name = "branch_" + b;
    he.vertices = hw.problem.vertex_set;
    he.problem = hw.problem;
    he.witnesses = hw.witnesses;
    inst.edges.push_back(std::move(he));
  }

  out.composed = compose(inst, tol);

  for (int x = 0; x < inst.n_inputs(); ++x) {
    const std::string& val = aux_value[x];
    if (std::find(branch_labels.begin(), branch_labels.end(), val) ==
        branch_labels.end()) {
      throw OutputMismatch("divide_conquer: auxiliary value '" + val +
                           "' is not an output label");
    }
    const auto& branch = family.at(val);
    out.aux_plus.push_back(aux.witnesses.plus_size(x));
    out.aux_minus.push_back(aux.witnesses.minus_size(x));
    out.branch_plus.push_back(branch.witnesses.plus_size(x));
    out.branch_minus.push_back(branch.witnesses.minus_size(x));
    double bound_plus = out.aux_plus[x] + out.branch_plus[x];
    double want_minus = out.aux_minus[x] + out.branch_minus[x];
    if (out.composed.plus_sizes[x] > bound_plus + 1e-9) {
      throw NumericalFailure("divide_conquer: positive size exceeds the "
                             "aux+branch bound at input " + inst.domain[x]);
    }
    if (std::abs(out.composed.minus_sizes[x] - want_minus) > 1e-9) {
      throw NumericalFailure("divide_conquer: off-branch edges contribute "
                             "negative size at input " + inst.domain[x]);
    }
  }
  return out;
}

}  // namespace ggc
