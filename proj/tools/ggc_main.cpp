// ggc: command-line front end for the graph-composition toolkit.
//
// Subcommands: verify, resistance, wdt, qwalk, transduce, catalog, selftest.
// Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 input/parse error.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ggc/catalog.hpp"
#include "ggc/composition.hpp"
#include "ggc/dectree.hpp"
#include "ggc/io.hpp"
#include "ggc/markov.hpp"
#include "ggc/qwalk.hpp"
#include "ggc/report.hpp"
#include "ggc/selftest.hpp"
#include "ggc/transducer.hpp"

namespace {

using ggc::JsonNode;

struct Options {
  double tol = 1e-8;
  std::uint64_t seed = 42;
  std::string format = "text";
  int jobs = 1;
  std::string mode = "detect";
  int emulate_k = 16;
  std::string input;
  std::string output;
  std::string name;  // catalog fixture name
  int n = 3;
};

int log_level() {
  const char* env = std::getenv("GGC_LOG");
  return env ? std::atoi(env) : 0;
}

void logline(const std::string& s) {
  if (log_level() > 0) std::cerr << "[ggc] " << s << "\n";
}

void emit(const JsonNode& report, const Options& opt) {
  std::string body =
      opt.format == "json" ? report.dump(2) + "\n" : report.to_text();
  if (opt.output.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(opt.output, std::ios::binary);
    out << body;
  }
}

JsonNode sizes_row(const std::string& label, double plus, double minus) {
  JsonNode row = JsonNode::object();
  row.set("input", label);
  row.set("r_plus", plus);
  row.set("r_minus", minus);
  return row;
}

int cmd_verify(const Options& opt) {
  auto inst = ggc::instance_from_json(ggc::load_json_file(opt.input));
  auto validation = ggc::validate_instance(inst, opt.tol);
  auto composed = ggc::compose_auto(inst, opt.tol);
  JsonNode rep = JsonNode::object();
  rep.set("command", "verify");
  rep.set("input", opt.input);
  // Instances whose declared states already glue compose directly; the
  // two-terminal ones go through the resistance-cut routing instead.
  rep.set("routing", validation.valid ? "identity" : "resistance_cut");
  rep.set("flow_residual", validation.max_flow_residual);
  rep.set("potential_residual", validation.max_potential_residual);
  rep.set("max_gram_violation", composed.feasibility.max_violation);
  if (!composed.feasibility.feasible && composed.feasibility.worst_x >= 0) {
    JsonNode worst = JsonNode::object();
    worst.set("input_x", inst.domain[composed.feasibility.worst_x]);
    worst.set("input_y", inst.domain[composed.feasibility.worst_y]);
    rep.set("max_violation_at", std::move(worst));
  }
  JsonNode rows = JsonNode::array();
  for (int x = 0; x < inst.n_inputs(); ++x) {
    rows.push(sizes_row(inst.domain[x], composed.plus_sizes[x],
                        composed.minus_sizes[x]));
  }
  rep.set("sizes", std::move(rows));
  bool ok = composed.feasibility.feasible;
  rep.set("pass", ok);
  emit(rep, opt);
  return ok ? 0 : 1;
}

int cmd_resistance(const Options& opt) {
  auto j = ggc::load_json_file(opt.input);
  auto graph = ggc::graph_from_json(j.contains("graph") ? j.at("graph") : j);
  JsonNode rep = JsonNode::object();
  rep.set("command", "resistance");
  bool ok = true;
  if (j.contains("netflow")) {
    ggc::NetFlow delta{ggc::labeled_values_from_json(j.at("netflow"),
                                                     graph.vertices, false)};
    auto res = ggc::resistance(graph, delta);
    rep.set("r_eff", res.r_eff);
    rep.set("flow_energy", res.energy);
    JsonNode flows = JsonNode::array();
    for (int e = 0; e < graph.m(); ++e) {
      JsonNode row = JsonNode::object();
      row.set("tail", graph.vertices[graph.edges[e].tail]);
      row.set("head", graph.vertices[graph.edges[e].head]);
      row.set("r", graph.edges[e].r);
      row.set("flow", res.flow.values[e]);
      flows.push(std::move(row));
    }
    rep.set("min_energy_flow", std::move(flows));
    ok = std::abs(res.r_eff - res.energy) <=
         opt.tol * std::max(1.0, std::abs(res.r_eff));
    rep.set("dual_route_agreement", ok);
  }
  if (j.contains("lemma_check")) {
    const auto& lc = j.at("lemma_check");
    auto cw = ggc::graph_to_chain(graph);
    int t = lc.contains("t") ? lc.at("t").get<int>() : 2;
    ggc::RVector xi =
        ggc::labeled_values_from_json(lc.at("xi"), graph.vertices, false);
    ggc::RVector sigma =
        ggc::labeled_values_from_json(lc.at("sigma"), graph.vertices, true);
    ggc::RVector nu =
        ggc::labeled_values_from_json(lc.at("nu"), graph.vertices, true);
    auto lemma = ggc::check_resistance_lemmas(cw.chain, xi, t, sigma, nu);
    JsonNode lrep = JsonNode::object();
    lrep.set("t", t);
    lrep.set("spectral_gap", lemma.gap);
    auto one = [](const ggc::LemmaCheck& c) {
      JsonNode n = JsonNode::object();
      n.set("lhs", c.lhs);
      n.set("rhs", c.rhs);
      n.set("holds", c.holds);
      return n;
    };
    lrep.set("fast_forwarding", one(lemma.fast_forwarding));
    lrep.set("gap_bound", one(lemma.gap_bound));
    lrep.set("fraction_bound", one(lemma.fraction_bound));
    rep.set("lemma_check", std::move(lrep));
    ok = ok && lemma.all_hold();
  }
  rep.set("pass", ok);
  emit(rep, opt);
  return ok ? 0 : 1;
}

int cmd_wdt(const Options& opt) {
  auto tree = ggc::tree_from_json(ggc::load_json_file(opt.input));
  auto res = ggc::wdt(tree, opt.tol);
  auto validation = ggc::validate_scheme(tree, res.scheme, 1e-6);
  JsonNode rep = JsonNode::object();
  rep.set("command", "wdt");
  rep.set("root_weight", res.root_weight);
  rep.set("scheme_valid", validation.valid);
  JsonNode weights = JsonNode::array();
  for (const auto& [id, w] : res.scheme.weight) {
    JsonNode row = JsonNode::object();
    row.set("node", id);
    row.set("weight", w);
    weights.push(std::move(row));
  }
  rep.set("weights", std::move(weights));
  bool colored = false;
  for (const auto& n : tree.nodes) colored = colored || !n.colors.empty();
  if (colored) {
    auto bt = ggc::bt20_scheme(tree);
    rep.set("bt20_root_weight", bt.weight[tree.root]);
    rep.set("bt20_bound",
            3.0 * std::sqrt(double(std::max(1, tree.max_red()) * tree.depth())));
  }
  rep.set("pass", validation.valid);
  emit(rep, opt);
  return validation.valid ? 0 : 1;
}

int cmd_qwalk(const Options& opt) {
  auto j = ggc::load_json_file(opt.input);
  auto q = ggc::qwalk_from_json(j);
  const int nv = q.n_vertices();
  ggc::RVector sigma =
      j.contains("sigma")
          ? ggc::labeled_values_from_json(j.at("sigma"), q.graph.vertices, true)
          : ggc::RVector::Constant(nv, 1.0 / nv);
  ggc::RVector tau =
      j.contains("tau")
          ? ggc::labeled_values_from_json(j.at("tau"), q.graph.vertices, true)
          : ggc::RVector::Constant(nv, 1.0 / nv);
  JsonNode rep = JsonNode::object();
  rep.set("command", "qwalk");
  rep.set("mode", opt.mode);
  bool ok = true;
  auto put_report = [&](const ggc::BoundReport& br) {
    JsonNode rows = JsonNode::array();
    for (int x = 0; x < q.n_inputs(); ++x) {
      rows.push(sizes_row(q.domain[x], br.plus[x], br.minus[x]));
    }
    rep.set("sizes", std::move(rows));
    rep.set("objective", br.objective);
  };
  if (opt.mode == "detect") {
    auto res =
        ggc::build_detection(q, sigma, tau, std::nullopt, std::nullopt, opt.tol);
    put_report(res.report);
    if (res.composed) {
      rep.set("composed_feasible", res.composed->feasibility.feasible);
      rep.set("max_gram_violation", res.composed->feasibility.max_violation);
      double dev = 0.0;
      for (int x = 0; x < q.n_inputs(); ++x) {
        double want =
            q.marked[x].empty() ? res.report.minus[x] : res.report.plus[x];
        double got = q.marked[x].empty() ? res.composed->minus_sizes[x]
                                         : res.composed->plus_sizes[x];
        dev = std::max(dev, std::abs(want - got) / std::max(1.0, want));
      }
      rep.set("formula_vs_composed", dev);
      ok = res.composed->feasibility.feasible && dev <= opt.tol;
    }
  } else if (opt.mode == "find-unique") {
    auto res = ggc::build_finding(q, sigma, tau, ggc::FindingMode::kUnique, 0.0,
                                  std::nullopt, opt.tol);
    put_report(res.report);
    if (res.composed) {
      rep.set("composed_feasible", res.composed->feasibility.feasible);
      ok = res.composed->feasibility.feasible;
    }
  } else if (opt.mode == "find-fraction") {
    double eps = j.contains("eps") ? j.at("eps").get<double>() : 0.0;
    if (eps <= 0) {
      for (int v : q.marked[0]) eps += tau[v];
    }
    auto res = ggc::build_finding(q, sigma, tau, ggc::FindingMode::kFraction,
                                  eps, std::nullopt, opt.tol);
    put_report(res.report);
    rep.set("eps", eps);
    if (res.composed) {
      rep.set("composed_feasible", res.composed->feasibility.feasible);
      ok = res.composed->feasibility.feasible;
    }
  } else if (opt.mode == "variable1" || opt.mode == "variable2") {
    auto res = ggc::variable_query_bounds(q, sigma, tau,
                                          opt.mode == "variable2" ? 2 : 1);
    put_report(res.report);
    rep.set("eps", res.eps);
    rep.set("resistance_bound", res.big_r);
    double worst_pos = 0.0;
    for (size_t i = 0; i < res.pos_setup.size(); ++i) {
      worst_pos = std::max(
          {worst_pos, res.pos_setup[i], res.pos_update[i], res.pos_check[i]});
    }
    rep.set("worst_positive_term", worst_pos);
    ok = worst_pos <= 1.0 + 1e-9;
  } else if (opt.mode == "mnrs") {
    auto res = ggc::mnrs_bounds(q);
    put_report(res.report);
    rep.set("eps", res.eps);
    rep.set("spectral_gap", res.gap);
    rep.set("resistance_inequality_holds", res.inequality_holds);
    ok = res.inequality_holds;
  } else if (opt.mode == "unified") {
    int t = j.contains("t") ? j.at("t").get<int>() : 1;
    auto b = ggc::unified_bound_on_instance(q, sigma, t);
    rep.set("t", t);
    rep.set("value", b.value);
    rep.set("setup_term", b.s_term);
    rep.set("update_term", b.u_term);
    rep.set("check_term", b.c_term);
    rep.set("positive_size", b.positive_size);
    rep.set("positive_bound", b.positive_bound);
    rep.set("negative_size", b.negative_size);
    rep.set("chain_ok", b.chain_ok);
    ok = b.chain_ok;
  } else {
    throw ggc::ParseError("unknown qwalk mode '" + opt.mode + "'");
  }
  rep.set("pass", ok);
  emit(rep, opt);
  return ok ? 0 : 1;
}

int cmd_transduce(const Options& opt) {
  auto j = ggc::load_json_file(opt.input);
  ggc::StateReflectionProblem problem;
  ggc::WitnessFamily witnesses;
  if (j.contains("problem")) {
    problem = ggc::reflection_from_json(j.at("problem"));
    witnesses = ggc::witnesses_from_json(j.at("witnesses"));
    // ingested families are projected onto the oracle eigenspaces
    double discarded = ggc::normalize_to_eigenform(problem, witnesses);
    if (discarded > opt.tol) {
      std::cerr << "warning: witness family was outside the oracle "
                   "eigenspaces; discarded component norm "
                << discarded << "\n";
    }
  } else {
    auto inst = ggc::instance_from_json(j);
    auto composed = ggc::compose_auto(inst, opt.tol);
    problem = composed.boundary_problem.as_reflection();
    witnesses = composed.witnesses;
    logline("transducing the composed boundary problem of " + opt.input);
  }
  auto t = ggc::build_reflection(problem, witnesses, std::max(opt.tol, 1e-8));
  JsonNode rep = JsonNode::object();
  rep.set("command", "transduce");
  rep.set("dim_v", t.dim_v);
  rep.set("dim_h", t.dim_h);
  double worst = 0.0;
  JsonNode rows = JsonNode::array();
  for (int x = 0; x < problem.size(); ++x) {
    auto v = ggc::verify_transduction(
        t, problem.oracle[x], problem.sigma_plus[x], problem.sigma_minus[x],
        witnesses.w_plus[x], witnesses.w_minus[x], 1e-9);
    worst = std::max(worst, std::max(v.plus_residual, v.minus_residual));
    auto folded = ggc::fold_oracle(t, problem.oracle[x]);
    auto solved = ggc::transduce_solve(folded, problem.sigma_plus[x]);
    JsonNode row = JsonNode::object();
    row.set("input", problem.domain[x]);
    row.set("plus_residual", v.plus_residual);
    row.set("minus_residual", v.minus_residual);
    row.set("catalyst_norm", solved.w_min.norm());
    row.set("supplied_norm", witnesses.w_plus[x].norm());
    JsonNode sweep = JsonNode::array();
    for (int k = std::max(1, opt.emulate_k / 4); k <= opt.emulate_k * 4;
         k *= 4) {
      auto em = ggc::emulate(t, problem.oracle[x], problem.sigma_plus[x], k);
      JsonNode pt = JsonNode::object();
      pt.set("K", k);
      pt.set("error", em.error);
      pt.set("bound_2w_over_sqrtK", em.bound);
      sweep.push(std::move(pt));
    }
    row.set("emulation", std::move(sweep));
    rows.push(std::move(row));
  }
  rep.set("inputs", std::move(rows));
  rep.set("worst_residual", worst);
  bool ok = worst <= 1e-9;
  rep.set("pass", ok);
  emit(rep, opt);
  return ok ? 0 : 1;
}

int cmd_catalog(const Options& opt) {
  ggc::CatalogFixture fx;
  if (opt.name == "dense_learning") {
    fx = ggc::dense_learning(opt.n);
  } else if (opt.name == "first_marked_index") {
    std::vector<double> alpha, beta;
    for (int jx = 1; jx <= opt.n; ++jx) {
      alpha.push_back(1.0 / std::sqrt(double(jx)));
      beta.push_back(std::sqrt(double(jx)));
    }
    fx = ggc::first_marked_index(opt.n, alpha, beta);
  } else if (opt.name == "minimum_finding") {
    fx = ggc::minimum_finding(opt.n, ggc::minimum_finding_inputs(opt.n));
  } else {
    throw ggc::ParseError("unknown catalog fixture '" + opt.name +
                          "' (dense_learning | first_marked_index | "
                          "minimum_finding)");
  }
  ggc::Json out = ggc::instance_to_json(fx.instance);
  std::string body = out.dump(1);
  if (opt.output.empty()) {
    std::cout << body << "\n";
  } else {
    std::ofstream f(opt.output, std::ios::binary);
    f << body << "\n";
    logline("wrote " + opt.output);
  }
  return 0;
}

int cmd_selftest(const Options& opt) {
  auto results = ggc::run_selftest(opt.seed, opt.jobs);
  JsonNode rep = ggc::selftest_to_json(results, opt.seed);
  emit(rep, opt);
  for (const auto& r : results) {
    if (!r.pass) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"generalized graph composition toolkit"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool with_input) {
    sub->add_option("--tol", opt.tol, "working tolerance");
    sub->add_option("--seed", opt.seed, "PRNG seed");
    sub->add_option("--format", opt.format, "text | json")
        ->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--jobs", opt.jobs, "worker count");
    sub->add_option("-o,--output", opt.output, "write the report to a file");
    if (with_input) {
      sub->add_option("input", opt.input, "input json file")->required();
    }
  };

  auto* verify = app.add_subcommand("verify", "feasibility + instance validation");
  add_common(verify, true);
  auto* resistance =
      app.add_subcommand("resistance", "effective resistance, flows, lemma checks");
  add_common(resistance, true);
  auto* wdt = app.add_subcommand("wdt", "decision-tree weighting");
  add_common(wdt, true);
  auto* qwalk = app.add_subcommand("qwalk", "quantum walk search bounds");
  add_common(qwalk, true);
  qwalk->add_option("--mode", opt.mode,
                    "detect | find-unique | find-fraction | variable1 | "
                    "variable2 | mnrs | unified");
  auto* transduce = app.add_subcommand("transduce", "build U, verify, emulate");
  add_common(transduce, true);
  transduce->add_option("-K", opt.emulate_k, "emulation call budget");
  auto* catalog = app.add_subcommand("catalog", "emit a worked fixture");
  add_common(catalog, false);
  catalog->add_option("name", opt.name, "fixture name")->required();
  catalog->add_option("-n", opt.n, "fixture size");
  auto* selftest = app.add_subcommand("selftest", "full acceptance suite");
  add_common(selftest, false);

  CLI11_PARSE(app, argc, argv);

  auto fail_json = [&](const std::string& code, const std::string& what) {
    if (opt.format == "json") {
      JsonNode err = JsonNode::object();
      JsonNode body = JsonNode::object();
      body.set("code", code);
      body.set("message", what);
      err.set("error", std::move(body));
      std::cout << err.dump(2) << "\n";
    } else {
      std::cerr << "error [" << code << "]: " << what << "\n";
    }
  };

  try {
    if (verify->parsed()) return cmd_verify(opt);
    if (resistance->parsed()) return cmd_resistance(opt);
    if (wdt->parsed()) return cmd_wdt(opt);
    if (qwalk->parsed()) return cmd_qwalk(opt);
    if (transduce->parsed()) return cmd_transduce(opt);
    if (catalog->parsed()) return cmd_catalog(opt);
    if (selftest->parsed()) return cmd_selftest(opt);
  } catch (const ggc::ParseError& e) {
    fail_json(e.code(), e.what());
    return 2;
  } catch (const ggc::Error& e) {
    fail_json(e.code(), e.what());
    return 2;
  } catch (const std::exception& e) {
    fail_json("Internal", e.what());
    return 2;
  }
  return 2;
}
