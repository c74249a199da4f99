#include "ggc/selftest.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "ggc/catalog.hpp"
#include "ggc/composition.hpp"
#include "ggc/dectree.hpp"
#include "ggc/markov.hpp"
#include "ggc/qwalk.hpp"
#include "ggc/transducer.hpp"

namespace ggc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
void parallel_trials(int n, int jobs, F&& body) {
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  for (int j = 0; j < std::min(jobs, n); ++j) {
    workers.emplace_back([&] {
      int i;
      while ((i = next.fetch_add(1)) < n) body(i);
    });
  }
  for (auto& w : workers) w.join();
}

WeightedGraph random_connected_graph(Rng& rng, int n, double rmin, double rmax) {
  WeightedGraph g;
  for (int v = 0; v < n; ++v) g.add_vertex("v" + std::to_string(v));
  for (int v = 1; v < n; ++v) {
    g.edges.push_back({static_cast<int>(rng.below(v)), v, rng.uniform(rmin, rmax)});
  }
  int extra = static_cast<int>(rng.below(n + 1));
  for (int i = 0; i < extra; ++i) {
    int u = static_cast<int>(rng.below(n)), w = static_cast<int>(rng.below(n));
    if (u != w) g.edges.push_back({u, w, rng.uniform(rmin, rmax)});
  }
  return g;
}

RVector random_mean_zero(Rng& rng, int n) {
  RVector xi = random_rvector(rng, n);
  xi.array() -= xi.mean();
  return xi;
}

struct Battery {
  std::uint64_t seed;
  int jobs;
  std::vector<CriterionResult> results;

  Rng fresh(int criterion, int salt = 0) const {
    return Rng(seed * 1000003ULL + criterion * 797ULL + salt);
  }

  void record(int id, const std::string& name, bool pass,
              const std::string& detail, double secs, bool report_only = false) {
    results.push_back({id, name, pass, report_only, detail, secs});
  }

  // 1. Laplacian-pseudoinverse resistance vs incidence least-squares energy.
  void criterion1() {
    auto t0 = Clock::now();
    std::vector<double> devs(100, 0.0);
    parallel_trials(100, jobs, [&](int i) {
      Rng rng = fresh(1, i);
      int n = 2 + static_cast<int>(rng.below(19));
      auto g = random_connected_graph(rng, n, 0.1, 10.0);
      RVector xi = random_mean_zero(rng, n);
      auto res = resistance(g, NetFlow{xi});
      devs[i] = std::abs(res.r_eff - res.energy) / std::max(1.0, res.r_eff);
    });
    double worst = 0.0;
    for (double d : devs) worst = std::max(worst, d);
    double secs = seconds_since(t0);
    std::ostringstream os;
    os << "worst relative deviation " << worst << " over 100 graphs";
    record(1, "resistance dual-route agreement", worst <= 1e-8 && secs < 10.0,
           os.str(), secs);
  }

  // 2. Lemma fast-forwarding, both claims.
  void criterion2() {
    auto t0 = Clock::now();
    std::vector<int> violations(100, 0);
    parallel_trials(100, jobs, [&](int i) {
      Rng rng = fresh(2, i);
      int n = 2 + static_cast<int>(rng.below(11));
      auto g = random_connected_graph(rng, n, 0.1, 10.0);
      auto cw = graph_to_chain(g);
      auto sg = stationary_and_gap(cw.chain);
      WeightedGraph canonical = chain_to_graph(cw.chain);
      for (int t = 1; t <= 5; ++t) {
        RVector xi = random_mean_zero(rng, n);
        double lhs = resistance(canonical, NetFlow{xi}).r_eff;
        double rhs = t * spectral_resistance(cw.chain, sg.pi, xi, t);
        if (lhs > rhs + 1e-9) ++violations[i];
        if (sg.gap > 0) {
          double bound = xi.cwiseQuotient(sg.pi.cwiseSqrt()).squaredNorm() / sg.gap;
          if (lhs > bound + 1e-9) ++violations[i];
        }
      }
    });
    int total = 0;
    for (int v : violations) total += v;
    double secs = seconds_since(t0);
    record(2, "lemma fast-forwarding",
           total == 0, std::to_string(total) + " violations over 100 chains x t in 1..5",
           secs);
  }

  // 3. Lemma fraction-vs-effective-resistance.
  void criterion3() {
    auto t0 = Clock::now();
    std::vector<int> violations(100, 0);
    parallel_trials(100, jobs, [&](int i) {
      Rng rng = fresh(3, i);
      int n = 2 + static_cast<int>(rng.below(11));
      auto g = random_connected_graph(rng, n, 0.1, 10.0);
      auto cw = graph_to_chain(g);
      auto sg = stationary_and_gap(cw.chain);
      for (int t = 1; t <= 5; ++t) {
        // disjoint-support distributions
        int split = 1 + static_cast<int>(rng.below(n - 1));
        RVector sigma = RVector::Zero(n), nu = RVector::Zero(n);
        double ssum = 0, nsum = 0;
        for (int v = 0; v < n; ++v) {
          double u = rng.uniform(0.05, 1.0);
          if (v < split) {
            sigma[v] = u;
            ssum += u;
          } else {
            nu[v] = u;
            nsum += u;
          }
        }
        sigma /= ssum;
        nu /= nsum;
        double lhs = nu.cwiseAbs2().cwiseQuotient(sg.pi).sum();
        double rhs = 2.0 * spectral_resistance(cw.chain, sg.pi, sigma - nu, t);
        if (lhs > rhs + 1e-9) ++violations[i];
      }
    });
    int total = 0;
    for (int v : violations) total += v;
    double secs = seconds_since(t0);
    record(3, "lemma fraction-vs-eff-resistance", total == 0,
           std::to_string(total) + " violations over 100 chains x t in 1..5", secs);
  }

  // 4. Catalog golden values.
  void criterion4() {
    auto t0 = Clock::now();
    bool pass = true;
    std::ostringstream os;
    double worst_value = 0.0, worst_feas = 0.0;
    for (int n = 1; n <= 8 && pass; ++n) {
      auto fx = dense_learning(n);
      for (size_t x = 0; x < fx.expected_plus.size(); ++x) {
        worst_value = std::max(worst_value,
                               std::abs(fx.composed.plus_sizes[x] - double(n)));
        worst_value = std::max(worst_value,
                               std::abs(fx.composed.minus_sizes[x] - double(n)));
      }
      worst_feas = std::max(worst_feas, fx.composed.feasibility.max_violation);
    }
    if (worst_value > 1e-9) {
      pass = false;
      os << "dense_learning deviation " << worst_value << "; ";
    }
    for (int n = 2; n <= 16; ++n) {
      auto fx = minimum_finding(n, minimum_finding_inputs(n, 3));
      double h = 0.0;
      for (int j = 2; j <= n; ++j) h += 1.0 / (j - 1);
      for (size_t x = 0; x < fx.expected_plus.size(); ++x) {
        worst_value = std::max(worst_value,
                               std::abs(fx.composed.plus_sizes[x] - double(n)));
        worst_value = std::max(worst_value,
                               std::abs(fx.composed.minus_sizes[x] - h));
      }
      worst_feas = std::max(worst_feas, fx.composed.feasibility.max_violation);
    }
    {
      const int n = 32;
      Rng rng = fresh(4);
      std::vector<double> alpha, beta;
      for (int j = 1; j <= n; ++j) {
        alpha.push_back(1.0 / std::sqrt(double(j)));
        beta.push_back(std::sqrt(double(j)));
      }
      auto fx = first_marked_index(n, alpha, beta);
      for (int x = 0; x < n; ++x) {
        worst_value = std::max(
            worst_value, std::abs(fx.composed.plus_sizes[x] - fx.expected_plus[x]));
        worst_value = std::max(
            worst_value,
            std::abs(fx.composed.minus_sizes[x] - fx.expected_minus[x]));
      }
      worst_feas = std::max(worst_feas, fx.composed.feasibility.max_violation);

      std::vector<double> alpha2, beta2;
      for (int j = 1; j <= n; ++j) {
        alpha2.push_back(1.0 / j);
        beta2.push_back(1.0);
      }
      auto fx2 = first_marked_index(n, alpha2, beta2);
      for (int x = 0; x < n; ++x) {
        worst_value = std::max(
            worst_value,
            std::abs(fx2.composed.plus_sizes[x] - fx2.expected_plus[x]));
        worst_value = std::max(
            worst_value,
            std::abs(fx2.composed.minus_sizes[x] - fx2.expected_minus[x]));
      }
      worst_feas = std::max(worst_feas, fx2.composed.feasibility.max_violation);
      (void)rng;
    }
    pass = worst_value <= 1e-9 && worst_feas <= 1e-8;
    os << "worst closed-form deviation " << worst_value << ", worst feasibility "
       << worst_feas;
    record(4, "catalog golden values", pass, os.str(), seconds_since(t0));
  }

  // 5. Feasibility end to end plus corrupted-witness probes.
  void criterion5() {
    auto t0 = Clock::now();
    double worst = 0.0;
    double weakest_probe = std::numeric_limits<double>::infinity();
    Rng rng = fresh(5);
    // A 10% corruption of one witness must be flagged. Scaling perturbs the
    // cross constraints in proportion to the Gram targets, so the detected
    // violation is 0.1 times the largest target the input participates in.
    auto probe = [&](const StateReflectionProblem& r, const WitnessFamily& w) {
      if (w.w_plus.empty()) return;
      double best = 0.0;
      for (int x = 0; x < static_cast<int>(w.w_plus.size()); ++x) {
        {
          WitnessFamily c = w;
          c.w_plus[x] *= 1.1;
          best = std::max(best, check_feasibility(r, c, 1e-8).max_violation);
        }
        {
          WitnessFamily c = w;
          c.w_minus[x] *= 1.1;
          best = std::max(best, check_feasibility(r, c, 1e-8).max_violation);
        }
      }
      weakest_probe = std::min(weakest_probe, best);
    };

    // to_reflection on random conversion fixtures
    for (int trial = 0; trial < 5; ++trial) {
      auto fx = random_conversion_fixture(rng, 2 + trial % 3, 2 + trial % 2, 2);
      auto rw = to_reflection(fx.problem, fx.witnesses);
      worst = std::max(worst,
                       check_feasibility(rw.problem, rw.witnesses, 1e-8)
                           .max_violation);
      probe(rw.problem, rw.witnesses);
    }
    // span_to_hyperedge and database_hyperedge
    {
      auto hw = single_query_edge({"a", "b", "c"}, {true, false, true});
      worst = std::max(worst,
                       check_feasibility(hw.problem, hw.witnesses, 1e-8)
                           .max_violation);
      probe(hw.problem.as_reflection(), hw.witnesses);

      RMatrix t(3, 3);
      t << 0, 1, 1, 1, 0, 0, 1, 0, 0;  // outputs: A B B
      auto recipe = prescribed_gram_witnesses(rng, t);
      auto db = database_hyperedge_from_conversion(
          {"x0", "x1", "x2"}, {"bot", "bot", "bot"}, {"outA", "outB", "outB"},
          recipe.oracles, recipe.witnesses);
      worst = std::max(worst,
                       check_feasibility(db.problem, db.witnesses, 1e-8)
                           .max_violation);
      probe(db.problem.as_reflection(), db.witnesses);

      // known_fraction_rescale driven end to end: witnesses for the
      // unit-norm problem |bot> +- |psi_x> come from the conversion fixture
      // sigma = |bot>, tau = |psi_x>, then the diagonal recovery produces the
      // hyperedge form
      const int nv = 5;
      RVector pi(nv);
      pi << 0.1, 0.2, 0.3, 0.25, 0.15;
      std::vector<std::vector<int>> msets = {{0, 1}, {1, 0}, {2}};
      const double eps = 0.3;
      StateConversionProblem cp;
      RMatrix targets(3, 3);
      std::vector<CVector> psis;
      for (int x = 0; x < 3; ++x) {
        CVector psi = CVector::Zero(nv);
        for (int v : msets[x]) psi[v] = std::sqrt(pi[v] / eps);
        psis.push_back(psi);
      }
      for (int x = 0; x < 3; ++x) {
        for (int y = 0; y < 3; ++y) {
          targets(x, y) = x == y ? 0.0 : 1.0 - psis[x].dot(psis[y]).real();
        }
      }
      auto kf_recipe = prescribed_gram_witnesses(rng, targets);
      for (int x = 0; x < 3; ++x) {
        cp.domain.push_back("x" + std::to_string(x));
        CVector bot = CVector::Zero(1);
        bot[0] = 1.0;
        cp.sigma.push_back(bot);
        cp.tau.push_back(psis[x]);
        cp.oracle.push_back(kf_recipe.oracles[x]);
      }
      auto rw = to_reflection(cp, kf_recipe.witnesses);
      // states |bot> +- |psi> carry norm sqrt(2)
      auto unitized = rescale(rw.problem, rw.witnesses,
                              CMatrix(CMatrix::Identity(nv + 1, nv + 1)),
                              std::sqrt(2.0), std::sqrt(2.0));
      std::vector<std::string> labels;
      for (int v = 0; v < nv; ++v) labels.push_back("u" + std::to_string(v));
      auto kfr = known_fraction_rescale(labels, pi, eps, msets,
                                        unitized.problem.oracle,
                                        unitized.witnesses);
      worst = std::max(worst,
                       check_feasibility(kfr.problem, kfr.witnesses, 1e-8)
                           .max_violation);
      probe(kfr.problem.as_reflection(), kfr.witnesses);

      // fraction-mode finding end to end, including the recovered states
      RVector tau = RVector::Constant(4, 0.25);
      RVector sigma = RVector::Constant(4, 0.25);
      std::vector<std::vector<int>> marked = {{0}, {1}, {2}};
      auto q2 = random_concrete_instance(rng, 4, 2, 3, false, &marked);
      auto fres = build_finding(q2, sigma, tau, FindingMode::kFraction, 0.25);
      worst = std::max(worst, fres.composed->feasibility.max_violation);
      worst = std::max(worst,
                       check_feasibility(fres.recovered->problem,
                                         fres.recovered->witnesses, 1e-8)
                           .max_violation);
      probe(fres.recovered->problem, fres.recovered->witnesses);
    }
    // compose on catalog fixtures
    {
      auto fx = dense_learning(3);
      worst = std::max(worst, fx.composed.feasibility.max_violation);
      probe(fx.composed.boundary_problem.as_reflection(), fx.composed.witnesses);
      auto fm = first_marked_index(4, {1, 1, 1, 1}, {1, 1, 1, 1});
      worst = std::max(worst, fm.composed.feasibility.max_violation);
      auto mf = minimum_finding(4, minimum_finding_inputs(4, 2));
      worst = std::max(worst, mf.composed.feasibility.max_violation);
    }
    // tree_to_composition
    {
      DecisionTree t;
      t.nodes.resize(4);
      t.nodes[0].query = 0;
      for (int c = 0; c < 3; ++c) {
        t.nodes[0].children[std::to_string(c)] = c + 1;
        t.nodes[c + 1].query = -1;
        t.nodes[c + 1].output = std::to_string(c);
      }
      auto res = wdt(t);
      auto comp = tree_to_composition(t, res.scheme, {{"0"}, {"1"}, {"2"}});
      worst = std::max(worst, comp.composed.feasibility.max_violation);
      probe(comp.composed.boundary_problem.as_reflection(),
            comp.composed.witnesses);
    }
    // build_detection concrete mode
    {
      auto q = random_concrete_instance(rng, 5, 2, 4);
      RVector sigma = RVector::Zero(5);
      sigma[0] = 0.5;
      sigma[1] = 0.5;
      RVector tau = RVector::Constant(5, 0.2);
      auto det = build_detection(q, sigma, tau);
      worst = std::max(worst, det.composed->feasibility.max_violation);
      probe(det.composed->boundary_problem.as_reflection(),
            det.composed->witnesses);
    }
    std::ostringstream os;
    os << "max Gram violation " << worst << "; weakest corrupted-witness probe "
       << weakest_probe;
    record(5, "constructor feasibility end-to-end",
           worst <= 1e-8 && weakest_probe >= 1e-2, os.str(), seconds_since(t0));
  }

  struct TransducerFixture {
    std::string name;
    StateReflectionProblem problem;
    WitnessFamily witnesses;
  };

  std::vector<TransducerFixture> transducer_fixtures() {
    std::vector<TransducerFixture> out;
    Rng rng = fresh(6);
    for (int trial = 0; trial < 3; ++trial) {
      auto fx = random_conversion_fixture(rng, 2 + trial, 2, 1 + trial % 2);
      auto rw = to_reflection(fx.problem, fx.witnesses);
      out.push_back({"conversion" + std::to_string(trial), rw.problem,
                     rw.witnesses});
    }
    {
      auto hw = single_query_edge({"a", "b"}, {true, false});
      out.push_back({"single_query", hw.problem.as_reflection(), hw.witnesses});
    }
    {
      auto fx = dense_learning(2);
      out.push_back({"dense_learning2",
                     fx.composed.boundary_problem.as_reflection(),
                     fx.composed.witnesses});
    }
    {
      auto fx = first_marked_index(3, {1, 0.5, 2}, {1, 2, 0.5});
      out.push_back({"first_marked3",
                     fx.composed.boundary_problem.as_reflection(),
                     fx.composed.witnesses});
    }
    return out;
  }

  // 6. Transducer exactness and catalyst minimality.
  void criterion6() {
    auto t0 = Clock::now();
    double worst_resid = 0.0, worst_min = 0.0;
    for (const auto& fx : transducer_fixtures()) {
      auto t = build_reflection(fx.problem, fx.witnesses, 1e-8);
      for (int x = 0; x < fx.problem.size(); ++x) {
        auto rep = verify_transduction(
            t, fx.problem.oracle[x], fx.problem.sigma_plus[x],
            fx.problem.sigma_minus[x], fx.witnesses.w_plus[x],
            fx.witnesses.w_minus[x], 1e-9);
        worst_resid = std::max(worst_resid,
                               std::max(rep.plus_residual, rep.minus_residual));
        auto folded = fold_oracle(t, fx.problem.oracle[x]);
        auto plus = transduce_solve(folded, fx.problem.sigma_plus[x]);
        worst_min = std::max(
            worst_min, plus.w_min.norm() - fx.witnesses.w_plus[x].norm());
        auto minus = transduce_solve(folded, fx.problem.sigma_minus[x]);
        worst_min = std::max(
            worst_min, minus.w_min.norm() - fx.witnesses.w_minus[x].norm());
      }
    }
    std::ostringstream os;
    os << "worst transduction residual " << worst_resid
       << "; worst catalyst excess " << worst_min;
    record(6, "transducer exactness", worst_resid <= 1e-9 && worst_min <= 1e-9,
           os.str(), seconds_since(t0));
  }

  // 7. Decision-tree SDP battery.
  void criterion7() {
    auto t0 = Clock::now();
    Rng rng = fresh(7);
    double worst_binary = 0.0, worst_gap = 0.0, worst_bt20 = 0.0,
           worst_tree = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      RVector w(2);
      w << rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0);
      auto sol = solve_node_sdp(w);
      worst_binary = std::max(worst_binary,
                              std::abs(sol.w - binary_analytic(w[0], w[1]).w));
      worst_gap = std::max(worst_gap, sol.gap);
    }
    // random colored trees of depth <= 6
    for (int trial = 0; trial < 6; ++trial) {
      DecisionTree t;
      int max_depth = 2 + static_cast<int>(rng.below(5));
      std::function<int(int)> build = [&](int depth) -> int {
        int id = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        if (depth >= max_depth || (depth > 0 && rng.uniform() < 0.3)) {
          t.nodes[id].query = -1;
          t.nodes[id].output = "o" + std::to_string(id);
          return id;
        }
        t.nodes[id].query = depth;
        int k = 2 + static_cast<int>(rng.below(2));
        int black = static_cast<int>(rng.below(k + 1));  // k means none
        for (int c = 0; c < k; ++c) {
          int cid = build(depth + 1);
          std::string sym = std::to_string(c);
          t.nodes[id].children[sym] = cid;
          t.nodes[id].colors[sym] = (c == black) ? "black" : "red";
        }
        return id;
      };
      build(0);
      if (t.is_leaf(t.root)) continue;
      auto scheme = bt20_scheme(t);
      auto rep = validate_scheme(t, scheme, 1e-8);
      if (!rep.valid) worst_bt20 = std::max(worst_bt20, 1.0);
      double depth = t.depth();
      double red = std::max(1, t.max_red());
      worst_bt20 = std::max(
          worst_bt20, scheme.weight[t.root] - 3.0 * std::sqrt(red * depth));
      // optimal scheme: bracket gaps already asserted inside solve_node_sdp
      auto opt = wdt(t);
      worst_gap = std::max(worst_gap, 0.0);
      if (opt.root_weight > scheme.weight[t.root] + 1e-6) {
        worst_bt20 = std::max(worst_bt20, opt.root_weight - scheme.weight[t.root]);
      }
    }
    // tree_to_composition sizes <= 2 w_root per input
    {
      DecisionTree t;
      t.nodes.resize(1);
      t.nodes[0].query = 0;
      // ternary root with two binary children
      t.nodes[0].children = {{"0", 1}, {"1", 2}, {"2", 3}};
      t.nodes.resize(4 + 4);
      t.nodes[1].query = 1;
      t.nodes[1].children = {{"0", 4}, {"1", 5}};
      t.nodes[2].query = 1;
      t.nodes[2].children = {{"0", 6}, {"1", 7}};
      t.nodes[3].query = -1;
      t.nodes[3].output = "stop";
      for (int id = 4; id < 8; ++id) {
        t.nodes[id].query = -1;
        t.nodes[id].output = "o" + std::to_string(id);
      }
      auto res = wdt(t);
      std::vector<std::vector<std::string>> inputs;
      for (const char* a : {"0", "1", "2"}) {
        for (const char* b : {"0", "1"}) {
          inputs.push_back({a, b});
        }
      }
      auto comp = tree_to_composition(t, res.scheme, inputs);
      for (size_t x = 0; x < inputs.size(); ++x) {
        worst_tree = std::max(worst_tree, comp.composed.plus_sizes[x] -
                                              2.0 * comp.root_weight);
        worst_tree = std::max(worst_tree, comp.composed.minus_sizes[x] -
                                              2.0 * comp.root_weight);
      }
      worst_tree = std::max(worst_tree,
                            comp.composed.feasibility.max_violation - 1e-8);
    }
    std::ostringstream os;
    os << "binary vs analytic " << worst_binary << ", worst gap " << worst_gap
       << ", bt20 excess " << worst_bt20 << ", tree excess " << worst_tree;
    record(7, "decision-tree weighting SDP",
           worst_binary <= 1e-6 && worst_gap <= 1e-6 && worst_bt20 <= 1e-6 &&
               worst_tree <= 1e-6,
           os.str(), seconds_since(t0));
  }

  // 8. QWalk formula-vs-composition, negative size, MNRS fuzz, t-sweep.
  void criterion8() {
    auto t0 = Clock::now();
    std::vector<double> devs(25, 0.0), feas(25, 0.0);
    parallel_trials(25, jobs, [&](int i) {
      Rng rng = fresh(8, i);
      int nv = 3 + static_cast<int>(rng.below(6));       // <= 8
      int ns = 1 + static_cast<int>(rng.below(3));       // <= 3
      int ni = 2 + static_cast<int>(rng.below(5));       // <= 6
      auto q = random_concrete_instance(rng, nv, ns, ni);
      RVector sigma = RVector::Zero(nv);
      int ssup = 1 + static_cast<int>(rng.below(nv));
      for (int v = 0; v < ssup; ++v) sigma[v] = rng.uniform(0.2, 1.0);
      sigma /= sigma.sum();
      RVector tau(nv);
      for (int v = 0; v < nv; ++v) tau[v] = rng.uniform(0.2, 1.0);
      tau /= tau.sum();
      auto det = build_detection(q, sigma, tau);
      feas[i] = det.composed->feasibility.max_violation;
      double dev = 0.0;
      for (int x = 0; x < ni; ++x) {
        if (!q.marked[x].empty()) {
          dev = std::max(dev, std::abs(det.composed->plus_sizes[x] -
                                       det.report.plus[x]) /
                                  std::max(1.0, det.report.plus[x]));
        } else {
          dev = std::max(dev, std::abs(det.composed->minus_sizes[x] -
                                       det.report.minus[x]) /
                                  std::max(1.0, det.report.minus[x]));
        }
      }
      devs[i] = dev;
    });
    double worst_dev = 0.0, worst_feas = 0.0;
    for (int i = 0; i < 25; ++i) {
      worst_dev = std::max(worst_dev, devs[i]);
      worst_feas = std::max(worst_feas, feas[i]);
    }

    // unit-cost negative size <= 3 on the same graph family
    double worst_neg = 0.0;
    {
      Rng rng = fresh(8, 1000);
      for (int trial = 0; trial < 10; ++trial) {
        int nv = 3 + static_cast<int>(rng.below(6));
        QWalkInstance q;
        q.graph = random_connected_graph(rng, nv, 0.5, 4.0);
        for (auto& e : q.graph.edges) e.r = std::max(e.r, 0.1);
        normalize_instance(&q);
        q.domain = {"pos", "neg"};
        q.marked = {{0}, {}};
        q.alphabet = {"D0"};
        q.database.assign(nv, std::vector<int>(2, 0));
        q.setup_plus = RMatrix::Ones(nv, 2);
        q.setup_minus = RMatrix::Ones(nv, 2);
        q.update_plus = RMatrix::Ones(q.graph.m(), 2);
        q.update_minus = RMatrix::Ones(q.graph.m(), 2);
        q.check_plus.assign(nv, RMatrix::Ones(1, 2));
        q.check_minus.assign(nv, RMatrix::Ones(1, 2));
        auto chain = graph_to_chain(q.graph);
        RVector sigma = chain.pi;
        RVector tau = (sigma + chain.pi) / 2.0;
        auto det = build_detection(q, sigma, tau);
        worst_neg = std::max(worst_neg, det.report.minus[1]);
      }
    }

    // MNRS inequality fuzz
    int mnrs_fail = 0;
    {
      std::vector<int> fails(50, 0);
      parallel_trials(50, jobs, [&](int i) {
        Rng rng = fresh(8, 2000 + i);
        int nv = 3 + static_cast<int>(rng.below(6));
        auto q = random_concrete_instance(rng, nv, 2, 3);
        auto rep = mnrs_bounds(q);
        fails[i] = rep.inequality_holds ? 0 : 1;
      });
      for (int f : fails) mnrs_fail += f;
    }

    // t-sweep domination
    bool sweep_ok = true;
    {
      Rng rng = fresh(8, 3000);
      for (int trial = 0; trial < 3; ++trial) {
        auto q = random_concrete_instance(rng, 5, 2, 4);
        RVector sigma = RVector::Constant(5, 0.2);
        for (int t = 1; t <= 5; ++t) {
          auto b = unified_bound_on_instance(q, sigma, t);
          if (!b.chain_ok) sweep_ok = false;
        }
      }
    }

    std::ostringstream os;
    os << "formula-vs-composed worst relative deviation " << worst_dev
       << ", worst feasibility " << worst_feas << ", unit-cost negative "
       << worst_neg << ", mnrs failures " << mnrs_fail << ", t-sweep "
       << (sweep_ok ? "dominates" : "fails");
    record(8, "qwalk formula-vs-composition",
           worst_dev <= 1e-8 && worst_feas <= 1e-8 && worst_neg <= 3.0 + 1e-9 &&
               mnrs_fail == 0 && sweep_ok,
           os.str(), seconds_since(t0));
  }

  // 9. Emulation experiment (partly report-only).
  void criterion9() {
    auto t0 = Clock::now();
    const std::vector<int> ks = {1, 4, 16, 64};
    std::vector<std::vector<double>> errors(ks.size());
    bool finite = true, k1_ok = true;
    double worst_vs_bound = 0.0;  // reported, not asserted
    for (const auto& fx : transducer_fixtures()) {
      auto t = build_reflection(fx.problem, fx.witnesses, 1e-8);
      for (int x = 0; x < fx.problem.size(); ++x) {
        for (size_t ki = 0; ki < ks.size(); ++ki) {
          auto res = emulate(t, fx.problem.oracle[x], fx.problem.sigma_plus[x],
                             ks[ki]);
          if (!std::isfinite(res.error)) finite = false;
          errors[ki].push_back(res.error);
          if (ks[ki] == 1 && res.error > 2.0 * res.catalyst_norm + 1e-9) {
            k1_ok = false;
          }
          worst_vs_bound = std::max(worst_vs_bound, res.error - res.bound);
        }
      }
    }
    std::vector<double> medians;
    for (auto& e : errors) {
      std::sort(e.begin(), e.end());
      medians.push_back(e[e.size() / 2]);
    }
    bool monotone = true;
    for (size_t i = 1; i < medians.size(); ++i) {
      if (medians[i] > medians[i - 1] + 1e-12) monotone = false;
    }
    std::ostringstream os;
    os << "median errors over K in {1,4,16,64}: ";
    for (double m : medians) os << m << " ";
    os << "; measured-minus-2||w||/sqrt(K) worst " << worst_vs_bound
       << " (reported, not asserted)";
    record(9, "emulation experiment", finite && monotone && k1_ok, os.str(),
           seconds_since(t0), /*report_only=*/false);
  }
};

}  // namespace

std::vector<CriterionResult> run_selftest(std::uint64_t seed, int jobs) {
  auto run_once = [&] {
    Battery b{seed, jobs, {}};
    b.criterion1();
    b.criterion2();
    b.criterion3();
    b.criterion4();
    b.criterion5();
    b.criterion6();
    b.criterion7();
    b.criterion8();
    b.criterion9();
    return b.results;
  };
  auto t0 = Clock::now();
  auto first = run_once();
  std::string bytes1 = selftest_to_json(first, seed).dump();
  auto second = run_once();
  std::string bytes2 = selftest_to_json(second, seed).dump();
  double total = seconds_since(t0);
  bool identical = bytes1 == bytes2;
  bool fast = total < 300.0;
  // the detail must stay byte-stable itself, so the measured time lives in
  // the seconds field only
  std::string detail = identical ? "byte-identical reports across two runs"
                                 : "reports differ between runs";
  if (!fast) detail += "; runtime budget of 300 s exceeded";
  first.push_back({10, "determinism and runtime", identical && fast, false,
                   detail, total});
  return first;
}

JsonNode selftest_to_json(const std::vector<CriterionResult>& results,
                          std::uint64_t seed) {
  JsonNode out = JsonNode::object();
  out.set("seed", static_cast<double>(seed));
  JsonNode arr = JsonNode::array();
  bool all = true;
  for (const auto& r : results) {
    JsonNode item = JsonNode::object();
    item.set("id", r.id);
    item.set("name", r.name);
    item.set("pass", r.pass);
    if (r.report_only) item.set("report_only", true);
    item.set("detail", r.detail);
    arr.push(std::move(item));
    all = all && r.pass;
  }
  out.set("criteria", std::move(arr));
  out.set("all_pass", all);
  return out;
}

}  // namespace ggc
