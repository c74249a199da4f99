#include <benchmark/benchmark.h>

#include "ggc/catalog.hpp"
#include "ggc/composition.hpp"
#include "ggc/dectree.hpp"
#include "ggc/markov.hpp"
#include "ggc/numerics.hpp"

namespace {

using namespace ggc;

WeightedGraph bench_graph(int n) {
  Rng rng(0xbe9c4);
  WeightedGraph g;
  for (int v = 0; v < n; ++v) g.add_vertex("v" + std::to_string(v));
  for (int v = 1; v < n; ++v) {
    g.edges.push_back({static_cast<int>(rng.below(v)), v, rng.uniform(0.2, 5.0)});
  }
  for (int i = 0; i < n; ++i) {
    int u = static_cast<int>(rng.below(n)), w = static_cast<int>(rng.below(n));
    if (u != w) g.edges.push_back({u, w, rng.uniform(0.2, 5.0)});
  }
  return g;
}

void bm_hermitian_eig(benchmark::State& state) {
  Rng rng(1);
  CMatrix m = random_hermitian(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hermitian_eig(m));
  }
}
BENCHMARK(bm_hermitian_eig)->Arg(32)->Arg(96);

void bm_resistance(benchmark::State& state) {
  auto g = bench_graph(static_cast<int>(state.range(0)));
  Rng rng(2);
  RVector xi = random_rvector(rng, g.n());
  xi.array() -= xi.mean();
  for (auto _ : state) {
    benchmark::DoNotOptimize(resistance(g, NetFlow{xi}));
  }
}
BENCHMARK(bm_resistance)->Arg(20)->Arg(60);

void bm_node_sdp(benchmark::State& state) {
  Rng rng(3);
  RVector w(static_cast<int>(state.range(0)));
  for (int i = 0; i < w.size(); ++i) w[i] = rng.uniform(0.0, 5.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_node_sdp(w));
  }
}
BENCHMARK(bm_node_sdp)->Arg(2)->Arg(4)->Arg(8);

void bm_dense_learning_compose(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(dense_learning(static_cast<int>(state.range(0))));
  }
}
BENCHMARK(bm_dense_learning_compose)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
