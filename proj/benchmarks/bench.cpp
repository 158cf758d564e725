#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "gsna/analysis.hpp"
#include "gsna/centrality.hpp"
#include "gsna/geo.hpp"
#include "gsna/graph.hpp"

namespace {

gsna::DirectedGraph random_digraph(std::size_t n, double avg_out_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double p = avg_out_degree / static_cast<double>(n - 1);
  std::bernoulli_distribution edge(p);
  gsna::GraphBuilder b(n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t)
      if (s != t && edge(rng))
        b.add_edge(static_cast<gsna::NodeId>(s), static_cast<gsna::NodeId>(t));
  return b.build();
}

std::vector<gsna::GeoPoint> random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lat(34.0, 72.0), lon(-25.0, 45.0);
  std::vector<gsna::GeoPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(gsna::make_point(lat(rng), lon(rng)));
  return pts;
}

void betweenness(benchmark::State& state) {
  const auto g = random_digraph(static_cast<std::size_t>(state.range(0)), 8.0, 42);
  for (auto _ : state) benchmark::DoNotOptimize(gsna::betweenness_centrality(g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(betweenness)->Arg(64)->Arg(256)->Arg(1024)->Complexity()->Unit(benchmark::kMillisecond);

void gi_star(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto pts = random_points(n, 7);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> val(0.0, 100.0);
  std::vector<double> values(n);
  for (double& v : values) v = val(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(gsna::getis_ord_gi_star(values, pts, 30));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(gi_star)->Arg(256)->Arg(1024)->Arg(4096)->Complexity()->Unit(benchmark::kMillisecond);

void hex_assignment(benchmark::State& state) {
  const gsna::HexGrid grid(80000.0);
  const auto pts = random_points(100000, 9);
  for (auto _ : state) {
    for (const gsna::GeoPoint& p : pts) benchmark::DoNotOptimize(grid.cell_for_point(p));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(pts.size()));
}
BENCHMARK(hex_assignment);

}  // namespace

BENCHMARK_MAIN();
