#include <benchmark/benchmark.h>

#include <map>

#include "protoseg/elbow.hpp"
#include "protoseg/fit.hpp"
#include "support/support.hpp"

namespace {

using namespace protoseg;

const testing::PlantedData& planted(std::size_t n) {
  static std::map<std::size_t, testing::PlantedData> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, testing::planted_clusters(6, n, 99)).first;
  return it->second;
}

void BM_Assign(benchmark::State& state) {
  const auto& data = planted(static_cast<std::size_t>(state.range(0))).data;
  FitConfig cfg;
  cfg.k = 6;
  const double gamma = resolve_gamma(data, cfg).value;
  const auto protos = init_prototypes(data, cfg, 0, gamma);
  for (auto _ : state) benchmark::DoNotOptimize(assign(data, protos, gamma));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_Assign)->Arg(3000)->Arg(30000)->Arg(300000);

void BM_Fit(benchmark::State& state) {
  const auto& data = planted(static_cast<std::size_t>(state.range(0))).data;
  FitConfig cfg;
  cfg.k = 6;
  cfg.restarts = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fit(data, cfg).total_cost);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_Fit)->Arg(3000)->Arg(30000)->Unit(benchmark::kMillisecond);

void BM_ElbowScan(benchmark::State& state) {
  const auto& data = planted(3000).data;
  FitConfig cfg;
  cfg.restarts = 3;
  for (auto _ : state) benchmark::DoNotOptimize(elbow_scan(data, 2, 14, cfg, state.range(0) != 0).gamma);
}
BENCHMARK(BM_ElbowScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
