#include <benchmark/benchmark.h>

#include "mlpark/simulator.hpp"

namespace {

using namespace mlpark;

void BM_RunFixedArrivals(benchmark::State& state) {
  RunConfig c;
  c.n_sites = 3;
  c.mode = FixedArrivals{600};
  c.replications = static_cast<std::uint64_t>(state.range(0));
  c.max_layer = 10;
  c.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run(c));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * c.replications * 600));
}
BENCHMARK(BM_RunFixedArrivals)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_RunFixedTime(benchmark::State& state) {
  RunConfig c;
  c.n_sites = static_cast<SiteIndex>(state.range(0));
  c.mode = FixedTime{2.0};
  c.replications = 10000;
  c.max_layer = 6;
  c.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run(c));
}
BENCHMARK(BM_RunFixedTime)->Arg(3)->Arg(25)->Unit(benchmark::kMillisecond);

}  // namespace
