#include <benchmark/benchmark.h>

#include "mlpark/analytic.hpp"

namespace {

using namespace mlpark;

void BM_EndDensity(benchmark::State& state) {
  const auto r = static_cast<LayerIndex>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(end_density(r));
}
BENCHMARK(BM_EndDensity)->Arg(10)->Arg(200)->Arg(1000);

void BM_DensitySymbolic(benchmark::State& state) {
  const auto r = static_cast<LayerIndex>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(density_symbolic(r));
}
BENCHMARK(BM_DensitySymbolic)->Arg(4)->Arg(20)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_DensityTimeCached(benchmark::State& state) {
  const auto r = static_cast<LayerIndex>(state.range(0));
  (void)density_time(r, 1.0);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(density_time(r, t));
    t = t > 10.0 ? 0.0 : t + 0.01;
  }
}
BENCHMARK(BM_DensityTimeCached)->Arg(4)->Arg(50);

void BM_LimitDiagnostics(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(limit_diagnostics(200));
}
BENCHMARK(BM_LimitDiagnostics)->Unit(benchmark::kMillisecond);

}  // namespace
