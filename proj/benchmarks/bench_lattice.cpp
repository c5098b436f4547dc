#include <benchmark/benchmark.h>

#include "mlpark/lattice.hpp"
#include "mlpark/random.hpp"
#include "mlpark/simulator.hpp"

namespace {

using namespace mlpark;

void BM_Deposit(benchmark::State& state) {
  const auto n = static_cast<SiteIndex>(state.range(0));
  const std::uint64_t m = 600;
  auto rng = replication_stream(1, 0);
  const auto arrivals = sample_arrivals_fixed_count(n, m, rng);
  LatticeState lattice(LatticeConfig{n});
  for (auto _ : state) {
    lattice.reset();
    for (SiteIndex x : arrivals) benchmark::DoNotOptimize(lattice.deposit(x));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m));
}
BENCHMARK(BM_Deposit)->Arg(3)->Arg(9)->Arg(25)->Arg(101);

void BM_DeepColumn(benchmark::State& state) {
  // Single site: every arrival stacks one layer higher.
  const auto m = static_cast<std::uint64_t>(state.range(0));
  LatticeState lattice(LatticeConfig{1});
  for (auto _ : state) {
    lattice.reset();
    for (std::uint64_t i = 0; i < m; ++i) benchmark::DoNotOptimize(lattice.deposit(0));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m));
}
BENCHMARK(BM_DeepColumn)->Arg(600)->Arg(60000);

}  // namespace
