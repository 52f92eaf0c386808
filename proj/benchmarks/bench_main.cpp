#include <benchmark/benchmark.h>

#include "robust_trade/block_mechanism.hpp"
#include "robust_trade/coupling.hpp"
#include "robust_trade/minimax.hpp"
#include "robust_trade/posted_price.hpp"

namespace {

using namespace robust_trade;

const auto kBuyer = MarginalDistribution::uniform(0, 1);
const auto kSeller = MarginalDistribution::uniform(0, 0.5);

void BM_Optimize(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(optimize(kBuyer, kSeller));
}
BENCHMARK(BM_Optimize)->Unit(benchmark::kMillisecond);

void BM_OracleMin(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto b = kBuyer.discretize(n);
  const auto s = kSeller.discretize(n);
  const auto q = posted_price_allocation(b.points, s.points, {0.5});
  for (auto _ : state) benchmark::DoNotOptimize(min_expected_gains(b, s, q));
}
BENCHMARK(BM_OracleMin)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_BlockPipeline(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const AllocationRule q = [](double v, double c) { return (v > 0.5 && c < 0.5) ? 1.0 : 0.0; };
  for (auto _ : state) {
    const auto m = build_block_mechanism(q, n);
    benchmark::DoNotOptimize(project_to_bb(m));
  }
}
BENCHMARK(BM_BlockPipeline)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Minimax(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(minimax(kBuyer, kSeller, 400, {1, 2, 4, 8, 16}));
}
BENCHMARK(BM_Minimax)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
