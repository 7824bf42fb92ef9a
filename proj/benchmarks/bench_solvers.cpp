#include <benchmark/benchmark.h>

#include "queue_poa/asymptotics.hpp"
#include "queue_poa/loss_system.hpp"
#include "queue_poa/queue_system.hpp"

using namespace queue_poa;

static void BM_LossPriceOfAnarchy(benchmark::State& state) {
  const auto h = IntensityFunction::power_law(1.0, 0.5);
  const double x_e = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(loss::price_of_anarchy(h, 1.0, 1.0, x_e));
}
BENCHMARK(BM_LossPriceOfAnarchy)->Arg(1)->Arg(1000)->Arg(1000000);

static void BM_ClassifyLimit(benchmark::State& state) {
  const auto h = IntensityFunction::log_shift();
  for (auto _ : state) benchmark::DoNotOptimize(asymptotics::classify_limit(h));
}
BENCHMARK(BM_ClassifyLimit)->Unit(benchmark::kMillisecond);

static void BM_ClassifyLimitOscillating(benchmark::State& state) {
  const auto h = IntensityFunction::staircase();
  for (auto _ : state) benchmark::DoNotOptimize(asymptotics::classify_limit(h));
}
BENCHMARK(BM_ClassifyLimitOscillating)->Unit(benchmark::kMillisecond);

static void BM_QueueOptimize(benchmark::State& state) {
  const double R = static_cast<double>(state.range(0)) + 0.5;
  const queue::QueueParams p{1.0, {R, 1.0, 1.0, 1.0}};
  for (auto _ : state) benchmark::DoNotOptimize(queue::optimize_social(p));
  state.counters["n_e"] = p.n_e();
}
BENCHMARK(BM_QueueOptimize)->Arg(2)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);
