#include <benchmark/benchmark.h>

#include "queue_poa/queue_system.hpp"
#include "queue_poa/simulator.hpp"

using namespace queue_poa;

static sim::SimConfig config(std::uint64_t arrivals) {
  sim::SimConfig c;
  c.horizon_events = arrivals;
  c.warmup_events = arrivals / 100;
  c.replications = 2;
  c.threads = 1;
  return c;
}

static void BM_SimulateLoss(benchmark::State& state) {
  const auto h = IntensityFunction::log_shift();
  const auto cfg = config(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sim::simulate_loss(h, {5, 1, 1, 1}, 3.0, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) * cfg.replications);
}
BENCHMARK(BM_SimulateLoss)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_SimulateQueue(benchmark::State& state) {
  const queue::QueueParams p{1.0, {6.5, 1, 1, 1}};
  const auto x = queue::equilibrium_thresholds(p);
  const auto cfg = config(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sim::simulate_queue(p, x, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) * cfg.replications);
}
BENCHMARK(BM_SimulateQueue)->Arg(100000)->Unit(benchmark::kMillisecond);
