#include <benchmark/benchmark.h>

#include "queue_poa/intensity.hpp"

using queue_poa::IntensityFunction;

static void BM_ClosedFormIntegrals(benchmark::State& state) {
  const auto h = IntensityFunction::log_shift();
  double x = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(h.scaled_integrals(x));
    x = x < 1e6 ? x * 1.7 : 1.0;
  }
}
BENCHMARK(BM_ClosedFormIntegrals);

static void BM_QuadratureIntegrals(benchmark::State& state) {
  const auto h = IntensityFunction::sinusoidal_offset(2.0, 1.0);
  const double x = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(h.cumulative_by_quadrature(x));
    benchmark::DoNotOptimize(h.first_moment_by_quadrature(x));
  }
}
BENCHMARK(BM_QuadratureIntegrals)->Arg(10)->Arg(1000)->Arg(100000);

static void BM_InverseCumulative(benchmark::State& state) {
  const auto h = IntensityFunction::table({{0, 1}, {2, 4}, {5, 0.5}, {9, 2}});
  const double total = h.cumulative(10.0);
  double u = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(h.inverse_cumulative(u * total, 10.0));
    u = u < 0.9 ? u + 0.013 : 0.1;
  }
}
BENCHMARK(BM_InverseCumulative);
