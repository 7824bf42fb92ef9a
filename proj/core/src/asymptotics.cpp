#include "queue_poa/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace queue_poa::asymptotics {

namespace {

constexpr double kDivergenceLevel = 1e3;
constexpr double kConvergenceSpread = 1e-2;
constexpr double kSettledSpread = 1e-6;
constexpr double kOscillationAmplitude = 0.1;
constexpr double kFiniteMassGrowth = 1e-6;

// Three-point polynomial extrapolation to u = 0 (Neville).
double extrapolate_to_zero(const std::array<double, 3>& u, const std::array<double, 3>& v) {
  double p01 = (u[0] * v[1] - u[1] * v[0]) / (u[0] - u[1]);
  double p12 = (u[1] * v[2] - u[2] * v[1]) / (u[1] - u[2]);
  return (u[0] * p12 - u[2] * p01) / (u[0] - u[2]);
}

struct WindowStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

WindowStats stats(std::span<const double> values) {
  WindowStats s{values.front(), values.front(), 0.0};
  for (double v : values) {
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
    s.mean += v;
  }
  s.mean /= static_cast<double>(values.size());
  return s;
}

bool oscillates(std::vector<LimitSample> merged) {
  std::sort(merged.begin(), merged.end(),
            [](const LimitSample& a, const LimitSample& b) { return a.x < b.x; });
  double running = 0.0;
  int last_sign = 0;
  int changes = 0;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    running += merged[i].ratio;
    const double mean = running / static_cast<double>(i + 1);
    const double deviation = merged[i].ratio - mean;
    if (std::abs(deviation) <= kOscillationAmplitude * std::abs(mean)) continue;
    const int sign = deviation > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++changes;
    last_sign = sign;
  }
  return changes >= 2;
}

}  // namespace

std::string_view to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::Converges:
      return "converges";
    case LimitKind::Diverges:
      return "diverges";
    case LimitKind::Oscillates:
      return "oscillates";
    case LimitKind::Undetermined:
      break;
  }
  return "undetermined";
}

double t99_ratio(const IntensityFunction& h, double x, const IntegralAccuracy& acc) {
  if (!(x > 0.0)) throw std::domain_error("t99_ratio: x must be positive");
  const ScaledIntegrals in = h.scaled_integrals(x, acc);
  if (!(in.cumulative > 0.0)) throw NumericalError("t99_ratio: h vanishes on [0, x]");
  return in.cumulative / (in.cumulative - in.first_moment / x);
}

double pano_ratio(const IntensityFunction& h, double x, const IntegralAccuracy& acc) {
  if (!(x > 0.0)) throw std::domain_error("pano_ratio: x must be positive");
  const double log_scale = h.scaled_integrals(x, acc).log_scale;
  std::vector<double> nodes = h.breakpoints(0.0, x);
  for (double& n : nodes) n /= x;
  auto profile = [&](double t) { return h.evaluate_scaled(x * t, log_scale); };
  const double whole = integrate(profile, 0.0, 1.0, acc, nodes);
  const double weighted =
      integrate([&](double t) { return (1.0 - t) * profile(t); }, 0.0, 1.0, acc, nodes);
  if (!(weighted > 0.0)) throw NumericalError("pano_ratio: h vanishes on [0, x]");
  return whole / weighted;
}

double tex_ratio(const IntensityFunction& h, double x) {
  if (!(x > 0.0)) throw std::domain_error("tex_ratio: x must be positive");
  if (const auto slope = h.log_derivative(x)) return 2.0 + x * *slope;
  const double value = h.evaluate(x);
  if (value == 0.0) throw NumericalError("tex_ratio: h(x) = 0");
  const double step = 1e-6 * std::max(x, 1.0);
  const double lo = std::max(0.0, x - step);
  const double derivative = (h.evaluate(x + step) - h.evaluate(lo)) / (x + step - lo);
  return 2.0 + x * derivative / value;
}

LimitEstimate tex_limit(const IntensityFunction& h, std::span<const double> grid) {
  std::vector<LimitSample> samples;
  samples.reserve(grid.size());
  for (double x : grid) samples.push_back({x, tex_ratio(h, x)});
  return classify_samples(std::move(samples));
}

std::vector<double> default_grid() {
  std::vector<double> grid;
  for (double x = 10.0; x <= 1e7; x *= 10.0) grid.push_back(x);
  return grid;
}

bool has_finite_mass(const IntensityFunction& h, const IntegralAccuracy& acc) {
  const ScaledIntegrals lo = h.scaled_integrals(1e6, acc);
  const ScaledIntegrals hi = h.scaled_integrals(1e7, acc);
  if (!(lo.cumulative > 0.0)) return false;
  const double growth = std::log(hi.cumulative) + hi.log_scale - std::log(lo.cumulative) -
                        lo.log_scale;
  return growth < std::log1p(kFiniteMassGrowth);
}

LimitEstimate classify_limit(const IntensityFunction& h, const IntegralAccuracy& acc,
                             std::span<const double> grid) {
  std::vector<double> points = grid.empty() ? default_grid()
                                            : std::vector<double>(grid.begin(), grid.end());
  std::vector<LimitSample> samples;
  samples.reserve(points.size());
  for (double x : points) samples.push_back({x, t99_ratio(h, x, acc)});

  if (has_finite_mass(h, acc)) {
    LimitEstimate out;
    out.classification = LimitKind::Converges;
    out.value = 1.0;
    out.finite_mass = true;
    out.grid = std::move(samples);
    return out;
  }

  // Probes halfway up each decade expose alternating staircase behaviour.
  std::vector<LimitSample> probes;
  if (!points.empty()) {
    for (double p = 2.0; p < points.back(); p *= 10.0) {
      if (p > points.front()) probes.push_back({p, t99_ratio(h, p, acc)});
    }
  }
  return classify_samples(std::move(samples), std::move(probes));
}

LimitEstimate classify_samples(std::vector<LimitSample> samples,
                               std::vector<LimitSample> probes) {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].x > samples[i - 1].x)) {
      throw std::invalid_argument("limit grid must be strictly increasing");
    }
  }
  LimitEstimate out;
  out.grid = samples;
  const std::size_t n = samples.size();
  if (n < 3) return out;

  std::vector<double> raw;
  raw.reserve(n);
  for (const LimitSample& s : samples) raw.push_back(s.ratio);
  for (double r : raw) {
    if (!std::isfinite(r)) throw NumericalError("non-finite ratio in limit samples");
  }

  const std::span<const double> raw_window(raw.data() + n - 3, 3);
  const WindowStats raw_stats = stats(raw_window);
  out.spread = raw_stats.max - raw_stats.min;
  if (raw_stats.max > kDivergenceLevel && raw_window[0] < raw_window[1] &&
      raw_window[1] < raw_window[2]) {
    out.classification = LimitKind::Diverges;
    return out;
  }

  if (raw_stats.max - raw_stats.min < kSettledSpread * std::abs(raw_stats.mean)) {
    out.classification = LimitKind::Converges;
    out.value = std::max(1.0, raw_window.back());
    return out;
  }

  // Ratios typically approach their limit like 1 / ln x; extrapolate each
  // consecutive triple to 1 / ln x = 0 before testing the window.
  std::vector<double> window(raw_window.begin(), raw_window.end());
  const bool can_extrapolate =
      n >= 5 && std::all_of(samples.begin(), samples.end(),
                            [](const LimitSample& s) { return s.x > 1.0; });
  if (can_extrapolate) {
    window.clear();
    for (std::size_t j = n - 5; j + 2 < n; ++j) {
      std::array<double, 3> u{};
      std::array<double, 3> v{};
      for (std::size_t k = 0; k < 3; ++k) {
        u[k] = 1.0 / std::log(samples[j + k].x);
        v[k] = samples[j + k].ratio;
      }
      window.push_back(extrapolate_to_zero(u, v));
    }
  }
  const WindowStats w = stats(window);
  if (w.max - w.min < kConvergenceSpread * std::abs(w.mean)) {
    out.classification = LimitKind::Converges;
    out.value = std::max(1.0, w.mean);
    out.spread = w.max - w.min;
    return out;
  }
  // Algebraically fast convergence defeats the 1 / ln x extrapolation.
  if (out.spread < kConvergenceSpread * std::abs(raw_stats.mean)) {
    out.classification = LimitKind::Converges;
    out.value = std::max(1.0, raw_window.back());
    return out;
  }

  std::vector<LimitSample> merged = samples;
  merged.insert(merged.end(), probes.begin(), probes.end());
  if (oscillates(std::move(merged))) out.classification = LimitKind::Oscillates;
  return out;
}

}  // namespace queue_poa::asymptotics
