#include "queue_poa/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace queue_poa {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

bool finite(double v) { return std::isfinite(v); }

// Exponents beyond this are carried in ScaledIntegrals::log_scale.
constexpr double kScaleThreshold = 500.0;

// e^u (u - 1) + 1 without cancellation for small |u|.
double exp_moment_kernel(double u) {
  if (std::abs(u) < 0.5) {
    // sum_{n>=2} u^n (n - 1) / n!
    double term = u * u / 2.0;  // u^n / n! at n = 2
    double sum = term;
    for (int n = 3; n < 40; ++n) {
      term *= u / n;
      const double add = term * (n - 1);
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::exp(u) * (u - 1.0) + 1.0;
}

// sin x - x cos x.
double sin_moment_kernel(double x) {
  if (std::abs(x) < 0.5) {
    // sum_{k>=1} (-1)^{k+1} 2k x^{2k+1} / (2k+1)!
    double power = x;  // x^{2k+1} / (2k+1)!
    double sum = 0.0;
    for (int k = 1; k < 20; ++k) {
      power *= x * x / ((2.0 * k) * (2.0 * k + 1.0));
      const double add = (k % 2 == 1 ? 1.0 : -1.0) * 2.0 * k * power;
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::sin(x) - x * std::cos(x);
}

}  // namespace

// Piecewise-linear h with prefix integrals at each knot and a linear tail.
struct IntensityFunction::PiecewiseCurve {
  std::vector<Knot> knots;
  double tail_slope = 0.0;
  std::vector<double> cumulative;    // Lambda at each knot
  std::vector<double> first_moment;  // M at each knot

  PiecewiseCurve(std::vector<Knot> k, double slope) : knots(std::move(k)), tail_slope(slope) {
    cumulative.assign(knots.size(), 0.0);
    first_moment.assign(knots.size(), 0.0);
    for (std::size_t i = 1; i < knots.size(); ++i) {
      cumulative[i] = cumulative[i - 1] + piece_integral(knots[i - 1], knots[i]);
      first_moment[i] = first_moment[i - 1] + piece_moment(knots[i - 1], knots[i]);
    }
  }

  static double piece_integral(const Knot& l, const Knot& r) {
    return 0.5 * (l.h + r.h) * (r.y - l.y);
  }
  // Simpson's rule is exact for the quadratic y*h(y).
  static double piece_moment(const Knot& l, const Knot& r) {
    const double ym = 0.5 * (l.y + r.y);
    const double hm = 0.5 * (l.h + r.h);
    return (r.y - l.y) / 6.0 * (l.y * l.h + 4.0 * ym * hm + r.y * r.h);
  }

  // Index of the last knot with knot.y <= y.
  std::size_t segment(double y) const {
    auto it = std::upper_bound(knots.begin(), knots.end(), y,
                               [](double v, const Knot& k) { return v < k.y; });
    return static_cast<std::size_t>(std::distance(knots.begin(), it)) - 1;
  }

  Knot point_at(double y) const {
    const std::size_t i = segment(y);
    const Knot& l = knots[i];
    if (i + 1 == knots.size()) return {y, l.h + tail_slope * (y - l.y)};
    const Knot& r = knots[i + 1];
    const double w = (y - l.y) / (r.y - l.y);
    return {y, l.h + w * (r.h - l.h)};
  }

  double evaluate(double y) const { return point_at(y).h; }

  double integral(double x) const {
    const std::size_t i = segment(x);
    return cumulative[i] + piece_integral(knots[i], point_at(x));
  }

  double moment(double x) const {
    const std::size_t i = segment(x);
    return first_moment[i] + piece_moment(knots[i], point_at(x));
  }

  std::vector<double> nodes(double lo, double hi) const {
    std::vector<double> out;
    for (const Knot& k : knots) {
      if (k.y > lo && k.y < hi) out.push_back(k.y);
    }
    return out;
  }
};

namespace {

double staircase_value(const StaircaseAlternating& s, double y) {
  int index = 0;
  double edge = 1.0;
  while (y >= edge) {
    edge *= 10.0;
    ++index;
  }
  return index % 2 == 0 ? s.first : s.second;
}

// Integrates v(decade) * y^power over [0, x] decade by decade.
double staircase_integral(const StaircaseAlternating& s, double x, int power) {
  double total = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  int index = 0;
  while (lo < x) {
    const double top = std::min(hi, x);
    const double v = index % 2 == 0 ? s.first : s.second;
    total += power == 0 ? v * (top - lo) : 0.5 * v * (top * top - lo * lo);
    lo = hi;
    hi *= 10.0;
    ++index;
  }
  return total;
}

}  // namespace

IntensityFunction::IntensityFunction(IntensityFamily family, double scale)
    : family_(std::move(family)), scale_(scale) {
  require(finite(scale_) && scale_ > 0.0, "intensity scale must be finite and positive");

  std::visit(
      Overloaded{
          [](const Constant& c) {
            require(finite(c.value) && c.value >= 0.0, "constant intensity must be >= 0");
          },
          [](const PowerLaw& p) {
            require(finite(p.beta) && p.beta > 0.0, "power_law beta must be > 0");
            require(finite(p.alpha) && p.alpha > -1.0,
                    "power_law alpha must be > -1 (cumulative rate must be finite)");
          },
          [](const Exponential& e) {
            require(finite(e.gamma) && e.gamma != 0.0, "exponential gamma must be nonzero");
          },
          [](const LogShift&) {},
          [](const RationalShift& r) {
            require(finite(r.p) && r.p > 0.0, "rational_shift p must be > 0");
          },
          [](const SinusoidalOffset& s) {
            require(finite(s.a) && finite(s.b) && s.a >= std::abs(s.b),
                    "sinusoidal_offset requires a >= |b|");
          },
          [](const StaircaseAlternating& s) {
            require(finite(s.first) && finite(s.second) && s.first >= 0.0 && s.second >= 0.0,
                    "staircase values must be >= 0");
          },
          [this](const PiecewiseLinearOscillating& p) {
            require(finite(p.first_level) && p.first_level >= 0.0,
                    "piecewise oscillating first level must be >= 0");
            std::vector<Knot> knots{{0.0, p.first_level}};
            double previous = 0.0;
            double level = p.first_level;
            for (std::size_t i = 0; i < p.breakpoints.size(); ++i) {
              const double b = p.breakpoints[i];
              require(finite(b) && b > previous, "breakpoints must be strictly increasing and > 0");
              // Even-indexed breakpoints close a flat piece, odd ones a unit-slope piece.
              if (i % 2 == 1) level += b - previous;
              knots.push_back({b, level});
              previous = b;
            }
            const double slope = p.breakpoints.size() % 2 == 1 ? 1.0 : 0.0;
            curve_ = std::make_shared<const PiecewiseCurve>(std::move(knots), slope);
          },
          [this](const PiecewiseTable& t) {
            require(!t.knots.empty(), "table needs at least one knot");
            require(t.knots.front().y == 0.0, "table's first knot must be at y = 0");
            for (std::size_t i = 0; i < t.knots.size(); ++i) {
              require(finite(t.knots[i].y) && finite(t.knots[i].h) && t.knots[i].h >= 0.0,
                      "table knots must be finite with h >= 0");
              if (i > 0) require(t.knots[i].y > t.knots[i - 1].y, "table knots must be increasing");
            }
            curve_ = std::make_shared<const PiecewiseCurve>(t.knots, 0.0);
          },
      },
      family_);

  // h >= 0 on a dense grid: linear on [0, 10], geometric to 1e8.
  auto check = [this](double y) {
    const double v = raw_evaluate(y);
    if (!(v >= 0.0)) {
      throw std::invalid_argument("intensity is negative or undefined at y = " + std::to_string(y));
    }
  };
  for (int i = 1; i <= 1000; ++i) check(0.01 * i);
  for (double y = 10.0; y <= 1e8; y *= 1.01) check(y);
  if (const auto* p = std::get_if<PowerLaw>(&family_); p == nullptr || p->alpha >= 0.0) {
    check(0.0);
  }
}

std::string_view IntensityFunction::family_name() const {
  return std::visit(Overloaded{
                        [](const Constant&) { return std::string_view("constant"); },
                        [](const PowerLaw&) { return std::string_view("power_law"); },
                        [](const Exponential&) { return std::string_view("exponential"); },
                        [](const LogShift&) { return std::string_view("log_shift"); },
                        [](const RationalShift&) { return std::string_view("rational_shift"); },
                        [](const SinusoidalOffset&) { return std::string_view("sinusoidal_offset"); },
                        [](const StaircaseAlternating&) { return std::string_view("staircase"); },
                        [](const PiecewiseLinearOscillating&) {
                          return std::string_view("piecewise_oscillating");
                        },
                        [](const PiecewiseTable&) { return std::string_view("table"); },
                    },
                    family_);
}

IntensityFunction IntensityFunction::scaled(double b) const {
  require(finite(b) && b > 0.0, "scale factor must be finite and positive");
  return IntensityFunction(family_, scale_ * b);
}

double IntensityFunction::raw_evaluate(double y) const {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.value; },
          [y](const PowerLaw& p) { return p.beta * std::pow(y, p.alpha); },
          [y](const Exponential& e) { return std::exp(e.gamma * y); },
          [y](const LogShift&) { return std::log1p(y); },
          [y](const RationalShift& r) { return std::exp(-r.p * std::log1p(y)); },
          [y](const SinusoidalOffset& s) { return s.a + s.b * std::sin(y); },
          [y](const StaircaseAlternating& s) { return staircase_value(s, y); },
          [this, y](const PiecewiseLinearOscillating&) { return curve_->evaluate(y); },
          [this, y](const PiecewiseTable&) { return curve_->evaluate(y); },
      },
      family_);
}

double IntensityFunction::evaluate(double y) const {
  if (!(y >= 0.0)) throw std::domain_error("intensity evaluated at negative distance");
  return scale_ * raw_evaluate(y);
}

double IntensityFunction::evaluate_scaled(double y, double log_scale) const {
  if (!(y >= 0.0)) throw std::domain_error("intensity evaluated at negative distance");
  if (const auto* e = std::get_if<Exponential>(&family_)) {
    return scale_ * std::exp(e->gamma * y - log_scale);
  }
  return scale_ * raw_evaluate(y) * std::exp(-log_scale);
}

bool IntensityFunction::derivative_available() const {
  return !std::holds_alternative<StaircaseAlternating>(family_) &&
         !std::holds_alternative<PiecewiseLinearOscillating>(family_) &&
         !std::holds_alternative<PiecewiseTable>(family_);
}

std::optional<double> IntensityFunction::derivative(double y) const {
  if (!(y >= 0.0)) throw std::domain_error("derivative evaluated at negative distance");
  std::optional<double> d = std::visit(
      Overloaded{
          [](const Constant&) -> std::optional<double> { return 0.0; },
          [y](const PowerLaw& p) -> std::optional<double> {
            if (p.alpha == 0.0) return 0.0;
            return p.beta * p.alpha * std::pow(y, p.alpha - 1.0);
          },
          [y](const Exponential& e) -> std::optional<double> {
            return e.gamma * std::exp(e.gamma * y);
          },
          [y](const LogShift&) -> std::optional<double> { return 1.0 / (1.0 + y); },
          [y](const RationalShift& r) -> std::optional<double> {
            return -r.p * std::exp(-(r.p + 1.0) * std::log1p(y));
          },
          [y](const SinusoidalOffset& s) -> std::optional<double> { return s.b * std::cos(y); },
          [](const auto&) -> std::optional<double> { return std::nullopt; },
      },
      family_);
  if (d) *d *= scale_;
  return d;
}

std::optional<double> IntensityFunction::log_derivative(double y) const {
  if (const auto* e = std::get_if<Exponential>(&family_)) {
    if (!(y >= 0.0)) throw std::domain_error("derivative evaluated at negative distance");
    return e->gamma;
  }
  const std::optional<double> d = derivative(y);
  if (!d) return std::nullopt;
  const double value = evaluate(y);
  if (value == 0.0) throw NumericalError("log derivative undefined where h = 0");
  return *d / value;
}

double IntensityFunction::raw_cumulative(double x) const {
  return std::visit(
      Overloaded{
          [x](const Constant& c) { return c.value * x; },
          [x](const PowerLaw& p) { return p.beta * std::pow(x, p.alpha + 1.0) / (p.alpha + 1.0); },
          [x](const Exponential& e) { return std::expm1(e.gamma * x) / e.gamma; },
          [x](const LogShift&) {
            if (x < 0.25) {
              // sum_{n>=1} (-1)^{n+1} x^{n+1} / (n (n + 1))
              double power = x;
              double sum = 0.0;
              for (int n = 1; n < 60; ++n) {
                power *= x;
                const double add = (n % 2 == 1 ? 1.0 : -1.0) * power / (n * (n + 1.0));
                sum += add;
                if (std::abs(add) < 1e-18 * std::abs(sum)) break;
              }
              return sum;
            }
            return (1.0 + x) * std::log1p(x) - x;
          },
          [x](const RationalShift& r) {
            const double l = std::log1p(x);
            if (r.p == 1.0) return l;
            return std::expm1((1.0 - r.p) * l) / (1.0 - r.p);
          },
          [x](const SinusoidalOffset& s) {
            const double half = std::sin(0.5 * x);
            return s.a * x + 2.0 * s.b * half * half;
          },
          [x](const StaircaseAlternating& s) { return staircase_integral(s, x, 0); },
          [this, x](const PiecewiseLinearOscillating&) { return curve_->integral(x); },
          [this, x](const PiecewiseTable&) { return curve_->integral(x); },
      },
      family_);
}

double IntensityFunction::raw_first_moment(double x) const {
  return std::visit(
      Overloaded{
          [x](const Constant& c) { return 0.5 * c.value * x * x; },
          [x](const PowerLaw& p) { return p.beta * std::pow(x, p.alpha + 2.0) / (p.alpha + 2.0); },
          [x](const Exponential& e) {
            return exp_moment_kernel(e.gamma * x) / (e.gamma * e.gamma);
          },
          [x](const LogShift&) {
            if (x < 0.25) {
              // sum_{n>=1} (-1)^{n+1} x^{n+2} / (n (n + 2))
              double power = x * x;
              double sum = 0.0;
              for (int n = 1; n < 60; ++n) {
                power *= x;
                const double add = (n % 2 == 1 ? 1.0 : -1.0) * power / (n * (n + 2.0));
                sum += add;
                if (std::abs(add) < 1e-18 * std::abs(sum)) break;
              }
              return sum;
            }
            return 0.5 * (x * x - 1.0) * std::log1p(x) - 0.25 * x * x + 0.5 * x;
          },
          [x](const RationalShift& r) {
            if (x < 0.1) {
              // Binomial series: sum_k C(-p, k) x^{k+2} / (k + 2)
              double coeff = 1.0;
              double power = x * x;
              double sum = 0.0;
              for (int k = 0; k < 200; ++k) {
                const double add = coeff * power / (k + 2.0);
                sum += add;
                if (std::abs(add) < 1e-18 * std::abs(sum)) break;
                coeff *= (-r.p - k) / (k + 1.0);
                power *= x;
              }
              return sum;
            }
            // integral of (1+y)^{1-p} - (1+y)^{-p}
            const double l = std::log1p(x);
            const double upper = r.p == 2.0 ? l : std::expm1((2.0 - r.p) * l) / (2.0 - r.p);
            const double lower = r.p == 1.0 ? l : std::expm1((1.0 - r.p) * l) / (1.0 - r.p);
            return upper - lower;
          },
          [x](const SinusoidalOffset& s) { return 0.5 * s.a * x * x + s.b * sin_moment_kernel(x); },
          [x](const StaircaseAlternating& s) { return staircase_integral(s, x, 1); },
          [this, x](const PiecewiseLinearOscillating&) { return curve_->moment(x); },
          [this, x](const PiecewiseTable&) { return curve_->moment(x); },
      },
      family_);
}

double IntensityFunction::cumulative(double x, const IntegralAccuracy& acc) const {
  acc.validate();
  if (!(x >= 0.0)) throw std::domain_error("cumulative evaluated at negative distance");
  if (x == 0.0) return 0.0;
  return scale_ * raw_cumulative(x);
}

double IntensityFunction::first_moment(double x, const IntegralAccuracy& acc) const {
  acc.validate();
  if (!(x >= 0.0)) throw std::domain_error("first moment evaluated at negative distance");
  if (x == 0.0) return 0.0;
  return scale_ * raw_first_moment(x);
}

ScaledIntegrals IntensityFunction::scaled_integrals(double x, const IntegralAccuracy& acc) const {
  if (const auto* e = std::get_if<Exponential>(&family_)) {
    const double u = e->gamma * x;
    if (u > kScaleThreshold) {
      const double g = e->gamma;
      const double decay = std::exp(-u);
      return {scale_ * (1.0 - decay) / g, scale_ * (u - 1.0 + decay) / (g * g), u};
    }
  }
  return {cumulative(x, acc), first_moment(x, acc), 0.0};
}

double IntensityFunction::cumulative_by_quadrature(double x, const IntegralAccuracy& acc) const {
  if (!(x >= 0.0)) throw std::domain_error("cumulative evaluated at negative distance");
  const std::vector<double> nodes = breakpoints(0.0, x);
  return integrate([this](double y) { return evaluate(y); }, 0.0, x, acc, nodes);
}

double IntensityFunction::first_moment_by_quadrature(double x, const IntegralAccuracy& acc) const {
  if (!(x >= 0.0)) throw std::domain_error("first moment evaluated at negative distance");
  const std::vector<double> nodes = breakpoints(0.0, x);
  return integrate([this](double y) { return y * evaluate(y); }, 0.0, x, acc, nodes);
}

std::optional<double> IntensityFunction::raw_inverse(double target) const {
  return std::visit(
      Overloaded{
          [target](const Constant& c) -> std::optional<double> {
            if (c.value == 0.0) return std::nullopt;
            return target / c.value;
          },
          [target](const PowerLaw& p) -> std::optional<double> {
            return std::pow(target * (p.alpha + 1.0) / p.beta, 1.0 / (p.alpha + 1.0));
          },
          [target](const Exponential& e) -> std::optional<double> {
            const double arg = e.gamma * target;
            if (arg <= -1.0) return std::nullopt;
            return std::log1p(arg) / e.gamma;
          },
          [target](const RationalShift& r) -> std::optional<double> {
            if (r.p == 1.0) return std::expm1(target);
            const double arg = (1.0 - r.p) * target;
            if (arg <= -1.0) return std::nullopt;
            return std::expm1(std::log1p(arg) / (1.0 - r.p));
          },
          [](const auto&) -> std::optional<double> { return std::nullopt; },
      },
      family_);
}

double IntensityFunction::inverse_cumulative(double target, double hi,
                                             const IntegralAccuracy& acc) const {
  acc.validate();
  if (!(hi >= 0.0)) throw std::domain_error("inverse_cumulative: hi must be >= 0");
  const double top = cumulative(hi, acc);
  if (!(target >= 0.0) || target > top * (1.0 + 1e-14)) {
    throw std::domain_error("inverse_cumulative: target outside [0, Lambda(hi)]");
  }
  if (target == 0.0) return 0.0;
  if (target >= top) return hi;

  if (auto y = raw_inverse(target / scale_); y && std::isfinite(*y)) {
    return std::clamp(*y, 0.0, hi);
  }

  // Newton steps on Lambda(y) - target, kept inside a shrinking bracket.
  double lo = 0.0;
  double up = hi;
  double y = hi * target / top;
  for (int it = 0; it < 200; ++it) {
    const double residual = cumulative(y, acc) - target;
    if (std::abs(residual) <= acc.rel_tol * target) return y;
    if (residual < 0.0) {
      lo = y;
    } else {
      up = y;
    }
    if (up - lo <= std::numeric_limits<double>::epsilon() * up) return y;
    const double slope = evaluate(y);
    double next = slope > 0.0 ? y - residual / slope : 0.5 * (lo + up);
    if (!(next > lo && next < up)) next = 0.5 * (lo + up);
    y = next;
  }
  return y;
}

std::vector<double> IntensityFunction::breakpoints(double lo, double hi) const {
  std::vector<double> out;
  if (!(hi > lo)) return out;
  std::visit(Overloaded{
                 [&](const Exponential& e) {
                   // Geometric e-folding nodes towards the end where h is largest.
                   const double fold = 1.0 / std::abs(e.gamma);
                   for (double step = fold; step < hi - lo; step *= 2.0) {
                     out.push_back(e.gamma > 0.0 ? hi - step : lo + step);
                   }
                 },
                 [&](const SinusoidalOffset&) {
                   const double pi = std::numbers::pi;
                   for (double k = std::floor(lo / pi) + 1.0; k * pi < hi; k += 1.0) {
                     out.push_back(k * pi);
                   }
                 },
                 [&](const StaircaseAlternating&) {
                   for (double edge = 1.0; edge < hi; edge *= 10.0) {
                     if (edge > lo) out.push_back(edge);
                   }
                 },
                 [&](const PiecewiseLinearOscillating&) { out = curve_->nodes(lo, hi); },
                 [&](const PiecewiseTable&) { out = curve_->nodes(lo, hi); },
                 [](const auto&) {},
             },
             family_);
  return out;
}

}  // namespace queue_poa
