#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "queue_poa/numerics.hpp"

namespace queue_poa {

// Intensity families. h(y) is the arrival density over distance y >= 0:
// customers closer than x arrive as a Poisson process of rate
// Lambda(x) = integral of h over [0, x].

/// h(y) = value.
struct Constant {
  double value = 1.0;
};

/// h(y) = beta * y^alpha, alpha > -1.
struct PowerLaw {
  double beta = 1.0;
  double alpha = 0.0;
};

/// h(y) = exp(gamma * y).
struct Exponential {
  double gamma = 1.0;
};

/// h(y) = ln(1 + y).
struct LogShift {};

/// h(y) = (1 + y)^(-p), p > 0.
struct RationalShift {
  double p = 1.0;
};

/// h(y) = a + b * sin(y), a >= |b|.
struct SinusoidalOffset {
  double a = 2.0;
  double b = 1.0;
};

/// Constant on the decades [0,1), [1,10), [10,100), ...: `first` on the
/// even-indexed decades (starting with [0,1)), `second` on the odd ones.
struct StaircaseAlternating {
  double first = 2.0;
  double second = 1.0;
};

struct Knot {
  double y = 0.0;
  double h = 0.0;
};

/// Continuous alternation of flat and unit-slope pieces: h = c_i on
/// [a_i, b_i] and h = (c_i - b_i) + y on [b_i, a_{i+1}], with a_1 = 0 and
/// c_{i+1} = c_i - b_i + a_{i+1}. `breakpoints` lists b_1, a_2, b_2, a_3, ...
/// The last piece extends to infinity.
struct PiecewiseLinearOscillating {
  double first_level = 1.0;
  std::vector<double> breakpoints;
};

/// Linear interpolation between knots (first knot at y = 0); the last value
/// is held beyond the final knot.
struct PiecewiseTable {
  std::vector<Knot> knots;
};

using IntensityFamily =
    std::variant<Constant, PowerLaw, Exponential, LogShift, RationalShift,
                 SinusoidalOffset, StaircaseAlternating, PiecewiseLinearOscillating,
                 PiecewiseTable>;

/// Lambda(x) and M(x) = integral of y h(y) over [0, x], both stored as
/// value * exp(log_scale) so that exponentially growing families stay finite.
struct ScaledIntegrals {
  double cumulative = 0.0;
  double first_moment = 0.0;
  double log_scale = 0.0;
};

/// An immutable, validated intensity h(y) = scale * family(y).
class IntensityFunction {
 public:
  /// Validates parameters and checks h >= 0 on a dense sample grid.
  /// Throws std::invalid_argument on any violation.
  explicit IntensityFunction(IntensityFamily family, double scale = 1.0);

  static IntensityFunction constant(double value) { return IntensityFunction(Constant{value}); }
  static IntensityFunction power_law(double beta, double alpha) {
    return IntensityFunction(PowerLaw{beta, alpha});
  }
  static IntensityFunction exponential(double gamma) {
    return IntensityFunction(Exponential{gamma});
  }
  static IntensityFunction log_shift() { return IntensityFunction(LogShift{}); }
  static IntensityFunction rational_shift(double p) {
    return IntensityFunction(RationalShift{p});
  }
  static IntensityFunction sinusoidal_offset(double a, double b) {
    return IntensityFunction(SinusoidalOffset{a, b});
  }
  static IntensityFunction staircase(double first = 2.0, double second = 1.0) {
    return IntensityFunction(StaircaseAlternating{first, second});
  }
  static IntensityFunction piecewise_oscillating(double first_level,
                                                 std::vector<double> breakpoints) {
    return IntensityFunction(PiecewiseLinearOscillating{first_level, std::move(breakpoints)});
  }
  static IntensityFunction table(std::vector<Knot> knots) {
    return IntensityFunction(PiecewiseTable{std::move(knots)});
  }

  const IntensityFamily& family() const { return family_; }
  double scale() const { return scale_; }
  std::string_view family_name() const;

  /// The same family multiplied by b > 0.
  IntensityFunction scaled(double b) const;

  /// h(y); throws std::domain_error for y < 0.
  double evaluate(double y) const;
  double operator()(double y) const { return evaluate(y); }

  /// h(y) * exp(-log_scale), computed without overflowing h(y).
  double evaluate_scaled(double y, double log_scale) const;

  bool derivative_available() const;
  /// h'(y) when a closed form exists.
  std::optional<double> derivative(double y) const;
  /// h'(y) / h(y) from the closed-form derivative, evaluated without
  /// overflow for exponential growth. Empty when no closed form exists.
  std::optional<double> log_derivative(double y) const;

  /// Lambda(x) = integral of h over [0, x]. Closed form for every family;
  /// may overflow to +inf for exponential growth (see scaled_integrals).
  double cumulative(double x, const IntegralAccuracy& acc = {}) const;
  /// M(x) = integral of y h(y) over [0, x].
  double first_moment(double x, const IntegralAccuracy& acc = {}) const;
  ScaledIntegrals scaled_integrals(double x, const IntegralAccuracy& acc = {}) const;

  /// Adaptive-quadrature evaluations of the same integrals, integrating
  /// between the family's breakpoints. Used to cross-check the closed forms.
  double cumulative_by_quadrature(double x, const IntegralAccuracy& acc = {}) const;
  double first_moment_by_quadrature(double x, const IntegralAccuracy& acc = {}) const;

  /// y in [0, hi] with Lambda(y) = target. Closed-form inversion where the
  /// family admits one, else monotone bisection with Newton acceleration.
  /// Throws std::domain_error when target is outside [0, Lambda(hi)].
  double inverse_cumulative(double target, double hi, const IntegralAccuracy& acc = {}) const;

  /// Points in (lo, hi) where h is non-smooth or that split it into pieces a
  /// 21-point rule resolves (half-periods, exponential e-foldings).
  std::vector<double> breakpoints(double lo, double hi) const;

 private:
  double raw_evaluate(double y) const;
  double raw_cumulative(double x) const;
  double raw_first_moment(double x) const;
  std::optional<double> raw_inverse(double target) const;

  struct PiecewiseCurve;

  IntensityFamily family_;
  double scale_ = 1.0;
  // Knot representation shared by the piecewise-linear families.
  std::shared_ptr<const PiecewiseCurve> curve_;
};

}  // namespace queue_poa
