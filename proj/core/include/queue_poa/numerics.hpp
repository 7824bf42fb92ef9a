#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace queue_poa {

/// Accuracy request for every integral the library evaluates by quadrature.
struct IntegralAccuracy {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  /// Panel budget per mandatory segment of the integration range.
  std::size_t max_subdivisions = 20000;

  /// Throws std::invalid_argument unless both tolerances are strictly positive.
  void validate() const;
};

/// Raised when adaptive quadrature cannot meet the requested accuracy.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation's numerical precondition fails at run time
/// (degenerate ratio, non-finite result, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (10/21) quadrature of f over [a, b].
///
/// `nodes` are mandatory subdivision points (discontinuities, kinks,
/// oscillation half-periods); nodes outside (a, b) are ignored and the list
/// need not be sorted. Each segment between consecutive nodes is refined
/// independently until its error estimate is below
/// max(abs_tol * share_of_length, rel_tol * |segment integral|). For a
/// nonnegative integrand this bounds the total error by
/// max(abs_tol, rel_tol * |total|).
double integrate(const Integrand& f, double a, double b,
                 const IntegralAccuracy& acc = {},
                 std::span<const double> nodes = {});

/// Finds x in [lo, hi] with g(x) = 0 for nondecreasing g with
/// g(lo) <= 0 <= g(hi). Secant steps keep a valid bracket; any step that
/// fails to halve the bracket is followed by a bisection, so convergence is
/// guaranteed for continuous g. Stops when the bracket width falls below
/// rel_tol * max(|lo|, |hi|) (or below the smallest normal double).
double solve_increasing(const std::function<double(double)>& g, double lo,
                        double hi, double rel_tol = 1e-12);

/// Compensated (Neumaier) summation.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace queue_poa
