#include "queue_poa/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace queue_poa {

void IntegralAccuracy::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw std::invalid_argument("integral tolerances must be strictly positive");
  }
  if (max_subdivisions == 0) {
    throw std::invalid_argument("max_subdivisions must be positive");
  }
}

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    compensation_ += (sum_ - t) + v;
  } else {
    compensation_ += (v - t) + sum_;
  }
  sum_ = t;
}

namespace {

// 21-point Kronrod abscissae/weights with the embedded 10-point Gauss rule
// (QUADPACK dqk21).
constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

struct ByError {
  bool operator()(const Panel& l, const Panel& r) const { return l.error < r.error; }
};

Panel gauss_kronrod(const Integrand& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<double, 10> left{};
  std::array<double, 10> right{};
  const double fc = f(centre);
  double kronrod = kKronrodWeights[10] * fc;
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);

  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double f1 = f(centre - dx);
    const double f2 = f(centre + dx);
    left[j] = f1;
    right[j] = f2;
    kronrod += kKronrodWeights[j] * (f1 + f2);
    abs_sum += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }

  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[10] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 10; ++j) {
    asc += kKronrodWeights[j] * (std::abs(left[j] - mean) + std::abs(right[j] - mean));
  }

  const double scale = std::abs(half);
  const double value = kronrod * half;
  double error = std::abs((kronrod - gauss) * half);
  const double resasc = asc * scale;
  const double resabs = abs_sum * scale;
  if (resasc != 0.0 && error != 0.0) {
    error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    error = std::max(50.0 * eps * resabs, error);
  }
  if (!std::isfinite(value) || !std::isfinite(error)) {
    throw QuadratureError("non-finite integrand value on [" + std::to_string(a) +
                          ", " + std::to_string(b) + "]");
  }
  return {a, b, value, error};
}

double integrate_segment(const Integrand& f, double a, double b, double abs_tol,
                         const IntegralAccuracy& acc) {
  std::priority_queue<Panel, std::vector<Panel>, ByError> panels;
  Panel first = gauss_kronrod(f, a, b);
  double total = first.value;
  double total_error = first.error;
  panels.push(first);

  CompensatedSum accepted;
  std::size_t subdivisions = 0;
  while (total_error > std::max(abs_tol, acc.rel_tol * std::abs(total))) {
    if (++subdivisions > acc.max_subdivisions) {
      throw QuadratureError("quadrature did not converge on [" + std::to_string(a) +
                            ", " + std::to_string(b) + "] within " +
                            std::to_string(acc.max_subdivisions) + " subdivisions");
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel cannot be split further in double precision; accept it.
      total_error -= worst.error;
      accepted.add(worst.value);
      if (panels.empty()) break;
      continue;
    }
    const Panel lo = gauss_kronrod(f, worst.a, mid);
    const Panel hi = gauss_kronrod(f, mid, worst.b);
    total += lo.value + hi.value - worst.value;
    total_error += lo.error + hi.error - worst.error;
    panels.push(lo);
    panels.push(hi);
  }

  // Re-sum the accepted panels to avoid drift from incremental updates.
  CompensatedSum sum = accepted;
  while (!panels.empty()) {
    sum.add(panels.top().value);
    panels.pop();
  }
  return sum.value();
}

}  // namespace

double integrate(const Integrand& f, double a, double b, const IntegralAccuracy& acc,
                 std::span<const double> nodes) {
  acc.validate();
  if (!(std::isfinite(a) && std::isfinite(b))) {
    throw std::invalid_argument("integration limits must be finite");
  }
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, acc, nodes);

  std::vector<double> cuts;
  cuts.reserve(nodes.size() + 2);
  cuts.push_back(a);
  for (double n : nodes) {
    if (n > a && n < b) cuts.push_back(n);
  }
  cuts.push_back(b);
  std::sort(cuts.begin() + 1, cuts.end() - 1);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double length = b - a;
  CompensatedSum sum;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double share = (cuts[i + 1] - cuts[i]) / length;
    sum.add(integrate_segment(f, cuts[i], cuts[i + 1], acc.abs_tol * share, acc));
  }
  return sum.value();
}

double solve_increasing(const std::function<double(double)>& g, double lo, double hi,
                        double rel_tol) {
  if (!(lo <= hi)) throw std::invalid_argument("solve_increasing: empty bracket");
  double g_lo = g(lo);
  double g_hi = g(hi);
  if (g_lo > 0.0 || g_hi < 0.0) {
    throw NumericalError("solve_increasing: root is not bracketed");
  }
  if (g_lo == 0.0) return lo;
  if (g_hi == 0.0) return hi;

  constexpr int kMaxIterations = 2000;
  bool bisect_next = false;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double width = hi - lo;
    const double scale = std::max(std::abs(lo), std::abs(hi));
    if (width <= rel_tol * scale || width <= std::numeric_limits<double>::min()) break;

    double x = 0.5 * (lo + hi);
    if (!bisect_next && std::isfinite(g_lo) && std::isfinite(g_hi)) {
      const double secant = lo - g_lo * (hi - lo) / (g_hi - g_lo);
      if (secant > lo && secant < hi) x = secant;
    }
    if (!(x > lo && x < hi)) break;

    const double gx = g(x);
    if (gx == 0.0) return x;
    if (std::isnan(gx)) throw NumericalError("solve_increasing: NaN residual");
    if (gx < 0.0) {
      lo = x;
      g_lo = gx;
    } else {
      hi = x;
      g_hi = gx;
    }
    bisect_next = (hi - lo) > 0.5 * width;
  }
  return std::abs(g_lo) <= std::abs(g_hi) ? lo : hi;
}

}  // namespace queue_poa
