#include "queue_poa/queue_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace queue_poa::queue {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498948482;

void check_thresholds(const ThresholdVector& x) {
  for (double v : x) {
    if (!(std::isfinite(v) && v >= 0.0)) {
      throw std::invalid_argument("thresholds must be finite and >= 0");
    }
  }
}

// log of rho^n x_0 ... x_{n-1} for n = 0 .. size, skipping coordinate `skip`.
std::vector<double> log_weights(double rho, const ThresholdVector& x,
                                std::size_t skip = std::numeric_limits<std::size_t>::max()) {
  std::vector<double> out(x.size() + 1, 0.0);
  const double log_rho = std::log(rho);
  double acc = 0.0;
  for (std::size_t n = 1; n <= x.size(); ++n) {
    if (n - 1 != skip) acc += x[n - 1] > 0.0 ? std::log(x[n - 1]) : kNegInf;
    acc += log_rho;
    out[n] = acc;
  }
  return out;
}

// Coordinate j of S as (a + b t + c t^2) / (d + e t), up to a positive factor.
struct CoordinateForm {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;

  double operator()(double t) const { return (a + t * (b + c * t)) / (d + e * t); }
};

CoordinateForm coordinate_form(const QueueParams& p, const ThresholdVector& xe,
                               const ThresholdVector& x, std::size_t j) {
  const double rho = p.rho();
  std::vector<double> lp = log_weights(rho, x, j);  // Q_n for n > j, P_n for n <= j
  const double top = *std::max_element(lp.begin(), lp.end());
  CoordinateForm f;
  for (std::size_t n = 0; n < lp.size(); ++n) {
    const double w = std::exp(lp[n] - top);
    if (n <= j) {
      f.d += w;
      if (n >= 1) f.a += (xe[n - 1] - 0.5 * x[n - 1]) * w;
    } else if (n == j + 1) {
      f.e += w;
      f.b += xe[j] * w;
      f.c -= 0.5 * w;
    } else {
      f.e += w;
      f.b += (xe[n - 1] - 0.5 * x[n - 1]) * w;
    }
  }
  return f;
}

// Maximizes S over coordinate j in [0, hi]: golden-section, then the exact
// stationary points of the rational form.
double best_coordinate(const QueueParams& p, const ThresholdVector& xe, ThresholdVector& x,
                       std::size_t j, double hi) {
  auto value = [&](double t) {
    x[j] = t;
    return social_benefit(p, x);
  };
  double lo = 0.0;
  double up = hi;
  double c1 = up - kGolden * (up - lo);
  double c2 = lo + kGolden * (up - lo);
  double f1 = value(c1);
  double f2 = value(c2);
  while (up - lo > 1e-10 * std::max(1.0, hi)) {
    if (f1 < f2) {
      lo = c1;
      c1 = c2;
      f1 = f2;
      c2 = lo + kGolden * (up - lo);
      f2 = value(c2);
    } else {
      up = c2;
      c2 = c1;
      f2 = f1;
      c1 = up - kGolden * (up - lo);
      f1 = value(c1);
    }
  }

  std::vector<double> candidates{0.5 * (lo + up), 0.0, hi};
  x[j] = candidates[0];
  const CoordinateForm f = coordinate_form(p, xe, x, j);
  // dS/dt = 0  <=>  c e t^2 + 2 c d t + (b d - a e) = 0
  const double qa = f.c * f.e;
  const double qb = 2.0 * f.c * f.d;
  const double qc = f.b * f.d - f.a * f.e;
  if (qa != 0.0) {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      const double q = -0.5 * (qb + std::copysign(root, qb));
      if (q != 0.0) candidates.push_back(qc / q);
      candidates.push_back(q / qa);
    }
  } else if (qb != 0.0) {
    candidates.push_back(-qc / qb);
  }

  double best_t = candidates[0];
  double best = value(best_t);
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    const double t = candidates[k];
    if (!(t >= 0.0 && t <= hi)) continue;
    const double v = value(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  x[j] = best_t;
  return best;
}

OptimizationResult local_search(const QueueParams& p, const ThresholdVector& xe,
                                ThresholdVector x, int max_sweeps) {
  const double hi = 2.0 * xe.front();
  double current = social_benefit(p, x);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double before = current;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (xe[j] == 0.0) continue;
      const double saved = x[j];
      const double v = best_coordinate(p, xe, x, j, hi);
      if (v >= current) {
        current = v;
      } else {
        x[j] = saved;
      }
    }
    if (current - before <= 1e-10 * std::abs(current)) break;
  }
  return {std::move(x), current, 0};
}

}  // namespace

int QueueParams::n_e() const {
  const double nu = model.nu();
  const double nearest = std::round(nu);
  const double snapped = std::abs(nu - nearest) <= 1e-12 * std::max(1.0, nu) ? nearest : nu;
  return static_cast<int>(std::floor(snapped));
}

void QueueParams::validate() const {
  model.validate();
  if (!(std::isfinite(lambda) && lambda > 0.0)) {
    throw std::invalid_argument("lambda must be finite and positive");
  }
  if (n_e() < 1) throw std::invalid_argument("n_e must be at least 1");
}

ThresholdVector equilibrium_thresholds(const QueueParams& p) {
  p.validate();
  const int n = p.n_e();
  const double nu = p.model.nu();
  const double kappa = p.model.kappa();
  ThresholdVector x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double v = (nu - (i + 1)) / kappa;
    // The last entry is zero when nu is (numerically) an integer.
    x[static_cast<std::size_t>(i)] = v < 1e-12 * nu / kappa ? 0.0 : v;
  }
  return x;
}

StationaryDistribution stationary(double rho, const ThresholdVector& x) {
  if (!(std::isfinite(rho) && rho > 0.0)) throw std::invalid_argument("rho must be positive");
  check_thresholds(x);
  std::vector<double> lw = log_weights(rho, x);
  const double top = *std::max_element(lw.begin(), lw.end());
  CompensatedSum total;
  for (double& v : lw) {
    v = std::exp(v - top);
    total.add(v);
  }
  const double norm = total.value();
  for (double& v : lw) v /= norm;
  return lw;
}

double social_benefit(const QueueParams& p, const ThresholdVector& x) {
  const ThresholdVector xe = equilibrium_thresholds(p);
  if (x.size() != xe.size()) {
    throw std::invalid_argument("threshold vector must have length n_e");
  }
  const StationaryDistribution pi = stationary(p.rho(), x);
  CompensatedSum sum;
  for (std::size_t n = 1; n < pi.size(); ++n) {
    sum.add((xe[n - 1] - 0.5 * x[n - 1]) * pi[n]);
  }
  return p.model.mu * p.model.c_t * sum.value();
}

OptimizationResult optimize_social(const QueueParams& p, const OptimizationOptions& opt) {
  if (opt.restarts < 0) throw std::invalid_argument("restarts must be >= 0");
  const ThresholdVector xe = equilibrium_thresholds(p);
  const std::size_t n = xe.size();

  std::vector<ThresholdVector> starts;
  starts.push_back(xe);
  ThresholdVector single(n, 0.0);
  single[0] = loss::social_optimum(IntensityFunction::constant(p.lambda), p.model.mu, xe[0]);
  starts.push_back(single);
  std::mt19937_64 rng(opt.seed);
  for (int r = 0; r < opt.restarts; ++r) {
    ThresholdVector v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (xe[i] > 0.0) v[i] = u * xe[0];
    }
    starts.push_back(std::move(v));
  }

  OptimizationResult best;
  best.benefit = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < starts.size(); ++k) {
    OptimizationResult r = local_search(p, xe, starts[k], opt.max_sweeps);
    if (r.benefit > best.benefit) {
      best = std::move(r);
      best.best_start = static_cast<int>(k);
    }
  }
  return best;
}

double poa_queue(const QueueParams& p, const OptimizationOptions& opt) {
  const double equilibrium = social_benefit(p, equilibrium_thresholds(p));
  if (!(equilibrium > 0.0)) throw NumericalError("equilibrium benefit is zero");
  return optimize_social(p, opt).benefit / equilibrium;
}

QueueParams unbounded_instance(double s, double rho, double mu) {
  if (!(s > 2.0)) throw std::domain_error("construction requires s > 2");
  if (!(rho > 0.0) || !(mu > 0.0)) throw std::invalid_argument("rho and mu must be positive");
  QueueParams p;
  p.lambda = rho * mu;
  p.model = {(2.0 * s - 1.0) * s * s / (s - 1.0), mu, s * s * mu, 1.0};
  return p;
}

double lower_bound_final(double s, double rho, double mu) {
  const QueueParams p = unbounded_instance(s, rho, mu);
  const double x0 = s * s * s / (s - 1.0);
  const double x1 = s * s / (s - 1.0);
  const double x_star = loss::social_optimum(IntensityFunction::constant(p.lambda), p.model.mu, x0);
  return 2.0 * (1.0 / (1.0 / x_star + rho)) * (1.0 - x_star / (2.0 * x0)) *
         ((1.0 + rho * x0 + rho * rho * x0 * x1) / (x0 + rho * x1 * x1));
}

}  // namespace queue_poa::queue
