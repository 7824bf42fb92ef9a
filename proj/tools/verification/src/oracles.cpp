#include "queue_poa_verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace queue_poa::verify::oracle {

double uniform_loss_optimum(double lambda, double mu, double x_e) {
  const double a = 0.5 * lambda / mu;
  // Stable form of (-1 + sqrt(1 + 4 a x_e)) / (2 a).
  return 2.0 * x_e / (1.0 + std::sqrt(1.0 + 4.0 * a * x_e));
}

double uniform_loss_benefit(double lambda, double mu, double c_t, double x_e, double x) {
  return c_t * (x_e * lambda * x - 0.5 * lambda * x * x) / (1.0 + lambda * x / mu);
}

double quadrature_loss_benefit(const IntensityFunction& h, double mu, double c_t, double x_e,
                               double x, int panels, std::vector<double> cuts) {
  if (x == 0.0) return 0.0;
  std::erase_if(cuts, [x](double c) { return !(c > 0.0 && c < x); });
  std::sort(cuts.begin(), cuts.end());
  cuts.insert(cuts.begin(), 0.0);
  cuts.push_back(x);
  const int n = 2 * panels;
  double mass = 0.0;
  double weighted = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double step = (cuts[k + 1] - lo) / n;
    double piece_mass = 0.0;
    double piece_weighted = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double y = i == n ? cuts[k + 1] : lo + i * step;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      // Inside the piece: a jump at the right end is read from the left.
      const double hy = i == n ? h.evaluate(std::nextafter(y, lo)) : h.evaluate(y);
      piece_mass += w * hy;
      piece_weighted += w * (x_e - y) * hy;
    }
    mass += piece_mass * step / 3.0;
    weighted += piece_weighted * step / 3.0;
  }
  return c_t * weighted / (1.0 + mass / mu);
}

std::vector<double> balance_solve(double rho, const std::vector<double>& x) {
  const std::size_t n = x.size() + 1;
  // Generator q of the chain; unit death rate.
  std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n) q[i][i + 1] = rho * x[i];
    if (i > 0) q[i][i - 1] = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) q[i][i] -= q[i][j];
    }
  }
  // pi q = 0: equation j is column j of q.
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m[r][c] = q[c][r];
  }
  for (std::size_t c = 0; c < n; ++c) m[n - 1][c] = 1.0;
  m[n - 1][n] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (m[pivot][col] == 0.0) throw std::runtime_error("singular balance system");
    std::swap(m[col], m[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = m[i][n] / m[i][i];
  return pi;
}

double balance_residual(double rho, const std::vector<double>& x, const std::vector<double>& pi) {
  const std::size_t n = x.size() + 1;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double out_rate = (i + 1 < n ? rho * x[i] : 0.0) + (i > 0 ? 1.0 : 0.0);
    double in = 0.0;
    if (i > 0) in += pi[i - 1] * rho * x[i - 1];
    if (i + 1 < n) in += pi[i + 1];
    worst = std::max(worst, std::abs(in - pi[i] * out_rate));
  }
  return worst;
}

double queue_benefit_sum(double lambda, double mu, double c_t, const std::vector<double>& xe,
                         const std::vector<double>& x) {
  const double rho = lambda / mu;
  double numerator = 0.0;
  double denominator = 1.0;
  double product = 1.0;
  for (std::size_t n = 1; n <= x.size(); ++n) {
    product *= x[n - 1];
    numerator += (xe[n - 1] - 0.5 * x[n - 1]) * lambda * c_t * std::pow(rho, n - 1.0) * product;
    denominator += std::pow(rho, static_cast<double>(n)) * product;
  }
  return numerator / denominator;
}

double lower_bound_factors(double s, double rho, double mu) {
  const double x0 = s * s * s / (s - 1.0);
  const double x1 = s * s / (s - 1.0);
  const double x_star = uniform_loss_optimum(rho * mu, mu, x0);
  const double first = 2.0 / (1.0 / x_star + rho);
  const double second = 1.0 - x_star / (2.0 * x0);
  const double third = (1.0 + rho * x0 + rho * rho * x0 * x1) / (x0 + rho * x1 * x1);
  return first * second * third;
}

}  // namespace queue_poa::verify::oracle
