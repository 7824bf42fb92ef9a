#include "queue_poa/loss_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace queue_poa {

void ModelParams::validate() const {
  for (double v : {R, mu, c_w, c_t}) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw std::invalid_argument("model parameters R, mu, c_w, c_t must be finite and positive");
    }
  }
  if (!(nu() > 1.0)) {
    throw std::invalid_argument("model requires nu = R mu / c_w > 1");
  }
}

namespace loss {

double equilibrium_threshold(const ModelParams& p) {
  p.validate();
  return (p.R * p.mu - p.c_w) / (p.c_t * p.mu);
}

double social_benefit(const IntensityFunction& h, double mu, double c_t, double x_e, double x,
                      const IntegralAccuracy& acc) {
  if (!(x >= 0.0)) throw std::domain_error("social_benefit: threshold must be >= 0");
  if (!(x_e >= 0.0)) throw std::domain_error("social_benefit: x_e must be >= 0");
  if (!(mu > 0.0) || !(c_t > 0.0)) {
    throw std::invalid_argument("social_benefit: mu and c_t must be positive");
  }
  if (x == 0.0) return 0.0;
  const ScaledIntegrals in = h.scaled_integrals(x, acc);
  // Numerator and denominator share the factor exp(log_scale).
  return c_t * (x_e * in.cumulative - in.first_moment) /
         (std::exp(-in.log_scale) + in.cumulative / mu);
}

double social_optimum(const IntensityFunction& h, double mu, double x_e,
                      const IntegralAccuracy& acc) {
  if (!(x_e >= 0.0)) throw std::domain_error("social_optimum: x_e must be >= 0");
  if (!(mu > 0.0)) throw std::invalid_argument("social_optimum: mu must be positive");
  if (x_e == 0.0) return 0.0;
  auto residual = [&](double x) {
    if (x == 0.0) return -x_e;
    const ScaledIntegrals in = h.scaled_integrals(x, acc);
    const double lost = (x * in.cumulative - in.first_moment) / mu;
    return x - x_e + (in.log_scale == 0.0 ? lost : lost * std::exp(in.log_scale));
  };
  return solve_increasing(residual, 0.0, x_e, 1e-12);
}

LossSolution price_of_anarchy(const IntensityFunction& h, double mu, double c_t, double x_e,
                              const IntegralAccuracy& acc) {
  if (x_e == 0.0) return {};
  LossSolution out;
  out.x_e = x_e;
  out.x_star = social_optimum(h, mu, x_e, acc);
  out.s_equilibrium = social_benefit(h, mu, c_t, x_e, x_e, acc);
  out.s_optimal = social_benefit(h, mu, c_t, x_e, out.x_star, acc);
  if (out.s_equilibrium <= 0.0) {
    if (out.s_optimal <= 0.0) return out;  // nobody arrives within x_e
    throw NumericalError("price of anarchy undefined: equilibrium benefit is zero");
  }
  const double ratio = out.s_optimal / out.s_equilibrium;
  if (!std::isfinite(ratio)) throw NumericalError("price of anarchy is not finite");
  if (ratio < 1.0 - 1e-9) {
    throw NumericalError("optimal threshold does not dominate the equilibrium");
  }
  out.poa = std::max(1.0, ratio);
  return out;
}

LossSolution price_of_anarchy(const IntensityFunction& h, const ModelParams& p,
                              const IntegralAccuracy& acc) {
  return price_of_anarchy(h, p.mu, p.c_t, equilibrium_threshold(p), acc);
}

}  // namespace loss
}  // namespace queue_poa
