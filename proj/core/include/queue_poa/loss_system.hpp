#pragma once

#include "queue_poa/intensity.hpp"
#include "queue_poa/numerics.hpp"

namespace queue_poa {

/// Economic parameters shared by the loss system and the queue system.
struct ModelParams {
  double R = 0.0;    ///< reward per completed service
  double mu = 1.0;   ///< service rate
  double c_w = 1.0;  ///< waiting cost per unit time
  double c_t = 1.0;  ///< travel cost per unit length

  double nu() const { return R * mu / c_w; }
  double kappa() const { return c_t * mu / c_w; }

  /// Throws std::invalid_argument unless all parameters are finite and
  /// positive and nu > 1.
  void validate() const;
};

namespace loss {

struct LossSolution {
  double x_e = 0.0;
  double x_star = 0.0;
  double s_equilibrium = 0.0;
  double s_optimal = 0.0;
  double poa = 1.0;
};

/// Largest distance at which joining an idle server still pays:
/// (R mu - c_w) / (c_t mu).
double equilibrium_threshold(const ModelParams& p);

/// Long-run social benefit rate when everyone within distance x joins an
/// idle server: c_t (x_e Lambda(x) - M(x)) / (1 + Lambda(x) / mu).
double social_benefit(const IntensityFunction& h, double mu, double c_t, double x_e, double x,
                      const IntegralAccuracy& acc = {});

/// The threshold maximizing social_benefit: the root of
/// (x Lambda(x) - M(x)) / mu + x = x_e on [0, x_e].
double social_optimum(const IntensityFunction& h, double mu, double x_e,
                      const IntegralAccuracy& acc = {});

LossSolution price_of_anarchy(const IntensityFunction& h, double mu, double c_t, double x_e,
                              const IntegralAccuracy& acc = {});
LossSolution price_of_anarchy(const IntensityFunction& h, const ModelParams& p,
                              const IntegralAccuracy& acc = {});

}  // namespace loss
}  // namespace queue_poa
