#pragma once

#include <cstdint>
#include <vector>

#include "queue_poa/loss_system.hpp"

namespace queue_poa::queue {

/// Observable single-server queue with uniform arrival intensity lambda per
/// unit length.
struct QueueParams {
  double lambda = 1.0;
  ModelParams model;

  double rho() const { return lambda / model.mu; }
  /// Largest queue length at which a customer at distance 0 still joins.
  /// Values of nu within 1e-12 of an integer are snapped to it first.
  int n_e() const;

  void validate() const;
};

using ThresholdVector = std::vector<double>;
using StationaryDistribution = std::vector<double>;

/// x_i = (nu - (i + 1)) / kappa for i = 0 .. n_e - 1.
ThresholdVector equilibrium_thresholds(const QueueParams& p);

/// pi_i proportional to rho^i x_0 ... x_{i-1}, computed in log space.
StationaryDistribution stationary(double rho, const ThresholdVector& x);

/// Social benefit rate of the threshold vector `x` (size n_e):
/// mu c_t sum_n (x^e_{n-1} - x_{n-1} / 2) pi_n.
double social_benefit(const QueueParams& p, const ThresholdVector& x);

struct OptimizationOptions {
  int restarts = 8;
  std::uint64_t seed = 0x5eed'0f'0e71;
  int max_sweeps = 500;
};

struct OptimizationResult {
  ThresholdVector x;
  double benefit = 0.0;
  int best_start = 0;  ///< index of the winning start (0 = equilibrium)
};

/// Multi-start coordinate search. Starts are the equilibrium vector,
/// (x*, 0, ..., 0) with x* the loss-system optimum for h = lambda, and
/// `restarts` random vectors in [0, x^e_0]^{n_e}. The result dominates
/// every start; it is a lower bound on the optimum, not a certificate.
OptimizationResult optimize_social(const QueueParams& p, const OptimizationOptions& opt = {});

/// Optimized benefit over equilibrium benefit.
double poa_queue(const QueueParams& p, const OptimizationOptions& opt = {});

/// The instance behind the unbounded-PoA construction for s > 2:
/// c_t = 1, c_w = s^2 mu, R = (2s - 1) s^2 / (s - 1), lambda = rho mu.
QueueParams unbounded_instance(double s, double rho, double mu);

/// S(x*, 0) / S(x^e_0, x^e_1) for unbounded_instance(s, rho, mu), written
/// in closed form. Throws std::domain_error for s <= 2.
double lower_bound_final(double s, double rho, double mu = 1.0);

}  // namespace queue_poa::queue
