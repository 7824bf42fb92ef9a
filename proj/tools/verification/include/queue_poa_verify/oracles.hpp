#pragma once

#include <vector>

#include "queue_poa/intensity.hpp"

// Reference computations that share no code path with the library's
// solvers. Used by the acceptance criteria and the unit tests.
namespace queue_poa::verify::oracle {

/// Optimal loss threshold for h = lambda, rate mu: the positive root of
/// (lambda / mu) x^2 / 2 + x - x_e = 0 by the quadratic formula.
double uniform_loss_optimum(double lambda, double mu, double x_e);

/// (x_e lambda x - lambda x^2 / 2) c_t / (1 + lambda x / mu).
double uniform_loss_benefit(double lambda, double mu, double c_t, double x_e, double x);

/// Loss-system social benefit with both integrals taken by plain composite
/// Simpson quadrature of h and (x_e - y) h on [0, x]. Each interval between
/// consecutive `cuts` inside (0, x) gets its own `panels` panels.
double quadrature_loss_benefit(const IntensityFunction& h, double mu, double c_t, double x_e,
                               double x, int panels = 20000, std::vector<double> cuts = {});

/// Stationary distribution of the birth-death chain with birth rate
/// rho * x_i and unit death rate, from a partial-pivot Gaussian elimination
/// of the global balance equations with one row replaced by sum(pi) = 1.
std::vector<double> balance_solve(double rho, const std::vector<double>& x);

/// Max-norm residual of the global balance equations at `pi`.
double balance_residual(double rho, const std::vector<double>& x, const std::vector<double>& pi);

/// Queue social benefit as the literal ratio of sums
/// [sum_n (xe_{n-1} - x_{n-1}/2) lambda c_t rho^{n-1} x_0..x_{n-1}] /
/// [1 + sum_n rho^n x_0..x_{n-1}].
double queue_benefit_sum(double lambda, double mu, double c_t, const std::vector<double>& xe,
                         const std::vector<double>& x);

/// The unbounded-PoA lower bound assembled factor by factor, with x* from
/// the quadratic formula.
double lower_bound_factors(double s, double rho, double mu);

}  // namespace queue_poa::verify::oracle
