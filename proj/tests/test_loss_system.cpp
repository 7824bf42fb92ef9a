#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "queue_poa/loss_system.hpp"
#include "queue_poa_verify/oracles.hpp"

using namespace queue_poa;
namespace oracle = queue_poa::verify::oracle;

namespace {

std::vector<IntensityFunction> families() {
  return {IntensityFunction::constant(1.0),
          IntensityFunction::power_law(1.0, 1.0),
          IntensityFunction::power_law(0.5, -0.5),
          IntensityFunction::exponential(0.2),
          IntensityFunction::log_shift(),
          IntensityFunction::rational_shift(2.0),
          IntensityFunction::sinusoidal_offset(2.0, 1.0),
          IntensityFunction::staircase(),
          IntensityFunction::piecewise_oscillating(1.0, {1.0, 2.0, 4.0}),
          IntensityFunction::table({{0, 2}, {1, 0.5}, {5, 3}})};
}

}  // namespace

TEST(ModelParams, Validation) {
  EXPECT_NO_THROW((ModelParams{2, 1, 1, 1}.validate()));
  EXPECT_THROW((ModelParams{1, 1, 1, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((ModelParams{2, 0, 1, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((ModelParams{2, 1, 1, -1}.validate()), std::invalid_argument);
}

TEST(EquilibriumThreshold, Examples) {
  EXPECT_DOUBLE_EQ(loss::equilibrium_threshold({2, 1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(loss::equilibrium_threshold({22.5, 1, 9, 1}), 13.5);
  EXPECT_DOUBLE_EQ(loss::equilibrium_threshold({2, 1, 1, 0.5}), 2.0);
}

TEST(SocialBenefit, UniformExamples) {
  const auto one = IntensityFunction::constant(1.0);
  EXPECT_NEAR(loss::social_benefit(one, 1, 1, 4, 2), 2.0, 1e-14);
  EXPECT_NEAR(loss::social_benefit(one, 1, 1, 4, 4), 1.6, 1e-14);
  EXPECT_EQ(loss::social_benefit(one, 1, 1, 4, 0), 0.0);
}

TEST(SocialBenefit, MatchesDirectQuadrature) {
  // Simpson needs a bounded integrand, so the y^-1/2 power law is left out;
  // piecewise families are cut at their kinks and jumps.
  const std::vector<std::pair<IntensityFunction, std::vector<double>>> cases{
      {IntensityFunction::constant(1.0), {}},
      {IntensityFunction::power_law(1.0, 1.0), {}},
      {IntensityFunction::power_law(2.0, 2.5), {}},
      {IntensityFunction::exponential(0.2), {}},
      {IntensityFunction::log_shift(), {}},
      {IntensityFunction::rational_shift(2.0), {}},
      {IntensityFunction::sinusoidal_offset(2.0, 1.0), {}},
      {IntensityFunction::staircase(), {1.0, 10.0}},
      {IntensityFunction::piecewise_oscillating(1.0, {1.0, 2.0, 4.0}), {1.0, 2.0, 4.0}},
      {IntensityFunction::table({{0, 2}, {1, 0.5}, {5, 3}}), {1.0, 5.0}}};
  for (const auto& [h, cuts] : cases) {
    for (double x : {0.3, 1.7, 6.0}) {
      const double direct = oracle::quadrature_loss_benefit(h, 1.3, 0.7, 5.0, x, 20000, cuts);
      EXPECT_NEAR(loss::social_benefit(h, 1.3, 0.7, 5.0, x), direct, 1e-8 * std::abs(direct))
          << h.family_name() << " x=" << x;
    }
  }
}

TEST(SocialOptimum, QuadraticOracle) {
  const auto one = IntensityFunction::constant(1.0);
  EXPECT_NEAR(loss::social_optimum(one, 1, 4), 2.0, 1e-12);
  EXPECT_NEAR(loss::social_optimum(one, 1, 12), 4.0, 1e-12);
  EXPECT_EQ(loss::social_optimum(one, 1, 0), 0.0);
  for (double x_e : {0.01, 0.5, 3.0, 77.0, 1e4}) {
    EXPECT_NEAR(loss::social_optimum(one, 2.0, x_e), oracle::uniform_loss_optimum(1, 2, x_e),
                1e-11 * x_e);
  }
}

TEST(PriceOfAnarchy, UniformExamples) {
  const auto one = IntensityFunction::constant(1.0);
  const loss::LossSolution a = loss::price_of_anarchy(one, {5, 1, 1, 1});
  EXPECT_NEAR(a.x_e, 4.0, 1e-15);
  EXPECT_NEAR(a.poa, 1.25, 1e-12);
  const loss::LossSolution b = loss::price_of_anarchy(one, 1, 1, 12);
  EXPECT_NEAR(b.poa, 8.0 / (72.0 / 13.0), 1e-12);
}

TEST(PriceOfAnarchy, DegenerateThreshold) {
  const loss::LossSolution s = loss::price_of_anarchy(IntensityFunction::log_shift(), 1, 1, 0);
  EXPECT_EQ(s.x_e, 0.0);
  EXPECT_EQ(s.x_star, 0.0);
  EXPECT_EQ(s.s_equilibrium, 0.0);
  EXPECT_EQ(s.s_optimal, 0.0);
  EXPECT_EQ(s.poa, 1.0);
}

TEST(PriceOfAnarchy, TinyThresholdNearOne) {
  for (const auto& h : families()) {
    const double poa = loss::price_of_anarchy(h, 1, 1, 1e-3).poa;
    EXPECT_GE(poa, 1.0);
    EXPECT_LE(poa, 1.01) << h.family_name();
  }
}

TEST(PriceOfAnarchy, SolutionInvariants) {
  for (const auto& h : families()) {
    for (double x_e : {0.1, 1.0, 10.0, 300.0}) {
      const auto s = loss::price_of_anarchy(h, 1.5, 2.0, x_e);
      EXPECT_GE(s.x_star, 0.0);
      EXPECT_LE(s.x_star, s.x_e);
      EXPECT_GE(s.poa, 1.0);
      EXPECT_GE(s.s_optimal, s.s_equilibrium);
    }
  }
}

TEST(SocialOptimum, IncreasingInEquilibriumThreshold) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  for (const auto& h : families()) {
    for (int i = 0; i < 30; ++i) {
      double a = std::pow(10.0, u(rng));
      double b = std::pow(10.0, u(rng));
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      EXPECT_LT(loss::social_optimum(h, 1, a), loss::social_optimum(h, 1, b))
          << h.family_name() << " " << a << " " << b;
    }
  }
}

TEST(SocialOptimum, DominatesGridAndIsStationary) {
  for (const auto& h : families()) {
    const double x_e = 6.0;
    const double x_star = loss::social_optimum(h, 1, x_e);
    const double best = loss::social_benefit(h, 1, 1, x_e, x_star);
    for (int i = 0; i <= 200; ++i) {
      const double x = x_e * i / 200.0;
      EXPECT_GE(best, loss::social_benefit(h, 1, 1, x_e, x) - 1e-13 * best) << h.family_name();
    }
    // Piecewise families have kinks in h but S stays differentiable.
    const double step = 1e-5 * x_star;
    const double slope = (loss::social_benefit(h, 1, 1, x_e, x_star + step) -
                          loss::social_benefit(h, 1, 1, x_e, x_star - step)) /
                         (2 * step);
    EXPECT_LE(std::abs(slope), 1e-6 * best / x_star) << h.family_name();
  }
}

TEST(SocialOptimum, FiniteMassKeepsShareOfThreshold) {
  // Total mass of (1+y)^-2 is 1.
  const auto h = IntensityFunction::rational_shift(2.0);
  const double mu = 1.0;
  for (double x_e = 0.1; x_e < 1e6; x_e *= 3.7) {
    EXPECT_GE(loss::social_optimum(h, mu, x_e) / x_e, mu / (1.0 + mu));
  }
}

TEST(SocialOptimum, InfiniteMassShareVanishes) {
  const auto one = IntensityFunction::constant(1.0);
  EXPECT_LT(loss::social_optimum(one, 1, 1e6) / 1e6, 0.01);
}

TEST(PriceOfAnarchy, ScaleCoupling) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& h : families()) {
    for (int i = 0; i < 5; ++i) {
      const double b = std::pow(10.0, u(rng));
      const double x_e = std::pow(10.0, 1.5 * u(rng) + 0.5);
      const double lhs = loss::price_of_anarchy(h.scaled(b), 1.3, 1.0, x_e).poa;
      const double rhs = loss::price_of_anarchy(h, 1.3 / b, 1.0, x_e).poa;
      EXPECT_NEAR(lhs, rhs, 1e-10) << h.family_name();
    }
  }
}

TEST(PriceOfAnarchy, TravelCostCancels) {
  const auto h = IntensityFunction::log_shift();
  const auto a = loss::price_of_anarchy(h, 1.0, 1.0, 7.0);
  const auto b = loss::price_of_anarchy(h, 1.0, 5.0, 7.0);
  EXPECT_NEAR(a.poa, b.poa, 1e-14);
  EXPECT_NEAR(b.s_optimal, 5.0 * a.s_optimal, 1e-12);
}

TEST(PriceOfAnarchy, ExponentialAtLargeThresholdIsFinite) {
  const auto s = loss::price_of_anarchy(IntensityFunction::exponential(1.0), 1, 1, 2000.0);
  EXPECT_TRUE(std::isfinite(s.poa));
  EXPECT_GT(s.poa, 100.0);
}
