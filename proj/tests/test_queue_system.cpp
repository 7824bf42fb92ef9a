#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "queue_poa/loss_system.hpp"
#include "queue_poa/queue_system.hpp"
#include "queue_poa_verify/oracles.hpp"

using namespace queue_poa;
using namespace queue_poa::queue;
namespace oracle = queue_poa::verify::oracle;

TEST(QueueParams, EquilibriumLength) {
  EXPECT_EQ((QueueParams{1.0, {3, 1, 1, 1}}).n_e(), 3);
  EXPECT_EQ((QueueParams{1.0, {2.5, 1, 1, 1}}).n_e(), 2);
  EXPECT_EQ((QueueParams{1.0, {1.5, 1, 1, 1}}).n_e(), 1);
  // nu = 3 up to rounding noise.
  EXPECT_EQ((QueueParams{1.0, {0.1 * 3 * 10, 1, 1, 1}}).n_e(), 3);
  EXPECT_THROW((QueueParams{-1.0, {3, 1, 1, 1}}).validate(), std::invalid_argument);
}

TEST(EquilibriumThresholds, Example) {
  const auto x = equilibrium_thresholds({1.0, {3, 1, 1, 1}});
  ASSERT_EQ(x.size(), 3u);
  EXPECT_DOUBLE_EQ(x[0], 2.0);
  EXPECT_DOUBLE_EQ(x[1], 1.0);
  EXPECT_DOUBLE_EQ(x[2], 0.0);
  EXPECT_EQ(equilibrium_thresholds({1.0, {2, 1, 1, 1}}), (ThresholdVector{1.0, 0.0}));
}

TEST(Stationary, Example) {
  const auto pi = stationary(1.0, {2.0, 1.0});
  ASSERT_EQ(pi.size(), 3u);
  EXPECT_NEAR(pi[0], 0.2, 1e-15);
  EXPECT_NEAR(pi[1], 0.4, 1e-15);
  EXPECT_NEAR(pi[2], 0.4, 1e-15);
  const auto trivial = stationary(2.0, {});
  ASSERT_EQ(trivial.size(), 1u);
  EXPECT_EQ(trivial[0], 1.0);
}

TEST(Stationary, MatchesBalanceEquations) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double rho = std::pow(10.0, u(rng) - 1.5);
    std::vector<double> x(1 + trial % 6);
    for (auto& v : x) v = u(rng);
    const auto pi = stationary(rho, x);
    EXPECT_NEAR(std::accumulate(pi.begin(), pi.end(), 0.0), 1.0, 1e-12);
    const auto reference = oracle::balance_solve(rho, x);
    for (std::size_t i = 0; i < pi.size(); ++i) EXPECT_NEAR(pi[i], reference[i], 1e-12);
    EXPECT_LT(oracle::balance_residual(rho, x, pi), 1e-12);
  }
}

TEST(Stationary, ZeroThresholdTruncates) {
  const auto pi = stationary(1.0, {1.0, 0.0, 5.0});
  EXPECT_GT(pi[1], 0.0);
  EXPECT_EQ(pi[2], 0.0);
  EXPECT_EQ(pi[3], 0.0);
}

TEST(Stationary, ExtremeValuesStayFinite) {
  const auto pi = stationary(1e6, std::vector<double>(40, 1e6));
  for (double v : pi) EXPECT_TRUE(std::isfinite(v));
  // Each level carries 1e12 times the mass of the one below.
  EXPECT_NEAR(pi.back(), 1.0 - 1e-12, 1e-15);
  EXPECT_NEAR(pi[pi.size() - 2] / pi.back(), 1e-12, 1e-24);
}

TEST(SocialBenefit, Example) {
  const QueueParams p{1.0, {3, 1, 1, 1}};
  EXPECT_NEAR(social_benefit(p, equilibrium_thresholds(p)), 0.6, 1e-14);
}

TEST(SocialBenefit, MatchesLiteralSum) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const QueueParams p{0.2 + 2 * u(rng), {2 + 8 * u(rng), 0.5 + u(rng), 0.2 + u(rng), 0.1 + u(rng)}};
    const auto xe = equilibrium_thresholds(p);
    std::vector<double> x(xe.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = xe[0] * 1.5 * u(rng);
    const double expected =
        oracle::queue_benefit_sum(p.lambda, p.model.mu, p.model.c_t, xe, x);
    EXPECT_NEAR(social_benefit(p, x), expected, 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(SocialBenefit, RejectsWrongLength) {
  const QueueParams p{1.0, {3, 1, 1, 1}};
  EXPECT_THROW(social_benefit(p, {1.0}), std::invalid_argument);
}

TEST(SocialBenefit, SingleLengthReducesToLossSystem) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double mu = 0.5 + u(rng);
    const double c_w = 0.5 + u(rng);
    const double c_t = 0.5 + u(rng);
    const double R = c_w / mu * (1.1 + 0.8 * u(rng));
    const QueueParams p{0.3 + u(rng), {R, mu, c_w, c_t}};
    ASSERT_EQ(p.n_e(), 1);
    const double x_e = equilibrium_thresholds(p)[0];
    const double x = x_e * u(rng);
    const double loss =
        loss::social_benefit(IntensityFunction::constant(p.lambda), mu, c_t, x_e, x);
    EXPECT_NEAR(social_benefit(p, {x}), loss, 1e-12 * std::max(1.0, loss));
  }
}

TEST(Optimize, ImprovesOnEquilibrium) {
  const QueueParams p{1.0, {3, 1, 1, 1}};
  const auto r = optimize_social(p);
  EXPECT_GE(r.benefit, 0.6);
  EXPECT_NEAR(r.benefit, 0.7776, 1e-3);
  EXPECT_NEAR(social_benefit(p, r.x), r.benefit, 1e-14);
  EXPECT_GE(poa_queue(p), 1.0);
}

TEST(Optimize, MatchesLossOptimumForSingleLength) {
  const QueueParams p{1.0, {1.5, 1, 1, 1}};
  const auto r = optimize_social(p);
  ASSERT_EQ(r.x.size(), 1u);
  EXPECT_NEAR(r.x[0], oracle::uniform_loss_optimum(1, 1, 0.5), 1e-8);
}

TEST(Optimize, DeterministicForFixedSeed) {
  const QueueParams p{0.7, {6.3, 1, 1, 1}};
  const auto a = optimize_social(p, {.restarts = 4, .seed = 11});
  const auto b = optimize_social(p, {.restarts = 4, .seed = 11});
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.benefit, b.benefit);
}

TEST(Optimize, DominatesRandomVectors) {
  const QueueParams p{0.7, {6.3, 1, 1, 1}};
  const auto r = optimize_social(p);
  const auto xe = equilibrium_thresholds(p);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 2 * xe[0]);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> x(xe.size());
    for (auto& v : x) v = u(rng);
    EXPECT_LE(social_benefit(p, x), r.benefit + 1e-12);
  }
}

TEST(UnboundedInstance, Parameters) {
  const QueueParams p = unbounded_instance(3.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(p.model.c_t, 1.0);
  EXPECT_DOUBLE_EQ(p.model.c_w, 9.0);
  EXPECT_DOUBLE_EQ(p.model.R, 22.5);
  EXPECT_EQ(p.n_e(), 2);
  const auto xe = equilibrium_thresholds(p);
  EXPECT_DOUBLE_EQ(xe[0], 13.5);
  EXPECT_DOUBLE_EQ(xe[1], 4.5);
}

TEST(LowerBound, MatchesFactorOracle) {
  for (double s : {2.5, 3.0, 5.0, 17.0, 250.0, 1e4}) {
    for (double rho : {0.3, 1.0, 4.0}) {
      const double a = lower_bound_final(s, rho);
      EXPECT_NEAR(a, oracle::lower_bound_factors(s, rho, 1.0), 1e-10 * a);
    }
  }
  EXPECT_NEAR(lower_bound_final(3.0, 1.0), 3.0417094, 1e-6);
  EXPECT_THROW(lower_bound_final(2.0, 1.0), std::domain_error);
}

TEST(LowerBound, EqualsBenefitRatio) {
  for (double s : {3.0, 10.0, 40.0}) {
    const QueueParams p = unbounded_instance(s, 1.0, 1.0);
    const auto xe = equilibrium_thresholds(p);
    const double x_star = loss::social_optimum(IntensityFunction::constant(p.lambda), p.model.mu,
                                               xe[0]);
    const double ratio = social_benefit(p, {x_star, 0.0}) / social_benefit(p, xe);
    EXPECT_NEAR(lower_bound_final(s, 1.0), ratio, 1e-10 * ratio);
    EXPECT_GE(poa_queue(p), ratio * (1 - 1e-9));
  }
}

TEST(LowerBound, GrowsWithoutBound) {
  double previous = 0.0;
  for (double s = 3.0; s <= 3e4; s *= 3.0) {
    const double v = lower_bound_final(s, 1.0);
    EXPECT_GT(v, previous);
    previous = v;
  }
  EXPECT_GT(previous, 50.0);
}
