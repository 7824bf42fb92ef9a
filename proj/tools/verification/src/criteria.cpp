#include "queue_poa_verify/criteria.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "queue_poa/asymptotics.hpp"
#include "queue_poa/loss_system.hpp"
#include "queue_poa/queue_system.hpp"
#include "queue_poa/simulator.hpp"
#include "queue_poa_verify/oracles.hpp"

namespace queue_poa::verify {

namespace {

using asymptotics::LimitKind;

// Collects failed checks; a criterion passes when none were recorded.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& text) { notes_.push_back(text); }
  bool passed() const { return failures_.empty(); }
  std::string summary() const {
    std::ostringstream out;
    const auto& items = failures_.empty() ? notes_ : failures_;
    for (std::size_t i = 0; i < items.size(); ++i) out << (i ? "; " : "") << items[i];
    return out.str();
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> geometric(double lo, double hi, int per_decade) {
  std::vector<double> out;
  const int steps = static_cast<int>(std::lround(std::log10(hi / lo) * per_decade));
  for (int i = 0; i <= steps; ++i) out.push_back(lo * std::pow(10.0, double(i) / per_decade));
  return out;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

void power_law_limits(Checks& c) {
  double worst = 0.0;
  for (double alpha : {-0.5, 0.0, 1.0, 2.0}) {
    const IntensityFunction h = IntensityFunction::power_law(1.0, alpha);
    for (double x : asymptotics::default_grid()) {
      worst = std::max(worst, std::abs(asymptotics::t99_ratio(h, x) - (alpha + 2.0)));
    }
    const auto e = asymptotics::classify_limit(h);
    c.expect(e.classification == LimitKind::Converges && std::abs(e.value - (alpha + 2.0)) <= 1e-6,
             "alpha=" + fmt(alpha) + " classified " + std::string(to_string(e.classification)) +
                 " " + fmt(e.value));
  }
  c.expect(worst <= 1e-9, "max |t99 - (alpha+2)| = " + fmt(worst));
  c.note("max |t99 - (alpha+2)| = " + fmt(worst));
}

void small_threshold(Checks& c) {
  const std::map<std::string, IntensityFunction> cases{
      {"constant", IntensityFunction::constant(1.0)},
      {"power a=1", IntensityFunction::power_law(1.0, 1.0)},
      {"exp", IntensityFunction::exponential(1.0)}};
  for (const auto& [name, h] : cases) {
    const double poa = loss::price_of_anarchy(h, 1.0, 1.0, 1e-3).poa;
    c.expect(poa >= 1.0 && poa <= 1.01, name + " poa = " + fmt(poa));
    c.note(name + " " + fmt(poa));
  }
}

void finite_mass(Checks& c) {
  const IntensityFunction h = IntensityFunction::rational_shift(2.0);
  double previous = INFINITY;
  for (double x_e : geometric(1e2, 1e4, 3)) {
    const double poa = loss::price_of_anarchy(h, 1.0, 1.0, x_e).poa;
    c.expect(poa < previous, "poa not decreasing at x_e = " + fmt(x_e));
    previous = poa;
  }
  c.expect(std::abs(previous - 1.0) <= 0.02, "poa(1e4) = " + fmt(previous));
  c.note("poa(1e4) = " + fmt(previous));
}

void named_limits(Checks& c) {
  struct Case {
    std::string name;
    IntensityFunction h;
    LimitKind kind;
    double value;
  };
  const std::vector<Case> cases{
      {"ln(1+y)", IntensityFunction::log_shift(), LimitKind::Converges, 2.0},
      {"1/(1+y)", IntensityFunction::rational_shift(1.0), LimitKind::Converges, 1.0},
      {"e^y", IntensityFunction::exponential(1.0), LimitKind::Diverges, 0.0},
      {"2+sin y", IntensityFunction::sinusoidal_offset(2.0, 1.0), LimitKind::Converges, 2.0}};
  for (const Case& k : cases) {
    const auto e = asymptotics::classify_limit(k.h);
    bool ok = e.classification == k.kind;
    if (ok && k.kind == LimitKind::Converges) ok = std::abs(e.value - k.value) <= 0.01;
    const std::string got = std::string(to_string(e.classification)) +
                            (e.classification == LimitKind::Converges ? " " + fmt(e.value) : "");
    c.expect(ok, k.name + " classified " + got);
    c.note(k.name + " " + got);
  }
}

void staircase_bounds(Checks& c) {
  const IntensityFunction h = IntensityFunction::staircase();
  for (double x : {2.0, 200.0, 20000.0}) {
    const double r = asymptotics::pano_ratio(h, x);
    c.expect(r <= 20.0 / 11.0 + 1e-6, "ratio(" + fmt(x) + ") = " + fmt(r) + " > 20/11");
  }
  for (double x : {20.0, 2000.0, 200000.0}) {
    const double r = asymptotics::pano_ratio(h, x);
    c.expect(r >= 20.0 / 9.0 - 1e-6, "ratio(" + fmt(x) + ") = " + fmt(r) + " < 20/9");
  }
  const auto e = asymptotics::classify_limit(h);
  c.expect(e.classification == LimitKind::Oscillates,
           "classified " + std::string(to_string(e.classification)));
  c.note("bounds hold, oscillates");
}

void monotone_bounds(Checks& c) {
  const std::vector<std::pair<std::string, IntensityFunction>> increasing{
      {"y^0.5", IntensityFunction::power_law(1.0, 0.5)},
      {"y", IntensityFunction::power_law(1.0, 1.0)},
      {"3y^2", IntensityFunction::power_law(3.0, 2.0)},
      {"e^y", IntensityFunction::exponential(1.0)},
      {"ln(1+y)", IntensityFunction::log_shift()}};
  const std::vector<std::pair<std::string, IntensityFunction>> decreasing{
      {"1/(1+y)", IntensityFunction::rational_shift(1.0)},
      {"(1+y)^-2", IntensityFunction::rational_shift(2.0)},
      {"(1+y)^-0.5", IntensityFunction::rational_shift(0.5)},
      {"e^-y", IntensityFunction::exponential(-1.0)},
      {"y^-0.5", IntensityFunction::power_law(1.0, -0.5)}};
  const std::vector<double> grid = geometric(1e-2, 1e7, 3);
  for (const auto& [name, h] : increasing) {
    for (double x : grid) {
      const double r = asymptotics::t99_ratio(h, x);
      c.expect(r >= 2.0 - 1e-9, name + " ratio(" + fmt(x) + ") = " + fmt(r));
    }
  }
  for (const auto& [name, h] : decreasing) {
    for (double x : grid) {
      const double r = asymptotics::t99_ratio(h, x);
      c.expect(r <= 2.0 + 1e-9, name + " ratio(" + fmt(x) + ") = " + fmt(r));
    }
  }
  c.note(std::to_string(grid.size() * 10) + " points checked");
}

void loss_closed_form(Checks& c) {
  const IntensityFunction one = IntensityFunction::constant(1.0);
  for (double x_e : {4.0, 12.0}) {
    const loss::LossSolution s = loss::price_of_anarchy(one, 1.0, 1.0, x_e);
    const double x_star = oracle::uniform_loss_optimum(1.0, 1.0, x_e);
    const double poa = oracle::uniform_loss_benefit(1.0, 1.0, 1.0, x_e, x_star) /
                       oracle::uniform_loss_benefit(1.0, 1.0, 1.0, x_e, x_e);
    c.expect(std::abs(s.x_star - x_star) <= 1e-8, "x*(" + fmt(x_e) + ") = " + fmt(s.x_star));
    c.expect(std::abs(s.poa - poa) <= 1e-8, "poa(" + fmt(x_e) + ") = " + fmt(s.poa));
    c.note("x_e=" + fmt(x_e) + " x*=" + fmt(s.x_star) + " poa=" + fmt(s.poa));
  }
  c.expect(std::abs(oracle::uniform_loss_optimum(1, 1, 4) - 2.0) <= 1e-12 &&
               std::abs(oracle::uniform_loss_optimum(1, 1, 12) - 4.0) <= 1e-12,
           "oracle disagrees with the stated optima");
}

void scale_coupling(Checks& c) {
  const std::vector<IntensityFunction> families{
      IntensityFunction::constant(1.5),        IntensityFunction::power_law(2.0, 1.0),
      IntensityFunction::log_shift(),          IntensityFunction::rational_shift(2.0),
      IntensityFunction::sinusoidal_offset(2.0, 1.0), IntensityFunction::exponential(0.3),
      IntensityFunction::staircase(),          IntensityFunction::table({{0, 1}, {3, 4}, {8, 2}})};
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const IntensityFunction& h = families[rng() % families.size()];
    const double b = log_uniform(rng, 0.1, 10.0);
    const double x_e = log_uniform(rng, 0.1, 100.0);
    const double mu = log_uniform(rng, 0.5, 2.0);
    const double scaled = loss::price_of_anarchy(h.scaled(b), mu, 1.0, x_e).poa;
    const double slowed = loss::price_of_anarchy(h, mu / b, 1.0, x_e).poa;
    worst = std::max(worst, std::abs(scaled - slowed));
  }
  c.expect(worst <= 1e-10, "max |difference| = " + fmt(worst));
  c.note("max |difference| = " + fmt(worst));
}

void stationary_distribution(Checks& c) {
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double rho = log_uniform(rng, 0.1, 10.0);
    std::vector<double> x(1 + rng() % 6);
    for (double& v : x) v = uniform(rng, 0.0, 5.0);
    const auto pi = queue::stationary(rho, x);
    const auto reference = oracle::balance_solve(rho, x);
    for (std::size_t i = 0; i < pi.size(); ++i) {
      worst = std::max(worst, std::abs(pi[i] - reference[i]));
    }
    worst = std::max(worst, oracle::balance_residual(rho, x, pi));
  }
  c.expect(worst <= 1e-12, "max deviation = " + fmt(worst));
  const auto pi = queue::stationary(1.0, {2.0, 1.0});
  const double example = std::max({std::abs(pi[0] - 0.2), std::abs(pi[1] - 0.4),
                                   std::abs(pi[2] - 0.4)});
  c.expect(example <= 1e-12, "(rho=1, x=(2,1)) deviation " + fmt(example));
  c.note("max deviation = " + fmt(worst));
}

void queue_benefit(Checks& c) {
  const queue::QueueParams p{1.0, {3.0, 1.0, 1.0, 1.0}};
  const queue::ThresholdVector xe = queue::equilibrium_thresholds(p);
  const double s = queue::social_benefit(p, xe);
  const double literal = oracle::queue_benefit_sum(1.0, 1.0, 1.0, xe, xe);
  c.expect(std::abs(s - 0.6) <= 1e-12 && std::abs(literal - 0.6) <= 1e-12,
           "S(2,1,0) = " + fmt(s));
  const double x_star = oracle::uniform_loss_optimum(1.0, 1.0, xe[0]);
  const double single = queue::social_benefit(p, {x_star, 0.0, 0.0});
  const auto best = queue::optimize_social(p);
  c.expect(best.benefit >= 0.6 && best.benefit >= single,
           "optimizer S = " + fmt(best.benefit) + " below a start");
  c.note("S(eq) = " + fmt(s) + ", S(x*,0,0) = " + fmt(single) + ", S(opt) = " +
         fmt(best.benefit));
}

void unbounded_growth(Checks& c) {
  double previous = 0.0;
  double worst = 0.0;
  double last = 0.0;
  for (double s : {5.0, 10.0, 50.0, 100.0, 500.0, 1000.0}) {
    const double bound = queue::lower_bound_final(s, 1.0);
    c.expect(bound > previous, "not increasing at s = " + fmt(s));
    previous = last = bound;

    const queue::QueueParams p = queue::unbounded_instance(s, 1.0, 1.0);
    const queue::ThresholdVector xe = queue::equilibrium_thresholds(p);
    const double x_star = loss::social_optimum(IntensityFunction::constant(p.lambda), 1.0, xe[0]);
    const double ratio = queue::social_benefit(p, {x_star, 0.0}) / queue::social_benefit(p, xe);
    worst = std::max({worst, std::abs(bound - ratio),
                      std::abs(bound - oracle::lower_bound_factors(s, 1.0, 1.0))});
  }
  c.expect(last > 50.0, "bound(1000) = " + fmt(last));
  c.expect(worst <= 1e-8, "consistency deviation " + fmt(worst));
  c.note("bound(1000) = " + fmt(last) + ", consistency " + fmt(worst));
}

bool within(double estimate, double stderr_, double target) {
  return std::abs(estimate - target) <= 3.0 * stderr_;
}

void simulator_agreement(Checks& c) {
  sim::SimConfig cfg;
  std::uint64_t seed = 1;

  struct LossCase {
    std::string name;
    IntensityFunction h;
    ModelParams p;
    double x;
  };
  const std::vector<LossCase> losses{
      {"h=1", IntensityFunction::constant(1.0), {5.0, 1.0, 1.0, 1.0}, 2.0},
      {"h=y", IntensityFunction::power_law(1.0, 1.0), {3.0, 2.0, 2.0, 1.0}, 1.5},
      {"h=2+sin y", IntensityFunction::sinusoidal_offset(2.0, 1.0), {4.0, 1.0, 1.0, 0.5}, 3.0}};
  sim::SimResult exponential_first;
  for (const LossCase& k : losses) {
    cfg.seed = seed++;
    const sim::SimResult r = sim::simulate_loss(k.h, k.p, k.x, cfg);
    const double x_e = loss::equilibrium_threshold(k.p);
    const double s = loss::social_benefit(k.h, k.p.mu, k.p.c_t, x_e, k.x);
    const double idle = 1.0 / (1.0 + k.h.cumulative(k.x) / k.p.mu);
    c.expect(within(r.benefit_rate_mean, r.benefit_rate_stderr, s),
             k.name + " S " + fmt(r.benefit_rate_mean) + " vs " + fmt(s));
    c.expect(within(r.occupancy[0], r.occupancy_stderr[0], idle),
             k.name + " idle " + fmt(r.occupancy[0]) + " vs " + fmt(idle));
    if (&k == &losses.front()) exponential_first = r;
  }

  cfg.seed = seed++;
  cfg.service = sim::ServiceKind::Deterministic;
  const LossCase& base = losses.front();
  const sim::SimResult d = sim::simulate_loss(base.h, base.p, base.x, cfg);
  const double pooled = std::hypot(d.benefit_rate_stderr, exponential_first.benefit_rate_stderr);
  c.expect(std::abs(d.benefit_rate_mean - exponential_first.benefit_rate_mean) <= 3.0 * pooled,
           "deterministic S " + fmt(d.benefit_rate_mean) + " vs exponential " +
               fmt(exponential_first.benefit_rate_mean));
  c.expect(within(d.benefit_rate_mean, d.benefit_rate_stderr, 2.0),
           "deterministic S " + fmt(d.benefit_rate_mean) + " vs 2");
  c.expect(within(d.occupancy[0], d.occupancy_stderr[0], 1.0 / 3.0),
           "deterministic idle " + fmt(d.occupancy[0]));
  cfg.service = sim::ServiceKind::Exponential;

  struct QueueCase {
    std::string name;
    queue::QueueParams p;
    queue::ThresholdVector x;
  };
  const std::vector<QueueCase> queues{{"R=3 x=(2,1,0)", {1.0, {3.0, 1.0, 1.0, 1.0}}, {2, 1, 0}},
                                      {"R=2.5 x=(2,1)", {1.0, {2.5, 1.0, 1.0, 1.0}}, {2, 1}}};
  for (const QueueCase& k : queues) {
    cfg.seed = seed++;
    const sim::SimResult r = sim::simulate_queue(k.p, k.x, cfg);
    const double s = queue::social_benefit(k.p, k.x);
    const auto pi = queue::stationary(k.p.rho(), k.x);
    c.expect(within(r.benefit_rate_mean, r.benefit_rate_stderr, s),
             k.name + " S " + fmt(r.benefit_rate_mean) + " vs " + fmt(s));
    for (std::size_t i = 0; i < pi.size(); ++i) {
      c.expect(within(r.occupancy[i], r.occupancy_stderr[i], pi[i]),
               k.name + " pi_" + std::to_string(i) + " " + fmt(r.occupancy[i]) + " vs " +
                   fmt(pi[i]));
    }
  }
  c.note("3 loss, 1 deterministic loss, 2 queue instances within 3 standard errors");
}

void reduction(Checks& c) {
  std::mt19937_64 rng(13);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    queue::QueueParams p;
    p.model.mu = log_uniform(rng, 0.5, 2.0);
    p.model.c_w = log_uniform(rng, 0.5, 2.0);
    p.model.c_t = log_uniform(rng, 0.5, 2.0);
    p.model.R = uniform(rng, 1.05, 1.95) * p.model.c_w / p.model.mu;
    p.lambda = log_uniform(rng, 0.5, 2.0);
    if (p.n_e() != 1) {
      c.expect(false, "instance does not have n_e = 1");
      continue;
    }
    const IntensityFunction h = IntensityFunction::constant(p.lambda);
    const loss::LossSolution l = loss::price_of_anarchy(h, p.model);
    const auto best = queue::optimize_social(p);
    const double s_e = queue::social_benefit(p, queue::equilibrium_thresholds(p));
    const double poa = queue::poa_queue(p);
    worst = std::max({worst, std::abs(best.x[0] - l.x_star), std::abs(best.benefit - l.s_optimal),
                      std::abs(s_e - l.s_equilibrium), std::abs(poa - l.poa)});
  }
  c.expect(worst <= 1e-8, "max deviation " + fmt(worst));
  c.note("max deviation " + fmt(worst));
}

struct Definition {
  std::string title;
  std::function<void(Checks&)> body;
  double time_limit;  // seconds; 0 = none
};

const std::map<int, Definition>& definitions() {
  static const std::map<int, Definition> table{
      {1, {"power-law limits equal alpha + 2", power_law_limits, 1.0}},
      {2, {"PoA near 1 for tiny x_e", small_threshold, 1.0}},
      {3, {"finite total mass drives PoA to 1", finite_mass, 5.0}},
      {4, {"limit classification of named intensities", named_limits, 10.0}},
      {5, {"alternating staircase bounds and oscillation", staircase_bounds, 5.0}},
      {6, {"monotone intensities bound the ratio by 2", monotone_bounds, 0.0}},
      {7, {"loss-system closed-form instance", loss_closed_form, 0.0}},
      {8, {"exact scale coupling of h and mu", scale_coupling, 0.0}},
      {9, {"queue stationary distribution", stationary_distribution, 0.0}},
      {10, {"queue social benefit and optimizer dominance", queue_benefit, 0.0}},
      {11, {"unbounded PoA lower bound grows", unbounded_growth, 5.0}},
      {12, {"simulator agrees with analytics", simulator_agreement, 120.0}},
      {13, {"queue with n_e = 1 reduces to loss system", reduction, 0.0}},
  };
  return table;
}

}  // namespace

std::vector<int> criterion_ids() {
  std::vector<int> ids;
  for (const auto& [id, def] : definitions()) ids.push_back(id);
  return ids;
}

CriterionResult run_criterion(int id) {
  const auto it = definitions().find(id);
  if (it == definitions().end()) {
    throw std::invalid_argument("no criterion " + std::to_string(id));
  }
  CriterionResult out;
  out.id = id;
  out.title = it->second.title;
  Checks checks;
  const auto start = std::chrono::steady_clock::now();
  try {
    it->second.body(checks);
  } catch (const std::exception& e) {
    checks.expect(false, std::string("exception: ") + e.what());
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double limit = it->second.time_limit;
  if (limit > 0.0) {
    checks.expect(out.seconds < limit, "took " + fmt(out.seconds) + " s, limit " + fmt(limit));
  }
  out.passed = checks.passed();
  out.detail = checks.summary();
  return out;
}

std::string format_line(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "%s criterion %2d  %-46s (%.3f s)", r.passed ? "PASS" : "FAIL",
                r.id, r.title.c_str(), r.seconds);
  return r.detail.empty() ? std::string(head) : std::string(head) + "  " + r.detail;
}

}  // namespace queue_poa::verify
