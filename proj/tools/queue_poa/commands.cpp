#include "commands.hpp"

#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "queue_poa/asymptotics.hpp"
#include "queue_poa/loss_system.hpp"
#include "queue_poa/queue_system.hpp"
#include "queue_poa/simulator.hpp"
#include "queue_poa/wire.hpp"
#include "queue_poa_verify/criteria.hpp"
#include "range.hpp"

namespace queue_poa::cli {

namespace {

using wire::ConfigError;
using wire::json;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string number17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render(const Table& t, Format format) {
  if (format == Format::Json) {
    json out = json::array();
    for (const auto& row : t.rows) {
      json item = json::object();
      for (std::size_t c = 0; c < t.columns.size(); ++c) item[t.columns[c]] = row[c];
      out.push_back(item);
    }
    return out.dump(2) + "\n";
  }
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + t.columns[c];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + number17(row[c]);
    out += "\n";
  }
  return out;
}

std::string render(const json& j) { return j.dump(2) + "\n"; }

// Evaluates `row` at every point on worker threads; rows keep grid order.
Table tabulate(std::vector<std::string> columns, const std::vector<double>& points,
               const std::function<std::vector<double>(double)>& row, unsigned threads) {
  Table t{std::move(columns), std::vector<std::vector<double>>(points.size())};
  unsigned workers = threads != 0 ? threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(points.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(points.size());
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        t.rows[i] = row(points[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return t;
}

std::vector<double> range_points(const std::string& text, const char* expected_variable) {
  Range r = parse_range(text);
  if (r.variable && *r.variable != expected_variable) {
    throw ConfigError("range variable must be \"" + std::string(expected_variable) + "\", got \"" +
                      *r.variable + "\"");
  }
  return r.points;
}

void require_positive(double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0)) {
    throw ConfigError(std::string(name) + " must be finite and positive");
  }
}

Table loss_table(const IntensityFunction& h, const ModelParams& p,
                 const std::vector<double>& points, unsigned threads) {
  for (double x_e : points) {
    if (!(x_e >= 0.0)) throw ConfigError("x_e values must be >= 0");
  }
  return tabulate({"x_e", "x_star", "S_e", "S_star", "poa"}, points,
                  [&](double x_e) {
                    const loss::LossSolution s = loss::price_of_anarchy(h, p.mu, p.c_t, x_e);
                    return std::vector<double>{s.x_e, s.x_star, s.s_equilibrium, s.s_optimal,
                                               s.poa};
                  },
                  threads);
}

Table unbounded_table(const std::vector<double>& points, double rho, double mu,
                      unsigned threads) {
  for (double s : points) {
    if (!(s > 2.0)) throw ConfigError("the construction needs s > 2");
  }
  require_positive(rho, "rho");
  require_positive(mu, "mu");
  return tabulate({"s", "lower_bound"}, points,
                  [&](double s) {
                    return std::vector<double>{s, queue::lower_bound_final(s, rho, mu)};
                  },
                  threads);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size() || errno != 0) {
      throw ConfigError("bad number \"" + item + "\" in list \"" + text + "\"");
    }
    out.push_back(v);
  }
  return out;
}

json z_score(double estimate, double stderr_, double target) {
  if (stderr_ > 0.0) return (estimate - target) / stderr_;
  return estimate == target ? json(0.0) : json();
}

}  // namespace

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("QUEUE_POA_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || errno != 0 || *env == '-') {
      throw ConfigError("QUEUE_POA_SEED must be a nonnegative integer");
    }
    return v;
  }
  return fallback;
}

std::string run_loss(const LossOptions& o) {
  const ModelParams p = wire::model_from_json(wire::load_file(o.model));
  const IntensityFunction h = wire::intensity_from_json(wire::load_file(o.intensity));
  if (o.sweep) {
    return render(loss_table(h, p, range_points(*o.sweep, "x_e"), o.threads), Format::Csv);
  }
  const loss::LossSolution s = loss::price_of_anarchy(h, p);
  if (o.format == Format::Csv) return render(loss_table(h, p, {s.x_e}, 1), Format::Csv);
  json out = wire::to_json(s);
  if (o.x) {
    if (!(*o.x >= 0.0)) throw ConfigError("--x must be >= 0");
    out["x"] = *o.x;
    out["S_x"] = loss::social_benefit(h, p.mu, p.c_t, s.x_e, *o.x);
  }
  return render(out);
}

std::string run_limit(const LimitOptions& o) {
  const IntensityFunction h = wire::intensity_from_json(wire::load_file(o.intensity));
  const std::vector<double> grid = range_points(o.grid, "x");
  for (double x : grid) {
    if (!(x > 0.0)) throw ConfigError("limit grid must be positive");
  }
  if (o.curve) {
    return render(tabulate({"x", o.tex ? "tex_ratio" : "t99_ratio"}, grid,
                           [&](double x) {
                             return std::vector<double>{x, o.tex ? asymptotics::tex_ratio(h, x)
                                                                 : asymptotics::t99_ratio(h, x)};
                           },
                           1),
                  Format::Csv);
  }
  const asymptotics::LimitEstimate e =
      o.tex ? asymptotics::tex_limit(h, grid) : asymptotics::classify_limit(h, {}, grid);
  json out = wire::to_json(e);
  out["ratio"] = o.tex ? "tex" : "t99";
  return render(out);
}

std::string run_queue(const QueueOptions& o) {
  const queue::QueueParams p{o.lambda, wire::model_from_json(wire::load_file(o.model))};
  require_positive(o.lambda, "--lambda");
  if (o.restarts < 0) throw ConfigError("--restarts must be >= 0");
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const queue::ThresholdVector xe = queue::equilibrium_thresholds(p);
  const double s_e = queue::social_benefit(p, xe);
  json out = {{"lambda", p.lambda},
              {"rho", p.rho()},
              {"n_e", p.n_e()},
              {"equilibrium_thresholds", xe},
              {"stationary", queue::stationary(p.rho(), xe)},
              {"S_e", s_e}};
  if (o.thresholds) {
    const queue::ThresholdVector x = parse_list(*o.thresholds);
    if (x.size() != xe.size()) {
      throw ConfigError("--thresholds needs n_e = " + std::to_string(xe.size()) + " entries");
    }
    for (double v : x) {
      if (!(v >= 0.0 && std::isfinite(v))) throw ConfigError("thresholds must be >= 0");
    }
    out["thresholds"] = x;
    out["stationary_x"] = queue::stationary(p.rho(), x);
    out["S_x"] = queue::social_benefit(p, x);
  }
  if (o.optimize) {
    queue::OptimizationOptions opt;
    opt.restarts = o.restarts;
    opt.seed = resolve_seed(o.seed, opt.seed);
    const queue::OptimizationResult best = queue::optimize_social(p, opt);
    out["optimal_thresholds"] = best.x;
    out["stationary_optimal"] = queue::stationary(p.rho(), best.x);
    out["S_opt"] = best.benefit;
    out["poa"] = best.benefit / s_e;
    out["restarts"] = o.restarts;
  }
  return render(out);
}

std::string run_unbounded(const UnboundedOptions& o) {
  return render(unbounded_table(range_points(o.s_grid, "s"), o.rho, o.mu, o.threads), o.format);
}

std::string run_simulate(const SimulateOptions& o) {
  wire::SimulationRequest req = wire::simulation_from_json(wire::load_file(o.config));
  req.config.seed = resolve_seed(o.seed, req.config.seed);
  if (o.threads) req.config.threads = *o.threads;

  sim::SimResult r;
  json analytic;
  if (req.system == wire::SystemKind::Loss) {
    r = sim::simulate_loss(*req.intensity, req.model, req.threshold, req.config);
    if (o.compare_analytic) {
      const double x_e = loss::equilibrium_threshold(req.model);
      const double s = loss::social_benefit(*req.intensity, req.model.mu, req.model.c_t, x_e,
                                            req.threshold);
      const double idle = 1.0 / (1.0 + req.intensity->cumulative(req.threshold) / req.model.mu);
      analytic = {{"benefit_rate", s},
                  {"z_score", z_score(r.benefit_rate_mean, r.benefit_rate_stderr, s)},
                  {"occupancy", {idle, 1.0 - idle}}};
    }
  } else {
    const queue::QueueParams p{req.lambda, req.model};
    r = sim::simulate_queue(p, req.thresholds, req.config);
    if (o.compare_analytic) {
      const double s = queue::social_benefit(p, req.thresholds);
      analytic = {{"benefit_rate", s},
                  {"z_score", z_score(r.benefit_rate_mean, r.benefit_rate_stderr, s)},
                  {"occupancy", queue::stationary(p.rho(), req.thresholds)}};
    }
  }
  json out = wire::to_json(r);
  out["system"] = req.system == wire::SystemKind::Loss ? "loss" : "queue";
  out["seed"] = req.config.seed;
  if (o.compare_analytic) out["analytic"] = analytic;
  return render(out);
}

std::string run_verify(const VerifyOptions& o) {
  const std::vector<int> ids = o.only.empty() ? verify::criterion_ids() : o.only;
  for (int id : ids) {
    if (id < 1 || id > 13) throw ConfigError("criteria are numbered 1 to 13");
  }
  // Lines are streamed as criteria finish; the simulator criterion is slow.
  std::string report;
  bool ok = true;
  for (int id : ids) {
    const verify::CriterionResult r = verify::run_criterion(id);
    ok = ok && r.passed;
    const std::string line = verify::format_line(r) + "\n";
    report += line;
    std::fputs(line.c_str(), stdout);
    std::fflush(stdout);
  }
  if (!ok) throw VerificationFailed{report};
  return {};
}

std::string run_sweep(const SweepOptions& o) {
  auto need = [](const std::optional<std::string>& path, const char* flag) {
    if (!path) throw ConfigError(std::string("sweep needs ") + flag);
    return wire::load_file(*path);
  };
  if (o.kind == "loss") {
    const ModelParams p = wire::model_from_json(need(o.model, "--model"));
    const IntensityFunction h = wire::intensity_from_json(need(o.intensity, "--intensity"));
    return render(loss_table(h, p, range_points(o.range, "x_e"), o.threads), o.format);
  }
  if (o.kind == "benefit") {
    const ModelParams p = wire::model_from_json(need(o.model, "--model"));
    const IntensityFunction h = wire::intensity_from_json(need(o.intensity, "--intensity"));
    const double x_e = loss::equilibrium_threshold(p);
    const std::vector<double> points = range_points(o.range, "x");
    for (double x : points) {
      if (!(x >= 0.0)) throw ConfigError("thresholds must be >= 0");
    }
    return render(tabulate({"x", "S"}, points,
                           [&](double x) {
                             return std::vector<double>{
                                 x, loss::social_benefit(h, p.mu, p.c_t, x_e, x)};
                           },
                           o.threads),
                  o.format);
  }
  if (o.kind == "limit") {
    const IntensityFunction h = wire::intensity_from_json(need(o.intensity, "--intensity"));
    const std::vector<double> points = range_points(o.range, "x");
    for (double x : points) {
      if (!(x > 0.0)) throw ConfigError("x values must be positive");
    }
    return render(tabulate({"x", "t99_ratio", "pano_ratio"}, points,
                           [&](double x) {
                             return std::vector<double>{x, asymptotics::t99_ratio(h, x),
                                                        asymptotics::pano_ratio(h, x)};
                           },
                           o.threads),
                  o.format);
  }
  if (o.kind == "unbounded") {
    return render(unbounded_table(range_points(o.range, "s"), o.rho, o.mu, o.threads), o.format);
  }
  if (o.kind == "queue") {
    const ModelParams model = wire::model_from_json(need(o.model, "--model"));
    const std::vector<double> points = range_points(o.range, "lambda");
    for (double l : points) require_positive(l, "lambda");
    queue::OptimizationOptions opt;
    opt.restarts = o.restarts;
    opt.seed = resolve_seed(std::nullopt, opt.seed);
    return render(tabulate({"lambda", "n_e", "S_e", "S_opt", "poa"}, points,
                           [&](double lambda) {
                             const queue::QueueParams p{lambda, model};
                             const double s_e =
                                 queue::social_benefit(p, queue::equilibrium_thresholds(p));
                             const double s_opt = queue::optimize_social(p, opt).benefit;
                             return std::vector<double>{lambda, double(p.n_e()), s_e, s_opt,
                                                        s_opt / s_e};
                           },
                           o.threads),
                  o.format);
  }
  throw ConfigError("unknown sweep kind \"" + o.kind +
                    "\" (expected loss, benefit, limit, unbounded or queue)");
}

}  // namespace queue_poa::cli
