#include "queue_poa/wire.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

namespace queue_poa::wire {

namespace {

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!keys.contains(item.key())) {
      throw ConfigError("unknown key \"" + item.key() + "\" in " + what);
    }
  }
}

double number(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw ConfigError(what + ": missing \"" + key + "\"");
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(what + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& what) {
  return j.contains(key) ? number(j, key, what) : fallback;
}

std::uint64_t count_or(const json& j, const char* key, std::uint64_t fallback,
                       const std::string& what) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(what + ": \"" + key + "\" must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<double> numbers(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ConfigError(what + ": \"" + key + "\" must be an array of numbers");
  }
  std::vector<double> out;
  for (const json& v : j.at(key)) {
    if (!v.is_number()) throw ConfigError(what + ": \"" + key + "\" must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

template <class Build>
auto checked(Build&& build) {
  try {
    return build();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

json load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

IntensityFunction intensity_from_json(const json& j) {
  const std::string what = "intensity";
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw ConfigError("intensity needs a string \"family\"");
  }
  const std::string family = j.at("family").get<std::string>();
  const double scale = number_or(j, "scale", 1.0, what);

  IntensityFamily f;
  if (family == "constant") {
    only_keys(j, {"family", "scale", "value"}, what);
    f = Constant{number_or(j, "value", 1.0, what)};
  } else if (family == "power_law") {
    only_keys(j, {"family", "scale", "beta", "alpha"}, what);
    f = PowerLaw{number_or(j, "beta", 1.0, what), number(j, "alpha", what)};
  } else if (family == "exponential") {
    only_keys(j, {"family", "scale", "gamma"}, what);
    f = Exponential{number_or(j, "gamma", 1.0, what)};
  } else if (family == "log_shift") {
    only_keys(j, {"family", "scale"}, what);
    f = LogShift{};
  } else if (family == "rational_shift") {
    only_keys(j, {"family", "scale", "p"}, what);
    f = RationalShift{number_or(j, "p", 1.0, what)};
  } else if (family == "sinusoidal_offset") {
    only_keys(j, {"family", "scale", "a", "b"}, what);
    f = SinusoidalOffset{number_or(j, "a", 2.0, what), number_or(j, "b", 1.0, what)};
  } else if (family == "staircase") {
    only_keys(j, {"family", "scale", "values"}, what);
    StaircaseAlternating s;
    if (j.contains("values")) {
      const std::vector<double> v = numbers(j, "values", what);
      if (v.size() != 2) throw ConfigError("staircase \"values\" must hold two numbers");
      s = {v[0], v[1]};
    }
    f = s;
  } else if (family == "piecewise_linear_oscillating") {
    only_keys(j, {"family", "scale", "c1", "breakpoints"}, what);
    f = PiecewiseLinearOscillating{number_or(j, "c1", 1.0, what), numbers(j, "breakpoints", what)};
  } else if (family == "table") {
    only_keys(j, {"family", "scale", "knots"}, what);
    if (!j.contains("knots") || !j.at("knots").is_array()) {
      throw ConfigError("table needs a \"knots\" array of [y, h] pairs");
    }
    std::vector<Knot> knots;
    for (const json& k : j.at("knots")) {
      if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
        throw ConfigError("table knots must be [y, h] number pairs");
      }
      knots.push_back({k[0].get<double>(), k[1].get<double>()});
    }
    f = PiecewiseTable{std::move(knots)};
  } else {
    throw ConfigError("unknown intensity family \"" + family + "\"");
  }
  return checked([&] { return IntensityFunction(std::move(f), scale); });
}

json to_json(const IntensityFunction& h) {
  json j = std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return {{"family", "constant"}, {"value", f.value}};
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          return {{"family", "power_law"}, {"beta", f.beta}, {"alpha", f.alpha}};
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return {{"family", "exponential"}, {"gamma", f.gamma}};
        } else if constexpr (std::is_same_v<T, LogShift>) {
          return {{"family", "log_shift"}};
        } else if constexpr (std::is_same_v<T, RationalShift>) {
          return {{"family", "rational_shift"}, {"p", f.p}};
        } else if constexpr (std::is_same_v<T, SinusoidalOffset>) {
          return {{"family", "sinusoidal_offset"}, {"a", f.a}, {"b", f.b}};
        } else if constexpr (std::is_same_v<T, StaircaseAlternating>) {
          return {{"family", "staircase"}, {"values", {f.first, f.second}}};
        } else if constexpr (std::is_same_v<T, PiecewiseLinearOscillating>) {
          return {{"family", "piecewise_linear_oscillating"},
                  {"c1", f.first_level},
                  {"breakpoints", f.breakpoints}};
        } else {
          json knots = json::array();
          for (const Knot& k : f.knots) knots.push_back({k.y, k.h});
          return {{"family", "table"}, {"knots", knots}};
        }
      },
      h.family());
  if (h.scale() != 1.0) j["scale"] = h.scale();
  return j;
}

ModelParams model_from_json(const json& j) {
  only_keys(j, {"R", "mu", "c_w", "c_t"}, "model");
  ModelParams p{number(j, "R", "model"), number(j, "mu", "model"), number(j, "c_w", "model"),
                number(j, "c_t", "model")};
  checked([&] {
    p.validate();
    return 0;
  });
  return p;
}

json to_json(const ModelParams& p) {
  return {{"R", p.R}, {"mu", p.mu}, {"c_w", p.c_w}, {"c_t", p.c_t}};
}

json to_json(const loss::LossSolution& s) {
  return {{"x_e", s.x_e},
          {"x_star", s.x_star},
          {"S_e", s.s_equilibrium},
          {"S_star", s.s_optimal},
          {"poa", s.poa}};
}

json to_json(const asymptotics::LimitEstimate& e) {
  json grid = json::array();
  for (const auto& s : e.grid) grid.push_back({s.x, s.ratio});
  json j = {{"classification", asymptotics::to_string(e.classification)},
            {"method", "heuristic"},
            {"finite_mass", e.finite_mass},
            {"spread", e.spread},
            {"grid", grid}};
  j["value"] = e.classification == asymptotics::LimitKind::Converges ? json(e.value) : json();
  return j;
}

json to_json(const sim::SimResult& r) {
  json j = {{"benefit_rate_mean", r.benefit_rate_mean},
            {"benefit_rate_stderr", r.benefit_rate_stderr},
            {"occupancy", r.occupancy},
            {"occupancy_stderr", r.occupancy_stderr},
            {"joined_count", r.joined_count},
            {"balked_count", r.balked_count},
            {"replications", r.replications},
            {"analytics_guaranteed", r.analytics_guaranteed}};
  if (!r.buckets.empty()) {
    json buckets = json::array();
    for (const auto& b : r.buckets) {
      buckets.push_back({{"lo", b.lo},
                         {"hi", b.hi},
                         {"count", b.count},
                         {"sum_utility", b.sum_utility},
                         {"sum_sq_utility", b.sum_sq_utility},
                         {"sum_distance", b.sum_distance}});
    }
    j["distance_buckets"] = buckets;
  }
  return j;
}

SimulationRequest simulation_from_json(const json& j) {
  const std::string what = "simulation config";
  only_keys(j,
            {"system", "model", "intensity", "threshold", "thresholds", "lambda", "service",
             "horizon_events", "warmup_events", "seed", "replications", "threads",
             "distance_buckets"},
            what);
  SimulationRequest req;
  if (!j.contains("system") || !j.at("system").is_string()) {
    throw ConfigError("simulation config needs \"system\": \"loss\" or \"queue\"");
  }
  const std::string system = j.at("system").get<std::string>();
  if (!j.contains("model")) throw ConfigError("simulation config needs \"model\"");
  req.model = model_from_json(j.at("model"));

  if (system == "loss") {
    req.system = SystemKind::Loss;
    if (!j.contains("intensity")) throw ConfigError("loss simulation needs \"intensity\"");
    req.intensity = intensity_from_json(j.at("intensity"));
    req.threshold = j.contains("threshold") ? number(j, "threshold", what)
                                            : loss::equilibrium_threshold(req.model);
    if (!(req.threshold > 0.0)) throw ConfigError("threshold must be positive");
  } else if (system == "queue") {
    req.system = SystemKind::Queue;
    req.lambda = number(j, "lambda", what);
    const queue::QueueParams qp{req.lambda, req.model};
    checked([&] {
      qp.validate();
      return 0;
    });
    req.thresholds = j.contains("thresholds") ? numbers(j, "thresholds", what)
                                              : queue::equilibrium_thresholds(qp);
    if (req.thresholds.size() != static_cast<std::size_t>(qp.n_e())) {
      throw ConfigError("\"thresholds\" must have n_e = " + std::to_string(qp.n_e()) +
                        " entries");
    }
  } else {
    throw ConfigError("unknown system \"" + system + "\"");
  }

  sim::SimConfig& c = req.config;
  if (j.contains("service")) {
    const json& s = j.at("service");
    if (!s.is_string()) throw ConfigError("\"service\" must be \"exponential\" or \"deterministic\"");
    const std::string kind = s.get<std::string>();
    if (kind == "exponential") {
      c.service = sim::ServiceKind::Exponential;
    } else if (kind == "deterministic") {
      c.service = sim::ServiceKind::Deterministic;
    } else {
      throw ConfigError("unknown service \"" + kind + "\"");
    }
  }
  c.horizon_events = count_or(j, "horizon_events", c.horizon_events, what);
  c.warmup_events = count_or(j, "warmup_events", c.warmup_events, what);
  c.seed = count_or(j, "seed", c.seed, what);
  c.replications = static_cast<int>(count_or(j, "replications", 20, what));
  c.threads = static_cast<unsigned>(count_or(j, "threads", 0, what));
  c.distance_buckets = static_cast<int>(count_or(j, "distance_buckets", 0, what));
  checked([&] {
    c.validate();
    return 0;
  });
  return req;
}

}  // namespace queue_poa::wire
