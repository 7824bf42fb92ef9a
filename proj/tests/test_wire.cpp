#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "queue_poa/wire.hpp"

using namespace queue_poa;
using wire::ConfigError;
using wire::json;

TEST(IntensityJson, RoundTripsEveryFamily) {
  const std::vector<json> docs{
      {{"family", "constant"}, {"value", 2.0}},
      {{"family", "power_law"}, {"beta", 1.5}, {"alpha", 0.5}},
      {{"family", "exponential"}, {"gamma", -0.3}},
      {{"family", "log_shift"}, {"scale", 3.0}},
      {{"family", "rational_shift"}, {"p", 2.0}},
      {{"family", "sinusoidal_offset"}, {"a", 2.0}, {"b", 1.0}},
      {{"family", "staircase"}, {"values", {2.0, 1.0}}},
      {{"family", "piecewise_linear_oscillating"}, {"c1", 1.0}, {"breakpoints", {1, 2, 4}}},
      {{"family", "table"}, {"knots", {{0, 1}, {2, 3}}}}};
  for (const auto& doc : docs) {
    const auto h = wire::intensity_from_json(doc);
    const auto again = wire::intensity_from_json(wire::to_json(h));
    for (double y : {0.0, 0.5, 3.0, 50.0}) EXPECT_EQ(h(y), again(y)) << doc.dump();
  }
}

TEST(IntensityJson, ScaleMultiplies) {
  const auto h = wire::intensity_from_json({{"family", "power_law"}, {"alpha", 1}, {"scale", 4}});
  EXPECT_DOUBLE_EQ(h(2.0), 8.0);
}

TEST(IntensityJson, RejectsBadDocuments) {
  const std::vector<json> bad{
      json::array(),
      {{"family", "quartic"}},
      {{"family", "constant"}, {"value", 1.0}, {"extra", 1}},
      {{"family", "power_law"}, {"beta", 1.0}},
      {{"family", "power_law"}, {"alpha", -2.0}},
      {{"family", "rational_shift"}, {"p", "two"}},
      {{"family", "sinusoidal_offset"}, {"a", 1.0}, {"b", 2.0}},
      {{"family", "staircase"}, {"values", {1.0}}},
      {{"family", "table"}, {"knots", {{1, 1}, {2, 3}}}},
      {{"family", "table"}, {"knots", {{0, 1}, {2}}}},
      {{"family", "constant"}, {"value", -1.0}}};
  for (const auto& doc : bad) EXPECT_THROW(wire::intensity_from_json(doc), ConfigError) << doc.dump();
}

TEST(ModelJson, RoundTripAndValidation) {
  const ModelParams p = wire::model_from_json({{"R", 5}, {"mu", 1}, {"c_w", 1}, {"c_t", 2}});
  EXPECT_EQ(p.c_t, 2.0);
  EXPECT_EQ(wire::to_json(p)["R"], 5.0);
  EXPECT_THROW(wire::model_from_json({{"R", 5}, {"mu", 1}, {"c_w", 1}}), ConfigError);
  EXPECT_THROW(wire::model_from_json({{"R", 0.5}, {"mu", 1}, {"c_w", 1}, {"c_t", 1}}), ConfigError);
}

TEST(SimulationJson, LossDefaults) {
  const auto req = wire::simulation_from_json(
      {{"system", "loss"},
       {"model", {{"R", 5}, {"mu", 1}, {"c_w", 1}, {"c_t", 1}}},
       {"intensity", {{"family", "constant"}}}});
  EXPECT_EQ(req.system, wire::SystemKind::Loss);
  EXPECT_EQ(req.threshold, 4.0);
  EXPECT_EQ(req.config.replications, 20);
  EXPECT_EQ(req.config.service, sim::ServiceKind::Exponential);
}

TEST(SimulationJson, QueueDefaultsAndChecks) {
  const json model = {{"R", 3}, {"mu", 1}, {"c_w", 1}, {"c_t", 1}};
  const auto req = wire::simulation_from_json(
      {{"system", "queue"}, {"model", model}, {"lambda", 1.0}, {"service", "deterministic"},
       {"replications", 4}, {"seed", 9}});
  EXPECT_EQ(req.thresholds, (std::vector<double>{2.0, 1.0, 0.0}));
  EXPECT_EQ(req.config.service, sim::ServiceKind::Deterministic);
  EXPECT_EQ(req.config.seed, 9u);
  EXPECT_THROW(wire::simulation_from_json(
                   {{"system", "queue"}, {"model", model}, {"lambda", 1.0}, {"thresholds", {1.0}}}),
               ConfigError);
  EXPECT_THROW(wire::simulation_from_json({{"system", "tandem"}, {"model", model}}), ConfigError);
  EXPECT_THROW(wire::simulation_from_json(
                   {{"system", "queue"}, {"model", model}, {"lambda", 1.0}, {"replications", 1}}),
               ConfigError);
}

TEST(LimitJson, NullValueUnlessConverged) {
  asymptotics::LimitEstimate e;
  e.classification = asymptotics::LimitKind::Diverges;
  EXPECT_TRUE(wire::to_json(e)["value"].is_null());
  e.classification = asymptotics::LimitKind::Converges;
  e.value = 2.0;
  const json j = wire::to_json(e);
  EXPECT_EQ(j["value"], 2.0);
  EXPECT_EQ(j["classification"], "converges");
  EXPECT_EQ(j["method"], "heuristic");
}

TEST(LoadFile, Errors) {
  EXPECT_THROW(wire::load_file("/nonexistent/queue_poa.json"), ConfigError);
  const auto path = std::filesystem::temp_directory_path() / "queue_poa_wire_bad.json";
  std::ofstream(path) << "{\"R\": 1,";
  EXPECT_THROW(wire::load_file(path), ConfigError);
  std::filesystem::remove(path);
}
