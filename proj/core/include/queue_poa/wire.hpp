#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "queue_poa/asymptotics.hpp"
#include "queue_poa/intensity.hpp"
#include "queue_poa/loss_system.hpp"
#include "queue_poa/queue_system.hpp"
#include "queue_poa/simulator.hpp"

namespace queue_poa::wire {

using nlohmann::json;

/// Malformed or inconsistent configuration documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads and parses a JSON document; throws ConfigError on I/O or syntax errors.
json load_file(const std::filesystem::path& path);

/// {"family": "power_law", "beta": 1, "alpha": 1, "scale": 1}. Unknown
/// keys and invalid parameters raise ConfigError.
IntensityFunction intensity_from_json(const json& j);
json to_json(const IntensityFunction& h);

/// {"R": ..., "mu": ..., "c_w": ..., "c_t": ...}
ModelParams model_from_json(const json& j);
json to_json(const ModelParams& p);

json to_json(const loss::LossSolution& s);
json to_json(const asymptotics::LimitEstimate& e);
json to_json(const sim::SimResult& r);

enum class SystemKind { Loss, Queue };

/// A complete simulation run as read from a config document.
struct SimulationRequest {
  SystemKind system = SystemKind::Loss;
  ModelParams model;
  std::optional<IntensityFunction> intensity;  ///< loss system only
  double threshold = 0.0;                      ///< loss system
  double lambda = 0.0;                         ///< queue system
  queue::ThresholdVector thresholds;           ///< queue system
  sim::SimConfig config;
};

SimulationRequest simulation_from_json(const json& j);

}  // namespace queue_poa::wire
