#pragma once

#include <cstdint>
#include <vector>

#include "queue_poa/intensity.hpp"
#include "queue_poa/loss_system.hpp"
#include "queue_poa/queue_system.hpp"

namespace queue_poa::sim {

enum class ServiceKind { Exponential, Deterministic };

struct SimConfig {
  ServiceKind service = ServiceKind::Exponential;
  std::uint64_t horizon_events = 1'000'000;  ///< arrivals per replication, warmup included
  std::uint64_t warmup_events = 10'000;
  std::uint64_t seed = 1;
  int replications = 20;
  unsigned threads = 0;      ///< 0 = hardware concurrency
  int distance_buckets = 0;  ///< joiner statistics per distance bucket when > 0

  /// Throws std::invalid_argument unless horizon > warmup and replications >= 2.
  void validate() const;
};

/// Realized utility of joiners whose distance fell in [lo, hi).
struct DistanceBucket {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t count = 0;
  double sum_utility = 0.0;
  double sum_sq_utility = 0.0;
  double sum_distance = 0.0;
};

struct SimResult {
  double benefit_rate_mean = 0.0;
  double benefit_rate_stderr = 0.0;
  std::vector<double> occupancy;  ///< time-average share of each queue length
  std::vector<double> occupancy_stderr;
  std::uint64_t joined_count = 0;
  std::uint64_t balked_count = 0;
  int replications = 0;
  /// False when the analytic formulas do not cover the simulated dynamics
  /// (queue system with deterministic service).
  bool analytics_guaranteed = true;
  std::vector<double> replication_rates;
  std::vector<DistanceBucket> buckets;
};

/// Loss system with joining threshold x: arrivals at rate Lambda(x), each
/// joining iff the server is idle; a joiner at distance d earns
/// R - c_w * service - c_t * d.
SimResult simulate_loss(const IntensityFunction& h, const ModelParams& p, double x,
                        const SimConfig& cfg);

/// Queue system with uniform intensity: an arrival at distance d that sees
/// i customers joins iff i < n_e and d <= x_i; served customers earn
/// R - c_w * sojourn - c_t * d under FCFS.
SimResult simulate_queue(const queue::QueueParams& p, const queue::ThresholdVector& x,
                         const SimConfig& cfg);

}  // namespace queue_poa::sim
