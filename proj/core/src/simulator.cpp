#include "queue_poa/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace queue_poa::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t replication)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~replication))) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log(1.0 - uniform()) / rate; }

 private:
  std::mt19937_64 engine_;
};

struct Replication {
  double benefit = 0.0;
  double elapsed = 0.0;
  std::vector<double> state_time;
  std::uint64_t joined = 0;
  std::uint64_t balked = 0;
  std::vector<DistanceBucket> buckets;
};

struct Economics {
  double R;
  double c_w;
  double c_t;
  double mu;
  ServiceKind service;
};

// One replication of a single-server FCFS system. `decide(state, stream)`
// returns the joining customer's distance, or a negative value to balk.
template <class Decide>
Replication run_replication(std::size_t states, double arrival_rate, double max_distance,
                            const Economics& econ, const SimConfig& cfg, std::uint64_t index,
                            Decide&& decide) {
  Replication out;
  out.state_time.assign(states, 0.0);
  out.buckets.resize(static_cast<std::size_t>(cfg.distance_buckets));
  Stream stream(cfg.seed, index);

  std::deque<double> departures;
  std::size_t state = 0;
  double last_change = 0.0;
  bool measuring = false;
  double start = 0.0;
  double now = 0.0;

  auto hold = [&](double until) {
    if (measuring) out.state_time[state] += until - last_change;
    last_change = until;
  };

  for (std::uint64_t event = 0; event < cfg.horizon_events; ++event) {
    now += stream.exponential(arrival_rate);
    while (!departures.empty() && departures.front() <= now) {
      hold(departures.front());
      departures.pop_front();
      --state;
    }
    if (event == cfg.warmup_events) {
      hold(now);
      measuring = true;
      start = now;
    }

    const double distance = decide(state, stream);
    if (distance < 0.0) {
      if (measuring) ++out.balked;
      continue;
    }
    const double service =
        econ.service == ServiceKind::Exponential ? stream.exponential(econ.mu) : 1.0 / econ.mu;
    const double begin = departures.empty() ? now : departures.back();
    const double leave = begin + service;
    hold(now);
    departures.push_back(leave);
    ++state;
    if (!measuring) continue;

    ++out.joined;
    const double utility = econ.R - econ.c_w * (leave - now) - econ.c_t * distance;
    out.benefit += utility;
    if (!out.buckets.empty()) {
      const auto n = out.buckets.size();
      auto b = static_cast<std::size_t>(distance / max_distance * static_cast<double>(n));
      DistanceBucket& bucket = out.buckets[std::min(b, n - 1)];
      ++bucket.count;
      bucket.sum_utility += utility;
      bucket.sum_sq_utility += utility * utility;
      bucket.sum_distance += distance;
    }
  }
  while (!departures.empty() && departures.front() <= now) {
    hold(departures.front());
    departures.pop_front();
    --state;
  }
  hold(now);
  out.elapsed = now - start;
  return out;
}

template <class Run>
SimResult run_all(const SimConfig& cfg, std::size_t states, double max_distance, Run&& run) {
  const auto reps = static_cast<std::size_t>(cfg.replications);
  std::vector<Replication> results(reps);
  unsigned workers = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(reps));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto work = [&] {
    for (std::size_t i = next++; i < reps; i = next++) {
      try {
        results[i] = run(i);
      } catch (...) {
        std::lock_guard<std::mutex> guard(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  SimResult out;
  out.replications = cfg.replications;
  out.occupancy.assign(states, 0.0);
  out.occupancy_stderr.assign(states, 0.0);
  std::vector<double> occ_sq(states, 0.0);
  double sum = 0.0;
  double sum_sq = 0.0;
  const auto n = static_cast<double>(reps);
  for (const Replication& r : results) {
    const double rate = r.benefit / r.elapsed;
    out.replication_rates.push_back(rate);
    sum += rate;
    sum_sq += rate * rate;
    for (std::size_t s = 0; s < states; ++s) {
      const double share = r.state_time[s] / r.elapsed;
      out.occupancy[s] += share;
      occ_sq[s] += share * share;
    }
    out.joined_count += r.joined;
    out.balked_count += r.balked;
  }
  auto stderr_of = [n](double total, double total_sq) {
    const double mean = total / n;
    const double var = std::max(0.0, (total_sq - n * mean * mean) / (n - 1.0));
    return std::sqrt(var / n);
  };
  out.benefit_rate_mean = sum / n;
  out.benefit_rate_stderr = stderr_of(sum, sum_sq);
  for (std::size_t s = 0; s < states; ++s) {
    out.occupancy_stderr[s] = stderr_of(out.occupancy[s], occ_sq[s]);
    out.occupancy[s] /= n;
  }

  if (cfg.distance_buckets > 0) {
    const auto nb = static_cast<std::size_t>(cfg.distance_buckets);
    out.buckets.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      DistanceBucket& m = out.buckets[b];
      m.lo = max_distance * static_cast<double>(b) / static_cast<double>(nb);
      m.hi = max_distance * static_cast<double>(b + 1) / static_cast<double>(nb);
      for (const Replication& r : results) {
        m.count += r.buckets[b].count;
        m.sum_utility += r.buckets[b].sum_utility;
        m.sum_sq_utility += r.buckets[b].sum_sq_utility;
        m.sum_distance += r.buckets[b].sum_distance;
      }
    }
  }
  return out;
}

SimResult idle_result(const SimConfig& cfg, std::size_t states) {
  SimResult out;
  out.replications = cfg.replications;
  out.occupancy.assign(states, 0.0);
  out.occupancy.front() = 1.0;
  out.occupancy_stderr.assign(states, 0.0);
  out.replication_rates.assign(static_cast<std::size_t>(cfg.replications), 0.0);
  return out;
}

}  // namespace

void SimConfig::validate() const {
  if (!(horizon_events > warmup_events)) {
    throw std::invalid_argument("horizon_events must exceed warmup_events");
  }
  if (replications < 2) throw std::invalid_argument("replications must be at least 2");
  if (distance_buckets < 0) throw std::invalid_argument("distance_buckets must be >= 0");
}

SimResult simulate_loss(const IntensityFunction& h, const ModelParams& p, double x,
                        const SimConfig& cfg) {
  cfg.validate();
  p.validate();
  if (!(x > 0.0 && std::isfinite(x))) throw std::invalid_argument("threshold must be positive");
  const double rate = h.cumulative(x);
  if (!std::isfinite(rate)) throw NumericalError("arrival rate Lambda(x) is not finite");
  if (rate == 0.0) return idle_result(cfg, 2);

  const Economics econ{p.R, p.c_w, p.c_t, p.mu, cfg.service};
  return run_all(cfg, 2, x, [&](std::size_t index) {
    return run_replication(2, rate, x, econ, cfg, index, [&](std::size_t state, Stream& s) {
      if (state != 0) return -1.0;
      return h.inverse_cumulative(s.uniform() * rate, x);
    });
  });
}

SimResult simulate_queue(const queue::QueueParams& p, const queue::ThresholdVector& x,
                         const SimConfig& cfg) {
  cfg.validate();
  p.validate();
  const auto n_e = static_cast<std::size_t>(p.n_e());
  if (x.size() != n_e) throw std::invalid_argument("threshold vector must have length n_e");
  for (double v : x) {
    if (!(std::isfinite(v) && v >= 0.0)) throw std::invalid_argument("thresholds must be >= 0");
  }
  const double reach = *std::max_element(x.begin(), x.end());
  SimResult out;
  if (reach == 0.0) {
    out = idle_result(cfg, n_e + 1);
  } else {
    const Economics econ{p.model.R, p.model.c_w, p.model.c_t, p.model.mu, cfg.service};
    out = run_all(cfg, n_e + 1, reach, [&](std::size_t index) {
      return run_replication(n_e + 1, p.lambda * reach, reach, econ, cfg, index,
                             [&](std::size_t state, Stream& s) {
                               const double d = s.uniform() * reach;
                               return state < n_e && d <= x[state] ? d : -1.0;
                             });
    });
  }
  out.analytics_guaranteed = cfg.service == ServiceKind::Exponential;
  return out;
}

}  // namespace queue_poa::sim
