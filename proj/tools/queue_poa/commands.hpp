#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace queue_poa::cli {

/// Raised when `verify` finds a failing criterion; the report was already
/// streamed to stdout and is attached for callers that need it.
struct VerificationFailed {
  std::string report;
};

enum class Format { Json, Csv };

struct LossOptions {
  std::string model;
  std::string intensity;
  std::optional<double> x;
  std::optional<std::string> sweep;
  Format format = Format::Json;
  unsigned threads = 0;
};

struct LimitOptions {
  std::string intensity;
  std::string grid = "1e1:1e7:log";
  bool curve = false;
  bool tex = false;
};

struct QueueOptions {
  std::string model;
  double lambda = 0.0;
  bool optimize = false;
  int restarts = 8;
  std::optional<std::string> thresholds;
  std::optional<std::uint64_t> seed;
};

struct UnboundedOptions {
  std::string s_grid = "5:1000:log";
  double rho = 1.0;
  double mu = 1.0;
  Format format = Format::Csv;
  unsigned threads = 0;
};

struct SimulateOptions {
  std::string config;
  bool compare_analytic = false;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

struct VerifyOptions {
  std::vector<int> only;
};

struct SweepOptions {
  std::string kind;  ///< loss | benefit | limit | unbounded | queue
  std::string range;
  std::optional<std::string> model;
  std::optional<std::string> intensity;
  double rho = 1.0;
  double mu = 1.0;
  int restarts = 8;
  Format format = Format::Csv;
  unsigned threads = 0;
};

// Each command returns the complete document to print (verify streams its
// report instead and returns an empty string).
std::string run_loss(const LossOptions& o);
std::string run_limit(const LimitOptions& o);
std::string run_queue(const QueueOptions& o);
std::string run_unbounded(const UnboundedOptions& o);
std::string run_simulate(const SimulateOptions& o);
std::string run_verify(const VerifyOptions& o);
std::string run_sweep(const SweepOptions& o);

/// Seed precedence: explicit flag, then QUEUE_POA_SEED, then `fallback`.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t fallback);

}  // namespace queue_poa::cli
