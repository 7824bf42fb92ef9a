#include <cstdio>
#include <exception>
#include <map>
#include <string>
#include <stdexcept>

#include <CLI11.hpp>

#include "commands.hpp"
#include "queue_poa/numerics.hpp"
#include "queue_poa/wire.hpp"
#include "range.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;
constexpr int kVerificationFailure = 3;

using queue_poa::cli::Format;

const std::map<std::string, Format> kFormats{{"json", Format::Json}, {"csv", Format::Csv}};

}  // namespace

int main(int argc, char** argv) {
  using namespace queue_poa::cli;

  CLI::App app{
      "queue-poa: equilibrium and socially optimal joining thresholds, social benefit and the\n"
      "price of anarchy for observable queues whose customers pay a travel cost.\n"
      "Exit codes: 1 configuration error, 2 numerical failure, 3 verification failure."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  LossOptions loss;
  auto* loss_cmd = app.add_subcommand(
      "loss",
      "Loss system (one server, no waiting room).\n"
      "  x_e = (R mu - c_w) / (c_t mu)\n"
      "  S(x) = c_t (x_e Lambda(x) - M(x)) / (1 + Lambda(x)/mu),  Lambda = int_0^x h,"
      "  M = int_0^x y h\n"
      "  x* solves (x Lambda(x) - M(x))/mu + x = x_e;  poa = S(x*) / S(x_e)");
  loss_cmd->add_option("--model", loss.model, "Model JSON {R, mu, c_w, c_t}")->required();
  loss_cmd->add_option("--intensity", loss.intensity, "Intensity JSON")->required();
  loss_cmd->add_option("--x", loss.x, "Also report S at this threshold");
  loss_cmd->add_option("--sweep", loss.sweep,
                       "CSV sweep over x_e, e.g. x_e=0.1:100:20,log "
                       "(columns x_e,x_star,S_e,S_star,poa)");
  loss_cmd->add_option("--format", loss.format, "json or csv")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  loss_cmd->add_option("--threads", loss.threads, "Sweep worker threads (0 = all cores)");

  LimitOptions limit;
  auto* limit_cmd = app.add_subcommand(
      "limit",
      "Large-x_e limit of the price of anarchy, classified heuristically from\n"
      "  t99(x) = Lambda(x) / (Lambda(x) - M(x)/x)   (or 2 + x h'(x)/h(x) with --tex)\n"
      "as converges(value), diverges, oscillates or undetermined.");
  limit_cmd->add_option("--intensity", limit.intensity, "Intensity JSON")->required();
  limit_cmd->add_option("--grid", limit.grid, "Sample grid a:b:n[,log]")
      ->default_val("1e1:1e7:log");
  limit_cmd->add_flag("--curve", limit.curve, "Emit CSV x,ratio instead of the estimate");
  limit_cmd->add_flag("--tex", limit.tex, "Use 2 + x h'(x)/h(x) instead of t99");

  QueueOptions queue;
  auto* queue_cmd = app.add_subcommand(
      "queue",
      "Observable queue with uniform intensity lambda.\n"
      "  n_e = floor(R mu / c_w),  x_i^e = (nu - (i+1)) / kappa\n"
      "  pi_i ~ rho^i x_0 ... x_{i-1},  S = mu c_t sum_n (x^e_{n-1} - x_{n-1}/2) pi_n");
  queue_cmd->add_option("--model", queue.model, "Model JSON {R, mu, c_w, c_t}")->required();
  queue_cmd->add_option("--lambda", queue.lambda, "Arrival intensity per unit length")
      ->required();
  queue_cmd->add_flag("--optimize", queue.optimize, "Search for socially better thresholds");
  queue_cmd->add_option("--restarts", queue.restarts, "Random restarts for --optimize")
      ->default_val(8);
  queue_cmd->add_option("--thresholds", queue.thresholds, "Evaluate S at x0,x1,...");
  queue_cmd->add_option("--seed", queue.seed, "Seed for random restarts");

  UnboundedOptions unbounded;
  auto* unbounded_cmd = app.add_subcommand(
      "unbounded",
      "Lower bound on the queue price of anarchy for the two-threshold construction\n"
      "c_t = 1, c_w = s^2 mu, R = (2s-1) s^2 / (s-1):\n"
      "  2 (1/(1/x* + rho)) (1 - x*/(2 x0)) (1 + rho x0 + rho^2 x0 x1) / (x0 + rho x1^2)");
  unbounded_cmd->add_option("--s-grid", unbounded.s_grid, "Grid of s > 2")
      ->default_val("5:1000:log");
  unbounded_cmd->add_option("--rho", unbounded.rho, "lambda / mu")->default_val(1.0);
  unbounded_cmd->add_option("--mu", unbounded.mu, "Service rate")->default_val(1.0);
  unbounded_cmd->add_option("--format", unbounded.format, "csv or json")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  unbounded_cmd->add_option("--threads", unbounded.threads, "Worker threads (0 = all cores)");

  SimulateOptions simulate;
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "Discrete-event Monte Carlo run of the loss or queue system.");
  simulate_cmd->add_option("--config", simulate.config, "Simulation JSON")->required();
  simulate_cmd->add_flag("--compare-analytic", simulate.compare_analytic,
                         "Append the analytic benefit rate, occupancy and z-score");
  simulate_cmd->add_option("--seed", simulate.seed, "Override the config seed");
  simulate_cmd->add_option("--threads", simulate.threads, "Replication worker threads");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand(
      "verify", "Run the numerical acceptance criteria 1-13; exit 3 on any failure.");
  verify_cmd->add_option("--only", verify.only, "Run only these criteria")->delimiter(',');

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand(
      "sweep",
      "Evaluate one quantity over a grid (parallel, output in grid order).\n"
      "  loss:      x_e grid  -> x_e,x_star,S_e,S_star,poa   (--model, --intensity)\n"
      "  benefit:   x grid    -> x,S                        (--model, --intensity)\n"
      "  limit:     x grid    -> x,t99_ratio,pano_ratio     (--intensity)\n"
      "  unbounded: s grid    -> s,lower_bound              (--rho, --mu)\n"
      "  queue:     lambda grid -> lambda,n_e,S_e,S_opt,poa (--model)");
  sweep_cmd->add_option("--kind", sweep.kind, "loss, benefit, limit, unbounded or queue")
      ->required();
  sweep_cmd->add_option("--range", sweep.range, "Grid [name=]a:b:n[,log]")->required();
  sweep_cmd->add_option("--model", sweep.model, "Model JSON");
  sweep_cmd->add_option("--intensity", sweep.intensity, "Intensity JSON");
  sweep_cmd->add_option("--rho", sweep.rho, "lambda / mu for kind=unbounded")->default_val(1.0);
  sweep_cmd->add_option("--mu", sweep.mu, "Service rate for kind=unbounded")->default_val(1.0);
  sweep_cmd->add_option("--restarts", sweep.restarts, "Random restarts for kind=queue")
      ->default_val(8);
  sweep_cmd->add_option("--format", sweep.format, "csv or json")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    std::string out;
    if (*loss_cmd) {
      out = run_loss(loss);
    } else if (*limit_cmd) {
      out = run_limit(limit);
    } else if (*queue_cmd) {
      out = run_queue(queue);
    } else if (*unbounded_cmd) {
      out = run_unbounded(unbounded);
    } else if (*simulate_cmd) {
      out = run_simulate(simulate);
    } else if (*verify_cmd) {
      out = run_verify(verify);
    } else if (*sweep_cmd) {
      out = run_sweep(sweep);
    }
    std::fputs(out.c_str(), stdout);
    return 0;
  } catch (const VerificationFailed&) {
    std::fputs("verification failed\n", stderr);
    return kVerificationFailure;
  } catch (const queue_poa::wire::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfigError;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumericalError;
  }
}
