#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string fixture(const std::string& name) { return std::string(QUEUE_POA_FIXTURES) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome run(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  const fs::path err_path =
      fs::temp_directory_path() / ("queue_poa_cli_" + std::to_string(::getpid()) + "_" +
                                   std::to_string(counter++) + ".err");
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + QUEUE_POA_EXE + "' " + args +
                          " 2>'" + err_path.string() + "'";
  Outcome r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buffer[4096];
  std::size_t n = 0;
  while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) r.out.append(buffer, n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err_path);
  fs::remove(err_path);
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

void expect_json_close(const json& actual, const json& expected, const std::string& where) {
  if (expected.is_number() && actual.is_number()) {
    EXPECT_TRUE(close(actual.get<double>(), expected.get<double>()))
        << where << ": " << actual << " vs " << expected;
    return;
  }
  ASSERT_EQ(actual.type(), expected.type()) << where;
  if (expected.is_object()) {
    ASSERT_EQ(actual.size(), expected.size()) << where;
    for (const auto& item : expected.items()) {
      ASSERT_TRUE(actual.contains(item.key())) << where << "." << item.key();
      expect_json_close(actual.at(item.key()), item.value(), where + "." + item.key());
    }
  } else if (expected.is_array()) {
    ASSERT_EQ(actual.size(), expected.size()) << where;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      expect_json_close(actual[i], expected[i], where + "[" + std::to_string(i) + "]");
    }
  } else {
    EXPECT_EQ(actual, expected) << where;
  }
}

void expect_csv_close(const std::string& actual, const std::string& expected) {
  const auto a = parse_csv(actual);
  const auto e = parse_csv(expected);
  ASSERT_EQ(a.size(), e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    ASSERT_EQ(a[i].size(), e[i].size()) << "row " << i;
    for (std::size_t k = 0; k < e[i].size(); ++k) {
      if (i == 0) {
        EXPECT_EQ(a[i][k], e[i][k]);
      } else {
        EXPECT_TRUE(close(std::stod(a[i][k]), std::stod(e[i][k])))
            << "row " << i << " col " << k << ": " << a[i][k] << " vs " << e[i][k];
      }
    }
  }
}

struct GoldenCase {
  const char* name;
  std::string args;
  bool csv;
};

void PrintTo(const GoldenCase& c, std::ostream* os) { *os << c.name; }

std::vector<GoldenCase> golden_cases() {
  const std::string uniform = " --model " + fixture("model_uniform.json");
  const std::string queue_model = " --model " + fixture("model_queue.json");
  return {
      {"loss_uniform", "loss" + uniform + " --intensity " + fixture("intensity_constant.json") +
                           " --x 3",
       false},
      {"loss_log_csv", "loss" + uniform + " --intensity " + fixture("intensity_log.json") +
                           " --format csv",
       true},
      {"loss_sweep", "loss" + uniform + " --intensity " + fixture("intensity_linear.json") +
                         " --sweep x_e=1:1000:4,log",
       true},
      {"limit_log", "limit --intensity " + fixture("intensity_log.json"), false},
      {"limit_staircase", "limit --intensity " + fixture("intensity_staircase.json"), false},
      {"limit_exponential_tex", "limit --tex --intensity " + fixture("intensity_exponential.json"),
       false},
      {"limit_curve", "limit --curve --grid 1:1e4:5,log --intensity " +
                          fixture("intensity_staircase.json"),
       true},
      {"queue_optimize", "queue" + queue_model + " --lambda 1 --optimize --seed 3", false},
      {"queue_thresholds", "queue" + queue_model + " --lambda 1 --thresholds 1.5,0.5,0", false},
      {"unbounded", "unbounded --s-grid 3:300:3,log", true},
      {"simulate_loss", "simulate --threads 2 --compare-analytic --config " +
                            fixture("sim_loss.json"),
       false},
      {"simulate_queue", "simulate --compare-analytic --config " + fixture("sim_queue.json"),
       false},
      {"sweep_benefit", "sweep --kind benefit --range x=0:4:5" + uniform + " --intensity " +
                            fixture("intensity_constant.json"),
       true},
      {"sweep_queue", "sweep --kind queue --range lambda=0.5:2:4" + queue_model, true},
  };
}

}  // namespace

class Golden : public ::testing::TestWithParam<GoldenCase> {};

TEST_P(Golden, MatchesStoredOutput) {
  const GoldenCase& c = GetParam();
  const Outcome r = run(c.args);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const fs::path path = fs::path(QUEUE_POA_GOLDEN) / (std::string(c.name) + (c.csv ? ".csv" : ".json"));
  if (std::getenv("QUEUE_POA_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(path) << r.out;
    GTEST_SKIP() << "rewrote " << path;
  }
  ASSERT_TRUE(fs::exists(path)) << path;
  const std::string expected = slurp(path);
  if (c.csv) {
    expect_csv_close(r.out, expected);
  } else {
    expect_json_close(json::parse(r.out), json::parse(expected), c.name);
  }
}

INSTANTIATE_TEST_SUITE_P(Cli, Golden, ::testing::ValuesIn(golden_cases()),
                         [](const auto& info) { return std::string(info.param.name); });

TEST(Cli, LossUniformValues) {
  const Outcome r = run("loss --model " + fixture("model_uniform.json") + " --intensity " +
                    fixture("intensity_constant.json"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["x_e"].get<double>(), 4.0, 1e-12);
  EXPECT_NEAR(j["x_star"].get<double>(), 2.0, 1e-10);
  EXPECT_NEAR(j["poa"].get<double>(), 1.25, 1e-10);
}

TEST(Cli, QueueEquilibriumValues) {
  const Outcome r = run("queue --model " + fixture("model_queue.json") + " --lambda 1");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["n_e"], 3);
  EXPECT_NEAR(j["S_e"].get<double>(), 0.6, 1e-12);
  EXPECT_NEAR(j["stationary"][0].get<double>(), 0.2, 1e-12);
}

TEST(Cli, MalformedJsonExitsOneWithoutOutput) {
  const Outcome r = run("loss --model " + fixture("malformed.json") + " --intensity " +
                    fixture("intensity_constant.json"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, UnknownFamilyExitsOne) {
  const Outcome r = run("limit --intensity " + fixture("intensity_unknown.json"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, MissingFileExitsOne) {
  EXPECT_EQ(run("limit --intensity /nonexistent/h.json").exit_code, 1);
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run("").exit_code, 1);
  EXPECT_EQ(run("loss").exit_code, 1);
  EXPECT_EQ(run("sweep --kind cubes --range 1:2:2").exit_code, 1);
  EXPECT_EQ(run("unbounded --s-grid 1:3:3").exit_code, 1);
  EXPECT_EQ(run("verify --only 14").exit_code, 1);
}

TEST(Cli, NumericalFailureExitsTwo) {
  const Outcome r = run("limit --curve --grid 1:2:2 --intensity " + fixture("intensity_zero_start.json"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, VerifySubsetPrintsOneLinePerCriterion) {
  const Outcome r = run("verify --only 1,7");
  EXPECT_EQ(r.exit_code, 0) << r.out << r.err;
  const auto lines = parse_csv(r.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(r.out.rfind("PASS", 0), 0u);
}

TEST(Cli, SweepRowsMatchIndividualRuns) {
  const Outcome sweep = run("sweep --kind loss --range x_e=0.5:50:3,log --model " +
                        fixture("model_uniform.json") + " --intensity " +
                        fixture("intensity_log.json") + " --format json");
  ASSERT_EQ(sweep.exit_code, 0) << sweep.err;
  const json rows = json::parse(sweep.out);
  ASSERT_EQ(rows.size(), 3u);
  const fs::path dir = fs::temp_directory_path();
  for (const json& row : rows) {
    const double x_e = row["x_e"].get<double>();
    const fs::path model = dir / ("queue_poa_cli_model_" + std::to_string(::getpid()) + ".json");
    std::ofstream(model) << json{{"R", x_e + 1.0}, {"mu", 1}, {"c_w", 1}, {"c_t", 1}}.dump();
    const Outcome single = run("loss --model '" + model.string() + "' --intensity " +
                           fixture("intensity_log.json"));
    fs::remove(model);
    ASSERT_EQ(single.exit_code, 0) << single.err;
    const json one = json::parse(single.out);
    for (const char* key : {"x_e", "x_star", "S_e", "S_star", "poa"}) {
      EXPECT_TRUE(close(row[key].get<double>(), one[key].get<double>())) << key;
    }
  }
}

TEST(Cli, SimulationSeedPrecedence) {
  const std::string args = "simulate --config " + fixture("sim_loss.json");
  const Outcome config_seed = run(args);
  const Outcome env_seed = run(args, "QUEUE_POA_SEED=99");
  const Outcome flag_seed = run(args + " --seed 99", "QUEUE_POA_SEED=5");
  ASSERT_EQ(config_seed.exit_code, 0) << config_seed.err;
  ASSERT_EQ(env_seed.exit_code, 0) << env_seed.err;
  ASSERT_EQ(flag_seed.exit_code, 0) << flag_seed.err;
  const json a = json::parse(config_seed.out);
  const json b = json::parse(env_seed.out);
  const json c = json::parse(flag_seed.out);
  EXPECT_EQ(a["seed"], 7);
  EXPECT_EQ(b["seed"], 99);
  EXPECT_EQ(c["seed"], 99);
  EXPECT_EQ(b["benefit_rate_mean"], c["benefit_rate_mean"]);
  EXPECT_NE(a["benefit_rate_mean"], b["benefit_rate_mean"]);
}
