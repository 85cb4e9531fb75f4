#include "costa/harness/runner.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace costa;
using namespace costa::harness;

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

long count_lines(const std::string& text) {
  long lines = 0;
  for (const char c : text)
    if (c == '\n') ++lines;
  return lines;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("costa_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const std::string kBallConfig = R"(
[experiment]
problem = exterior-ball
out_dir = OUTDIR

[run]
iterations = 40
kbar = 1.0
w = 8.0
c = 1.0
mu = 2.0
seed = 3
deterministic = true
)";

std::string config_with_outdir(const std::string& text, const fs::path& out) {
  std::string result = text;
  const auto pos = result.find("OUTDIR");
  REQUIRE(pos != std::string::npos);
  result.replace(pos, 6, out.string());
  return result;
}

ExperimentConfig parse(const std::string& text) {
  return config_from_ini(IniFile::parse_string(text));
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("ini parsing") {
  const IniFile ini = IniFile::parse_string(
      "# comment\n"
      "[alpha]\n"
      "x = 1.5\n"
      "flag = true\n"
      "list = 1, 2, 3\n"
      "name = hello ; trailing comment\n"
      "[beta.gamma]\n"
      "y = -2\n");
  CHECK(ini.get_scalar("alpha", "x") == doctest::Approx(1.5));
  CHECK(ini.get_bool("alpha", "flag"));
  CHECK(ini.get_scalar_list("alpha", "list") == std::vector<Scalar>{1.0, 2.0, 3.0});
  CHECK(ini.get_string("alpha", "name") == "hello");
  CHECK(ini.get_long("beta.gamma", "y") == -2);
  CHECK(ini.get_long("beta.gamma", "missing", 7) == 7);
  CHECK_THROWS_AS(ini.get_scalar("alpha", "name"), InvalidConfig);
  CHECK_THROWS_AS(ini.get_scalar("alpha", "absent"), InvalidConfig);
  CHECK_THROWS_AS(IniFile::parse_string("[unterminated\n"), InvalidConfig);
  CHECK_THROWS_AS(IniFile::parse_string("novalue\n"), InvalidConfig);
}

TEST_CASE("config mapping and validation") {
  ExperimentConfig config = parse(kBallConfig);
  CHECK(config.problem == ProblemKind::kExteriorBall);
  CHECK(config.run.iterations == 40);
  CHECK(config.run.deterministic);

  CHECK_THROWS_AS(parse("[experiment]\nproblem = unknown-problem\n[run]\niterations=1\n"
                        "kbar=1\nw=1\nc=1\nmu=1\n"),
                  InvalidConfig);
  // Empty seed list in a sweep section.
  CHECK_THROWS_AS(parse("[experiment]\nproblem = exterior-ball\n[run]\niterations=1\n"
                        "kbar=1\nw=8\nc=1\nmu=1\n[sweep]\nseeds = \niterations_list=10\n"),
                  InvalidConfig);
}

TEST_CASE("cmd_run emits the documented outputs deterministically") {
  TempDir dir_a("run_a");
  TempDir dir_b("run_b");
  ExperimentConfig config = parse(config_with_outdir(kBallConfig, dir_a.path));
  CHECK(cmd_run(config) == 0);

  const std::string trace_a = read_file(dir_a.path / "trace.csv");
  CHECK(count_lines(trace_a) == 41);  // header + one row per iteration
  CHECK(trace_a.rfind("t,eta,beta,delta_norm,feasibility,dual_norm_l1,objective_est,"
                      "tracking_err_or_blank\n",
                      0) == 0);
  CHECK(fs::exists(dir_a.path / "summary.json"));
  CHECK(fs::exists(dir_a.path / "objective_vs_oracle.csv"));
  CHECK(fs::exists(dir_a.path / "output_schema.txt"));
  CHECK_FALSE(fs::exists(dir_a.path / "FAILED"));

  // Identical config + seed => byte-identical outputs.
  ExperimentConfig again = parse(config_with_outdir(kBallConfig, dir_b.path));
  CHECK(cmd_run(again) == 0);
  CHECK(read_file(dir_b.path / "trace.csv") == trace_a);
  CHECK(read_file(dir_b.path / "summary.json") == read_file(dir_a.path / "summary.json"));
}

TEST_CASE("single-iteration run yields a single trace row") {
  TempDir dir("run_t1");
  ExperimentConfig config = parse(config_with_outdir(kBallConfig, dir.path));
  config.run.iterations = 1;
  CHECK(cmd_run(config) == 0);
  CHECK(count_lines(read_file(dir.path / "trace.csv")) == 2);
}

TEST_CASE("seed changes the stochastic trace") {
  TempDir dir_a("seed_a");
  TempDir dir_b("seed_b");
  const std::string quad = R"(
[experiment]
problem = synthetic-quadratic
out_dir = OUTDIR

[run]
iterations = 30
kbar = 0.5
w = 10000
c = 20
mu = 2.0
seed = 1
)";
  ExperimentConfig config = parse(config_with_outdir(quad, dir_a.path));
  CHECK(cmd_run(config) == 0);
  ExperimentConfig other = parse(config_with_outdir(quad, dir_b.path));
  other.run.seed = 2;
  CHECK(cmd_run(other) == 0);
  CHECK(read_file(dir_a.path / "trace.csv") != read_file(dir_b.path / "trace.csv"));
}

TEST_CASE("aborted runs leave a failure marker and partial outputs") {
  TempDir dir("abort");
  ExperimentConfig config = parse(config_with_outdir(kBallConfig, dir.path));
  config.run.subsolver.max_inner_iterations = 1;
  config.run.subsolver.max_outer_rounds = 1;
  CHECK(cmd_run(config) == 3);
  CHECK(fs::exists(dir.path / "FAILED"));
  CHECK(fs::exists(dir.path / "trace.csv"));
}

TEST_CASE("cmd_validate passes on the default surrogates and catches defects") {
  TempDir dir("validate");
  ExperimentConfig config = parse(config_with_outdir(kBallConfig, dir.path));
  config.validate.samples = 500;

  SUBCASE("clean pass") {
    CHECK(cmd_validate(config) == 0);
    CHECK(fs::exists(dir.path / "validation_report.txt"));
    const std::string report = read_file(dir.path / "validation_report.txt");
    CHECK(report.find("FAIL") == std::string::npos);
  }
  SUBCASE("injected majorization defect names the constraint") {
    config.validate.inject_defect = "majorization";
    CHECK(cmd_validate(config) == 1);
    const std::string report = read_file(dir.path / "validation_report.txt");
    CHECK(report.find("FAIL") != std::string::npos);
    CHECK(report.find("g[0]") != std::string::npos);
  }
  SUBCASE("injected tangent defect is caught") {
    config.validate.inject_defect = "tangent-match";
    CHECK(cmd_validate(config) == 1);
  }
  SUBCASE("nothing to validate warns and exits zero") {
    config.validate.check_surrogates = false;
    config.validate.check_schedule_params = false;
    config.validate.check_slater = false;
    CHECK(cmd_validate(config) == 0);
  }
}

TEST_CASE("cmd_sweep aggregates cells and stays deterministic across workers") {
  const std::string sweep_config = R"(
[experiment]
problem = synthetic-quadratic
out_dir = OUTDIR

[run]
iterations = 10
kbar = 0.5
w = 10000
c = 20
mu = 2.0
seed = 1
report_samples = 0
kkt_stride = 0

[sweep]
seeds = 1, 2, 3
iterations_list = 10, 20
baselines = costa
workers = 1
)";
  TempDir dir_serial("sweep_serial");
  ExperimentConfig config = parse(config_with_outdir(sweep_config, dir_serial.path));
  CHECK(cmd_sweep(config, 1) == 0);
  const std::string aggregate = read_file(dir_serial.path / "aggregate.csv");
  CHECK(count_lines(aggregate) == 7);  // header + 3 seeds x 2 horizons

  TempDir dir_parallel("sweep_parallel");
  ExperimentConfig parallel = parse(config_with_outdir(sweep_config, dir_parallel.path));
  CHECK(cmd_sweep(parallel, 3) == 0);
  CHECK(read_file(dir_parallel.path / "aggregate.csv") == aggregate);
  CHECK(fs::exists(dir_parallel.path / "aggregate_summary.json"));
}

TEST_CASE("classification sweeps report accuracy columns") {
  const std::string logistic_sweep = R"(
[experiment]
problem = sparse-logistic
out_dir = OUTDIR

[run]
iterations = 25
kbar = 0.5
w = 1000
c = 10
mu = 1.0
seed = 1
report_samples = 0
kkt_stride = 0

[sweep]
seeds = 1, 2
iterations_list = 25
baselines = costa

[problem.sparse-logistic]
dataset = synthetic
synthetic_dimension = 20
synthetic_rows = 120
synthetic_support = 4
mcp_tau = 1.0
)";
  TempDir dir("sweep_logistic");
  ExperimentConfig config = parse(config_with_outdir(logistic_sweep, dir.path));
  CHECK(cmd_sweep(config, 2) == 0);
  const std::string aggregate = read_file(dir.path / "aggregate.csv");
  CHECK(aggregate.find("accuracy_train,accuracy_test") != std::string::npos);
  // Data rows carry accuracy values (a decimal in the accuracy column).
  std::istringstream lines(aggregate);
  std::string line;
  std::getline(lines, line);  // header
  std::getline(lines, line);
  const auto commas = std::count(line.begin(), line.end(), ',');
  CHECK(commas == 10);
  CHECK(line.find(",,") == std::string::npos);  // no blank accuracy for logistic
}

TEST_CASE("waypoints plot data is emitted for the trajectory problem") {
  const std::string traj_config = R"(
[experiment]
problem = trajectory
out_dir = OUTDIR

[run]
iterations = 3
kbar = 1.0
w = 1000
c = 1.0
mu = 4.0
seed = 1
report_samples = 0
kkt_stride = 0

[problem.trajectory]
agents = 2
horizon = 15
dt = 1.25
sigma = 0.1
)";
  TempDir dir("run_traj");
  ExperimentConfig config = parse(config_with_outdir(traj_config, dir.path));
  CHECK(cmd_run(config) == 0);
  const std::string waypoints = read_file(dir.path / "waypoints.csv");
  CHECK(waypoints.rfind("kind,agent,tau,x,y\n", 0) == 0);
  // 3 kinds x 2 agents x (horizon + 1) rows + header.
  CHECK(count_lines(waypoints) == 1 + 3 * 2 * 16);
}

TEST_CASE("load_config rejects missing dataset paths") {
  TempDir dir("badpath");
  const std::string text = R"(
[experiment]
problem = sparse-logistic
out_dir = OUT

[run]
iterations = 5
kbar = 1
w = 8
c = 1
mu = 1

[problem.sparse-logistic]
dataset = /nonexistent/data.libsvm
)";
  const fs::path path = dir.path / "config.ini";
  std::ofstream(path) << text;
  CHECK_THROWS_AS(load_config(path.string()), InvalidConfig);
}

}  // TEST_SUITE
