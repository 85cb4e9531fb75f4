#pragma once

#include "costa/driver.hpp"
#include "costa/problems/sparse_logistic.hpp"
#include "costa/problems/trajectory.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>

namespace costa::harness {

/// Flat "key = value" configuration with [section] headers; '#' and ';'
/// start comments. All experiment configuration lives in one such file.
class IniFile {
 public:
  static IniFile parse_file(const std::string& path);
  static IniFile parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         std::optional<std::string> fallback = std::nullopt) const;
  Scalar get_scalar(const std::string& section, const std::string& key,
                    std::optional<Scalar> fallback = std::nullopt) const;
  long get_long(const std::string& section, const std::string& key,
                std::optional<long> fallback = std::nullopt) const;
  bool get_bool(const std::string& section, const std::string& key,
                std::optional<bool> fallback = std::nullopt) const;
  std::vector<Scalar> get_scalar_list(const std::string& section, const std::string& key,
                                      std::optional<std::vector<Scalar>> fallback =
                                          std::nullopt) const;
  std::vector<std::string> get_string_list(const std::string& section,
                                           const std::string& key,
                                           std::optional<std::vector<std::string>> fallback =
                                               std::nullopt) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
};

enum class ProblemKind { kExteriorBall, kSyntheticQuadratic, kSparseLogistic, kTrajectory };

std::string problem_kind_name(ProblemKind kind);

struct ExteriorBallParams {
  Eigen::Vector2d target{0.2, 0.0};
  Eigen::Vector2d start{0.0, 1.0};
};

struct SyntheticQuadraticParams {
  Eigen::Index dimension = 20;
  Scalar noise_std = 2.0;
  std::uint64_t problem_seed = 7;
};

struct SparseLogisticParams {
  std::string dataset_path;  // empty = synthetic
  std::string test_dataset_path;
  Scalar positive_label = 1.0;
  Eigen::Index synthetic_dimension = 60;
  Eigen::Index synthetic_rows = 400;
  int synthetic_support = 6;
  Scalar synthetic_label_noise = 0.5;
  std::uint64_t dataset_seed = 13;
  problems::McpParams mcp{2.0, 5.0, 1e-6, 2.0, true};
};

struct ValidateOptions {
  int samples = 10000;
  Scalar fd_step = 1e-5;
  std::string inject_defect = "none";  // none | majorization | tangent-match
  bool check_surrogates = true;
  bool check_schedule_params = true;
  bool check_slater = true;
  Scalar omega = 0.1;
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::kExteriorBall;
  std::string out_dir = "out";
  bool emit_trace = true;
  bool emit_summary = true;
  bool emit_plot_data = true;

  RunConfig run;  // initial_point is filled in by build_problem

  std::vector<std::uint64_t> sweep_seeds;
  std::vector<long> sweep_iterations;
  std::vector<RunConfig::Baseline> sweep_baselines;
  int workers = 1;

  ValidateOptions validate;

  ExteriorBallParams ball;
  SyntheticQuadraticParams quadratic;
  SparseLogisticParams logistic;
  problems::Environment trajectory_env = default_trajectory_environment();

  static problems::Environment default_trajectory_environment();
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_ini(const IniFile& ini);

/// A constructed problem instance plus the context the reporting needs.
struct BuiltProblem {
  StochasticProblem problem;
  Vector initial_point;
  std::string name;
  std::shared_ptr<const problems::Dataset> dataset;         // sparse-logistic only
  std::optional<problems::Environment> environment;          // trajectory only
  std::function<Vector(RngStream&)> majorization_sampler;    // for the validators
};

BuiltProblem build_problem(const ExperimentConfig& config);

}  // namespace costa::harness
