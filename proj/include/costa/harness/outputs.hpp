#pragma once

#include "costa/driver.hpp"
#include "costa/harness/config.hpp"

#include <optional>
#include <string>

namespace costa::harness {

/// Shortest representation that round-trips a double; NaN renders empty.
std::string format_double(Scalar value);

/// Everything a single run reports beyond the raw trace.
struct RunSummary {
  std::string problem;
  std::string baseline;
  std::uint64_t seed = 0;
  long iterations = 0;
  Scalar delta_average = 0.0;
  Scalar final_feasibility = 0.0;
  Scalar max_feasibility = 0.0;
  Scalar max_dual_norm = 0.0;
  Scalar observed_surrogate_range = 0.0;
  long best_kkt_iteration = 0;
  KKTReport best_kkt;
  long oracle_gradient_evals = 0;
  long oracle_sample_pairs = 0;
  Scalar mean_subsolver_iterations = 0.0;
  bool aborted = false;
  std::string abort_reason;

  std::optional<RateCertificate> certificate;

  // Dual-bound monitor (reported, never asserted).
  std::optional<Scalar> dual_bound_value;
  std::optional<Scalar> dual_bound_margin;      // ρ̂
  std::optional<Scalar> dual_bound_smoothness;  // L̂
  Scalar dual_bound_monitored_norm = 0.0;       // max ‖λ̂‖₁+‖ν̂_ineq‖₁
  bool dual_bound_satisfied = true;
  std::string dual_bound_note;

  // Problem-specific extras.
  std::optional<Scalar> accuracy_train;
  std::optional<Scalar> accuracy_test;
  std::optional<Scalar> energy;
  std::optional<Scalar> straight_line_energy;
  std::optional<Scalar> goal_distance;
};

void write_trace_csv(const std::string& path, const RunTrace& trace);
void write_tracking_estimates_csv(const std::string& path, const RunTrace& trace);
void write_objective_vs_oracle_csv(const std::string& path, const RunTrace& trace);
void write_waypoints_csv(const std::string& path, const problems::Environment& env,
                         const Vector& optimized, const Vector& initial);
void write_summary_json(const std::string& path, const RunSummary& summary);
void write_schema_file(const std::string& path);
void write_failure_marker(const std::string& out_dir, const std::string& reason);

}  // namespace costa::harness
