#pragma once

#include "costa/harness/config.hpp"
#include "costa/harness/outputs.hpp"

#include <optional>

namespace costa::harness {

struct RunResult {
  RunTrace trace;
  RunSummary summary;
};

/// Executes one configured run and assembles its summary, including the
/// dual-bound monitor and the problem-specific extras.
RunResult execute_run(const BuiltProblem& built, const ExperimentConfig& config,
                      const RunConfig& run);

/// Validator output in two tiers: `assumptions` covers the surrogate
/// requirements (tangent match, majorization, strong convexity) and the
/// Slater margins — failures there gate the exit code. `certificates` covers
/// the step/momentum hypothesis inequalities and the activity-threshold
/// precondition, which depend on conservative constant bounds and are
/// reported without gating.
struct ValidationOutcome {
  ValidationReport assumptions;
  ValidationReport certificates;
};

ValidationOutcome run_validation(const BuiltProblem& built, const ExperimentConfig& config);

struct SweepCell {
  RunConfig::Baseline baseline;
  long iterations = 0;
  std::uint64_t seed = 0;
};

struct SweepOutcome {
  std::vector<SweepCell> cells;
  std::vector<RunSummary> summaries;  // aligned with cells
  // per-baseline log-log slope of mean delta_average against iterations
  std::map<std::string, Scalar> slopes;
  int paired_costa_wins = -1;  // at the largest T; -1 when not applicable
  int paired_total = 0;
};

/// Runs the sweep grid on `workers` threads. When `cell_root` is nonempty,
/// every cell writes its own summary (and trace, when enabled) under
/// cell_root/<baseline>_T<iterations>_s<seed>/.
SweepOutcome run_sweep(const BuiltProblem& built, const ExperimentConfig& config,
                       int workers, const std::string& cell_root = "");

// CLI entry points. Return the process exit code.
int cmd_run(const ExperimentConfig& config);
int cmd_validate(const ExperimentConfig& config);
int cmd_sweep(const ExperimentConfig& config, int workers_override);

}  // namespace costa::harness
