#include "costa/harness/outputs.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace costa::harness {

using json = nlohmann::ordered_json;

std::string format_double(Scalar value) {
  if (std::isnan(value)) return "";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw SolverFailure("cannot write " + path);
  return out;
}

json json_or_null(const std::optional<Scalar>& value) {
  if (!value) return nullptr;
  return *value;
}

}  // namespace

void write_trace_csv(const std::string& path, const RunTrace& trace) {
  std::ofstream out = open_for_write(path);
  out << "t,eta,beta,delta_norm,feasibility,dual_norm_l1,objective_est,"
         "tracking_err_or_blank\n";
  for (const auto& rec : trace.iterations) {
    out << rec.t << ',' << format_double(rec.eta) << ',' << format_double(rec.beta) << ','
        << format_double(rec.delta_norm) << ',' << format_double(rec.feasibility) << ','
        << format_double(rec.dual_norm_l1) << ',' << format_double(rec.objective_estimate)
        << ',' << format_double(rec.tracking_error) << '\n';
  }
}

void write_tracking_estimates_csv(const std::string& path, const RunTrace& trace) {
  std::ofstream out = open_for_write(path);
  out << "t,tracking_err_est\n";
  for (const auto& rec : trace.iterations)
    if (!std::isnan(rec.tracking_error_estimate))
      out << rec.t << ',' << format_double(rec.tracking_error_estimate) << '\n';
}

void write_objective_vs_oracle_csv(const std::string& path, const RunTrace& trace) {
  std::ofstream out = open_for_write(path);
  out << "t,oracle_calls_single,oracle_calls_paired,objective_est\n";
  if (trace.iterations.empty()) return;
  // Oracle usage is uniform per iteration, so cumulative counts follow the
  // totals proportionally.
  const auto total = static_cast<long>(trace.iterations.size());
  const long per_iter_single = trace.oracle_gradient_evals / total;
  const long per_iter_paired = trace.oracle_sample_pairs / total;
  for (const auto& rec : trace.iterations) {
    out << rec.t << ',' << rec.t * per_iter_single << ',' << rec.t * per_iter_paired << ','
        << format_double(rec.objective_estimate) << '\n';
  }
}

void write_waypoints_csv(const std::string& path, const problems::Environment& env,
                         const Vector& optimized, const Vector& initial) {
  std::ofstream out = open_for_write(path);
  out << "kind,agent,tau,x,y\n";
  auto dump = [&](const char* kind, const Vector& x) {
    for (int i = 0; i < env.agents; ++i)
      for (int tau = 0; tau <= env.horizon; ++tau) {
        const Eigen::Vector2d p = problems::waypoint(env, x, i, tau);
        out << kind << ',' << i << ',' << tau << ',' << format_double(p.x()) << ','
            << format_double(p.y()) << '\n';
      }
  };
  dump("optimized", optimized);
  dump("initial", initial);
  const Vector straight = problems::straight_line_trajectory(env);
  dump("straight", straight);
}

void write_summary_json(const std::string& path, const RunSummary& summary) {
  json j;
  j["problem"] = summary.problem;
  j["baseline"] = summary.baseline;
  j["seed"] = summary.seed;
  j["iterations"] = summary.iterations;
  j["delta_average"] = summary.delta_average;
  j["final_feasibility"] = summary.final_feasibility;
  j["max_feasibility"] = summary.max_feasibility;
  j["max_dual_norm_l1"] = summary.max_dual_norm;
  j["observed_surrogate_range"] = summary.observed_surrogate_range;
  j["oracle_calls"] = {{"single_eval", summary.oracle_gradient_evals},
                       {"sample_pairs", summary.oracle_sample_pairs}};
  j["mean_subsolver_iterations"] = summary.mean_subsolver_iterations;
  j["aborted"] = summary.aborted;
  if (summary.aborted) j["abort_reason"] = summary.abort_reason;

  if (summary.best_kkt_iteration > 0) {
    j["best_kkt"] = {{"iteration", summary.best_kkt_iteration},
                     {"stationarity", summary.best_kkt.stationarity},
                     {"complementarity_g", summary.best_kkt.complementarity_g},
                     {"complementarity_h", summary.best_kkt.complementarity_h},
                     {"feasibility", summary.best_kkt.feasibility},
                     {"samples_used", summary.best_kkt.samples_used}};
  }
  if (summary.certificate) {
    const auto& cert = *summary.certificate;
    j["rate_certificate"] = {{"M_T", cert.m_t},
                             {"d", cert.d},
                             {"bound", cert.bound},
                             {"B_1", cert.initial_gap},
                             {"sigma", cert.noise_std},
                             {"L", cert.smoothness},
                             {"G", cert.lipschitz}};
  }
  j["dual_bound_monitor"] = {{"bound", json_or_null(summary.dual_bound_value)},
                             {"margin_estimate", json_or_null(summary.dual_bound_margin)},
                             {"smoothness_estimate",
                              json_or_null(summary.dual_bound_smoothness)},
                             {"monitored_dual_norm", summary.dual_bound_monitored_norm},
                             {"satisfied", summary.dual_bound_satisfied},
                             {"note", summary.dual_bound_note}};
  if (summary.accuracy_train) j["accuracy_train"] = *summary.accuracy_train;
  if (summary.accuracy_test) j["accuracy_test"] = *summary.accuracy_test;
  if (summary.energy) j["energy"] = *summary.energy;
  if (summary.straight_line_energy)
    j["straight_line_energy"] = *summary.straight_line_energy;
  if (summary.goal_distance) j["goal_distance"] = *summary.goal_distance;

  std::ofstream out = open_for_write(path);
  out << j.dump(2) << '\n';
}

void write_schema_file(const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << R"(Output schema
=============

trace.csv — one row per iteration t:
  t                     iteration index, 1-based
  eta                   step size used for the averaging update at t
  beta                  momentum weight used in the tracking update at t
  delta_norm            ||xhat_t - x_t||, displacement of the subproblem solution
  feasibility           max(0, max_j g_j, max_i h_i) at x_{t+1}
  dual_norm_l1          ||lambda_t||_1 + ||nu_t||_1 from the subproblem duals
  objective_est         Monte-Carlo estimate of E[f] + u at x_{t+1} (exact in
                        deterministic mode); blank when reporting is disabled
  tracking_err_or_blank ||z_{t+1} - grad U(x_t)|| in deterministic mode, blank
                        otherwise

tracking_error_est.csv — stochastic-mode tracking-error estimates (held-out
  Monte-Carlo gradient), at the configured stride:
  t, tracking_err_est

objective_vs_oracle.csv — objective estimate against cumulative oracle use:
  t, oracle_calls_single (every gradient evaluation counted),
  oracle_calls_paired (the per-iteration sample counted once), objective_est

waypoints.csv — trajectory problem only; kind in {optimized, initial,
  straight}: kind, agent, tau (0 = start), x, y

summary.json — run summary:
  problem, baseline, seed, iterations
  delta_average         mean of delta_norm over the trace (Delta_T)
  final_feasibility     feasibility at the final iterate
  max_feasibility       worst feasibility along the trace
  max_dual_norm_l1      worst dual norm along the trace
  observed_surrogate_range  running lower estimate of the surrogate range
  oracle_calls          both call-counting conventions
  mean_subsolver_iterations, aborted, abort_reason
  best_kkt              iteration, stationarity, complementarity slacks,
                        feasibility, samples_used (0 = exact mean oracle)
  rate_certificate      M_T, d, bound and inputs (when the constants are known)
  dual_bound_monitor    2*B_U*L/rho^2 against the inequality-part dual norm
                        (monitored_dual_norm; equality-pair multipliers have
                        no Slater bound and are excluded), with the margin
                        and smoothness estimates used; reported, never
                        asserted
  accuracy_train/test   classification problems
  energy, straight_line_energy, goal_distance   trajectory problem

cells/<baseline>_T<iterations>_s<seed>/ — per-cell summary.json (and
  trace.csv when trace emission is on) for every sweep cell.

aggregate.csv — sweep table, one row per cell:
  problem, baseline, iterations, seed, delta_average, final_feasibility,
  max_feasibility, best_stationarity, accuracy_train, accuracy_test, energy

aggregate_summary.json — per (baseline, iterations): mean/std of
  delta_average; log-log slope fits per baseline across iteration counts;
  paired costa-vs-classical wins at the largest iteration count.

validation_report.txt / validation.json — one line per validator check:
  name, status (pass/fail/skipped), observed value, threshold, note.

FAILED — present only when a run aborted; contains the reason.
)";
}

void write_failure_marker(const std::string& out_dir, const std::string& reason) {
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir + "/FAILED");
  out << reason << '\n';
}

}  // namespace costa::harness
