#include "costa/harness/runner.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

namespace costa::harness {

using json = nlohmann::ordered_json;

namespace {

std::string baseline_name(RunConfig::Baseline baseline) {
  return baseline == RunConfig::Baseline::kCosta ? "costa" : "classical";
}

RunTrace dispatch_run(const StochasticProblem& problem, const RunConfig& run) {
  if (run.baseline == RunConfig::Baseline::kClassical)
    return run_classical_sca(problem, run);
  return run_costa(problem, run);
}

void attach_dual_bound_monitor(const BuiltProblem& built, const ExperimentConfig& config,
                               const RunTrace& trace, RunSummary& summary) {
  const StochasticProblem& problem = built.problem;
  if (problem.nonconvex_constraints.empty() && problem.convex_constraints.empty()) {
    summary.dual_bound_note = "unconstrained problem; duals are empty";
    return;
  }
  // The Slater-based bound covers inequality multipliers; equality-pair
  // multipliers (no strict interior) are excluded and noted.
  Scalar monitored_dual = 0.0;
  for (const auto& rec : trace.iterations)
    monitored_dual = std::max(monitored_dual, rec.dual_norm_l1_inequalities);
  summary.dual_bound_monitored_norm = monitored_dual;
  const std::string pair_note =
      problem.equality_pairs.empty()
          ? ""
          : "; equality-pair multipliers excluded from the monitored norm";
  if (!(monitored_dual > 0.0)) {
    summary.dual_bound_note =
        "no active inequality constraints along the run; monitored duals stayed zero" +
        pair_note;
    return;
  }
  if (!(trace.observed_surrogate_range > 0.0)) {
    summary.dual_bound_note = "no observed surrogate range; monitor skipped";
    return;
  }

  Scalar smoothness;
  std::string smoothness_note;
  if (problem.meta.smoothness) {
    smoothness = *problem.meta.smoothness;
    smoothness_note = "L from metadata";
  } else {
    RngStream rng = substream(config.run.seed, 77);
    smoothness = spot_estimate_smoothness(problem, trace.final_point, 32, rng);
    smoothness_note = "L spot-estimated";
  }

  Scalar margin = std::numeric_limits<Scalar>::infinity();
  for (const auto& [t, point] : trace.snapshots) {
    const MFCQParams mfcq = estimate_rho(problem, point, config.validate.omega);
    if (!mfcq.no_active_constraints()) margin = std::min(margin, mfcq.margin);
  }
  if (!std::isfinite(margin)) {
    summary.dual_bound_note =
        "no constraint came within omega of activity at the probed iterates";
    return;
  }
  summary.dual_bound_margin = margin;
  summary.dual_bound_smoothness = smoothness;
  if (margin <= 0.0) {
    summary.dual_bound_satisfied = false;
    summary.dual_bound_note =
        "estimated MFCQ margin is zero; the bound is vacuous (estimation failure)";
    return;
  }
  summary.dual_bound_value =
      dual_bound(trace.observed_surrogate_range, smoothness, margin);
  summary.dual_bound_satisfied = monitored_dual <= *summary.dual_bound_value;
  summary.dual_bound_note =
      (summary.dual_bound_satisfied
           ? "max inequality dual norm within 2*B_U*L/rho^2 ("
           : "max inequality dual norm EXCEEDS 2*B_U*L/rho^2 — estimation failure (") +
      smoothness_note + ", B_U observed, rho from the probed iterates)" + pair_note;
}

}  // namespace

RunResult execute_run(const BuiltProblem& built, const ExperimentConfig& config,
                      const RunConfig& run) {
  RunResult result;
  result.trace = dispatch_run(built.problem, run);
  const RunTrace& trace = result.trace;

  RunSummary& summary = result.summary;
  summary.problem = built.name;
  summary.baseline = baseline_name(run.baseline);
  summary.seed = run.seed;
  summary.iterations = static_cast<long>(trace.iterations.size());
  summary.aborted = trace.aborted;
  summary.abort_reason = trace.abort_reason;
  if (!trace.iterations.empty()) {
    summary.delta_average = trace.delta_average;
    summary.final_feasibility = trace.iterations.back().feasibility;
    for (const auto& rec : trace.iterations) {
      summary.max_feasibility = std::max(summary.max_feasibility, rec.feasibility);
      summary.max_dual_norm = std::max(summary.max_dual_norm, rec.dual_norm_l1);
    }
  }
  summary.observed_surrogate_range = trace.observed_surrogate_range;
  summary.best_kkt_iteration = trace.best_kkt_iteration;
  summary.best_kkt = trace.best_kkt;
  summary.oracle_gradient_evals = trace.oracle_gradient_evals;
  summary.oracle_sample_pairs = trace.oracle_sample_pairs;
  summary.mean_subsolver_iterations = trace.mean_subsolver_iterations;

  const auto& meta = built.problem.meta;
  if (meta.initial_gap && meta.noise_std && meta.smoothness && meta.lipschitz &&
      run.iterations > 0)
    summary.certificate = rate_bound(meta, run.kbar, run.w, run.c, run.iterations);

  attach_dual_bound_monitor(built, config, trace, summary);

  if (built.dataset && trace.final_point.size() > 0) {
    summary.accuracy_train =
        problems::accuracy(*built.dataset, built.dataset->train_indices, trace.final_point);
    if (!built.dataset->test_indices.empty())
      summary.accuracy_test =
          problems::accuracy(*built.dataset, built.dataset->test_indices, trace.final_point);
  }
  if (built.environment && trace.final_point.size() > 0) {
    const auto& env = *built.environment;
    RngStream rng = substream(run.seed, 88);
    summary.energy = problems::trajectory_energy(env, trace.final_point, 256, rng);
    summary.straight_line_energy = problems::straight_line_energy(env, 256, rng);
    Scalar worst_goal = 0.0;
    for (int i = 0; i < env.agents; ++i)
      worst_goal = std::max(worst_goal,
                            (problems::waypoint(env, trace.final_point, i, env.horizon) -
                             env.goal[static_cast<std::size_t>(i)])
                                .norm());
    summary.goal_distance = worst_goal;
  }
  return result;
}

int cmd_run(const ExperimentConfig& config) {
  BuiltProblem built = build_problem(config);
  RunConfig run = config.run;
  run.initial_point = built.initial_point;

  const RunResult result = execute_run(built, config, run);
  const std::string& dir = config.out_dir;
  std::filesystem::create_directories(dir);

  if (config.emit_trace) write_trace_csv(dir + "/trace.csv", result.trace);
  if (config.emit_summary) write_summary_json(dir + "/summary.json", result.summary);
  if (config.emit_plot_data) {
    write_objective_vs_oracle_csv(dir + "/objective_vs_oracle.csv", result.trace);
    if (built.environment && result.trace.final_point.size() > 0)
      write_waypoints_csv(dir + "/waypoints.csv", *built.environment,
                          result.trace.final_point, built.initial_point);
    if (config.run.track_error_stride > 0 && !config.run.deterministic)
      write_tracking_estimates_csv(dir + "/tracking_error_est.csv", result.trace);
  }
  write_schema_file(dir + "/output_schema.txt");

  if (result.trace.aborted) {
    write_failure_marker(dir, result.trace.abort_reason);
    std::cerr << "run aborted: " << result.trace.abort_reason << '\n';
    return 3;
  }
  std::cout << "run complete: delta_average=" << format_double(result.summary.delta_average)
            << " final_feasibility=" << format_double(result.summary.final_feasibility)
            << '\n';
  return 0;
}

namespace {

void append_report(ValidationReport& into, const std::string& prefix,
                   const ValidationReport& from) {
  for (ValidationCheck check : from.checks) {
    check.name = prefix + check.name;
    into.checks.push_back(std::move(check));
  }
}

// Wraps the constraint surrogate with a deliberate defect so the validators
// can demonstrate a catch.
ConstraintSurrogate inject_defect(ConstraintSurrogate surrogate,
                                  const std::string& defect) {
  if (defect == "majorization") {
    auto value = surrogate.fn.value;
    surrogate.fn.value = [value](const Vector& x) { return value(x) - 0.1; };
  } else if (defect == "tangent-match") {
    auto gradient = surrogate.fn.gradient;
    surrogate.fn.gradient = [gradient](const Vector& x) {
      Vector g = gradient(x);
      g[0] += 0.1;
      return g;
    };
  } else if (defect != "none") {
    throw InvalidConfig("validate: unknown inject_defect '" + defect + "'");
  }
  return surrogate;
}

}  // namespace

ValidationOutcome run_validation(const BuiltProblem& built, const ExperimentConfig& config) {
  const StochasticProblem& problem = built.problem;
  const ValidateOptions& opts = config.validate;
  ValidationOutcome outcome;
  ValidationReport& report = outcome.assumptions;

  RngStream rng = substream(config.run.seed, 55);

  if (opts.check_surrogates && opts.samples > 0) {
    // Objective surrogate at the initial point, anchored on a sampled
    // gradient.
    const Sample xi = problem.draw_sample(rng);
    const Vector grad = problem.objective_gradient(built.initial_point, xi);
    const Scalar value = problem.objective_value(built.initial_point, xi);
    const ObjectiveSurrogate fhat =
        build_proximal_surrogate(built.initial_point, grad, value, config.run.modulus);

    SmoothFunction fhat_fn{[&fhat](const Vector& x) { return fhat.value(x); },
                           [&fhat](const Vector& x) { return fhat.gradient(x); }};
    SmoothFunction original{
        [&problem, xi](const Vector& x) { return problem.objective_value(x, xi); },
        [&problem, xi](const Vector& x) { return problem.objective_gradient(x, xi); }};
    append_report(report, "objective surrogate: ",
                  validate_tangent_match(fhat_fn, original, built.initial_point,
                                         opts.fd_step));
    append_report(report, "objective surrogate: ",
                  validate_strong_convexity(fhat, config.run.modulus,
                                            std::min(opts.samples, 1000), rng));

    // Running-surrogate anchor-gradient identity for a random tracker value.
    Vector z(problem.dimension);
    std::normal_distribution<Scalar> gauss(0.0, 1.0);
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = gauss(rng);
    const RunningSurrogate ftil = build_running_surrogate(fhat, z);
    const Scalar identity_gap =
        (ftil.gradient(built.initial_point) - z).lpNorm<Eigen::Infinity>();
    report.checks.push_back({"running surrogate: anchor gradient equals tracker",
                             identity_gap <= 1e-12 ? CheckStatus::kPass : CheckStatus::kFail,
                             identity_gap, 1e-12, ""});

    for (std::size_t j = 0; j < problem.nonconvex_constraints.size(); ++j) {
      const auto& g = problem.nonconvex_constraints[j];
      ConstraintSurrogate surrogate = g.surrogate_at(built.initial_point);
      if (j == 0) surrogate = inject_defect(std::move(surrogate), opts.inject_defect);
      const std::string prefix = "g[" + std::to_string(j) + "]: ";
      append_report(report, prefix,
                    validate_tangent_match(surrogate.fn, g.fn, built.initial_point,
                                           opts.fd_step));
      append_report(report, prefix,
                    validate_majorization(surrogate, g.fn, built.majorization_sampler,
                                          opts.samples, rng));
    }
  }

  if (opts.check_schedule_params) {
    append_report(outcome.certificates, "schedule: ",
                  validate_params(problem.meta, config.run.kbar, config.run.w,
                                  config.run.c, config.run.modulus));
  }

  if (opts.check_slater && !(problem.nonconvex_constraints.empty() &&
                             problem.convex_constraints.empty())) {
    const MFCQParams mfcq = estimate_rho(problem, built.initial_point, opts.omega);
    if (mfcq.no_active_constraints()) {
      report.checks.push_back({"slater: probe", CheckStatus::kSkipped, 0.0, 0.0,
                               "no constraint within omega of activity at x_1"});
    } else if (!(mfcq.margin > 0.0)) {
      report.checks.push_back({"slater: probe", CheckStatus::kFail, mfcq.margin, 0.0,
                               "MFCQ margin is zero at x_1"});
    } else {
      std::optional<Scalar> smoothness = problem.meta.smoothness;
      std::string note;
      if (!smoothness) {
        RngStream spot_rng = substream(config.run.seed, 66);
        smoothness = spot_estimate_smoothness(problem, built.initial_point, 32, spot_rng);
        note = " (L spot-estimated)";
      }
      std::vector<ConstraintSurrogate> surrogates;
      surrogates.reserve(problem.nonconvex_constraints.size());
      for (const auto& g : problem.nonconvex_constraints)
        surrogates.push_back(g.surrogate_at(built.initial_point));
      const SlaterMarginReport slater =
          slater_margin(problem, built.initial_point, surrogates, mfcq, smoothness);
      for (ValidationCheck check : slater.checks.checks) {
        const bool precondition = check.name.rfind("omega >=", 0) == 0;
        check.name = "slater" + note + ": " + check.name;
        (precondition ? outcome.certificates : outcome.assumptions)
            .checks.push_back(std::move(check));
      }
    }
  }

  return outcome;
}

int cmd_validate(const ExperimentConfig& config) {
  BuiltProblem built = build_problem(config);
  const ValidationOutcome outcome = run_validation(built, config);

  std::filesystem::create_directories(config.out_dir);
  std::ofstream text(config.out_dir + "/validation_report.txt");
  json entries = json::array();
  int failures = 0;
  auto emit = [&](const ValidationReport& report, bool gating) {
    for (const auto& check : report.checks) {
      const bool failed = check.status == CheckStatus::kFail;
      const char* status = check.status == CheckStatus::kPass ? "pass"
                           : failed ? (gating ? "FAIL" : "fail (advisory)")
                                    : "skipped";
      if (failed && gating) ++failures;
      text << status << "  " << check.name
           << "  observed=" << format_double(check.observed)
           << " threshold=" << format_double(check.threshold);
      if (!check.note.empty()) text << "  (" << check.note << ")";
      text << '\n';
      entries.push_back({{"name", check.name},
                         {"status", status},
                         {"gating", gating},
                         {"observed", check.observed},
                         {"threshold", check.threshold},
                         {"note", check.note}});
    }
  };
  emit(outcome.assumptions, true);
  emit(outcome.certificates, false);
  std::ofstream(config.out_dir + "/validation.json") << entries.dump(2) << '\n';
  write_schema_file(config.out_dir + "/output_schema.txt");

  const std::size_t total =
      outcome.assumptions.checks.size() + outcome.certificates.checks.size();
  if (total == 0) {
    std::cout << "warning: nothing validated (all validator suites disabled)\n";
    return 0;
  }
  if (failures > 0) {
    std::cerr << failures << " validator check(s) failed:\n";
    for (const auto& check : outcome.assumptions.checks)
      if (check.status == CheckStatus::kFail) std::cerr << "  " << check.name << '\n';
    return 1;
  }
  std::cout << total << " validator checks: no gating failures\n";
  return 0;
}

SweepOutcome run_sweep(const BuiltProblem& built, const ExperimentConfig& config,
                       int workers, const std::string& cell_root) {
  SweepOutcome outcome;
  for (const auto baseline : config.sweep_baselines)
    for (const long iterations : config.sweep_iterations)
      for (const std::uint64_t seed : config.sweep_seeds)
        outcome.cells.push_back({baseline, iterations, seed});
  outcome.summaries.resize(outcome.cells.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= outcome.cells.size()) return;
      const SweepCell& cell = outcome.cells[index];
      RunConfig run = config.run;
      run.baseline = cell.baseline;
      run.iterations = cell.iterations;
      run.seed = cell.seed;
      run.initial_point = built.initial_point;
      // Per-iterate reporting is noise in large sweeps; keep the last-point
      // scores only.
      run.kkt_stride = cell.iterations;
      const RunResult result = execute_run(built, config, run);
      outcome.summaries[index] = result.summary;

      if (!cell_root.empty()) {
        const std::string dir = cell_root + "/" + baseline_name(cell.baseline) + "_T" +
                                std::to_string(cell.iterations) + "_s" +
                                std::to_string(cell.seed);
        std::filesystem::create_directories(dir);
        if (config.emit_summary) write_summary_json(dir + "/summary.json", result.summary);
        if (config.emit_trace) write_trace_csv(dir + "/trace.csv", result.trace);
      }
    }
  };
  const int thread_count =
      std::max(1, std::min<int>(workers, static_cast<int>(outcome.cells.size())));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(thread_count));
  for (int k = 0; k < thread_count; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Log-log slope of mean delta_average against T, per baseline.
  for (const auto baseline : config.sweep_baselines) {
    const std::string name = baseline_name(baseline);
    std::vector<Scalar> log_t, log_delta;
    for (const long iterations : config.sweep_iterations) {
      Scalar mean = 0.0;
      int count = 0;
      for (std::size_t k = 0; k < outcome.cells.size(); ++k) {
        if (outcome.cells[k].baseline == baseline &&
            outcome.cells[k].iterations == iterations && !outcome.summaries[k].aborted) {
          mean += outcome.summaries[k].delta_average;
          ++count;
        }
      }
      if (count == 0) continue;
      mean /= count;
      if (mean > 0.0) {
        log_t.push_back(std::log(static_cast<Scalar>(iterations)));
        log_delta.push_back(std::log(mean));
      }
    }
    if (log_t.size() >= 2) {
      const auto n = static_cast<Scalar>(log_t.size());
      Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t k = 0; k < log_t.size(); ++k) {
        sx += log_t[k];
        sy += log_delta[k];
        sxx += log_t[k] * log_t[k];
        sxy += log_t[k] * log_delta[k];
      }
      outcome.slopes[name] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
  }

  // Paired comparison at the largest T when both baselines ran.
  const bool has_both =
      std::count(config.sweep_baselines.begin(), config.sweep_baselines.end(),
                 RunConfig::Baseline::kCosta) > 0 &&
      std::count(config.sweep_baselines.begin(), config.sweep_baselines.end(),
                 RunConfig::Baseline::kClassical) > 0;
  if (has_both) {
    const long t_max =
        *std::max_element(config.sweep_iterations.begin(), config.sweep_iterations.end());
    outcome.paired_costa_wins = 0;
    for (const std::uint64_t seed : config.sweep_seeds) {
      std::optional<Scalar> costa_delta, classical_delta;
      for (std::size_t k = 0; k < outcome.cells.size(); ++k) {
        if (outcome.cells[k].iterations != t_max || outcome.cells[k].seed != seed) continue;
        if (outcome.cells[k].baseline == RunConfig::Baseline::kCosta)
          costa_delta = outcome.summaries[k].delta_average;
        else
          classical_delta = outcome.summaries[k].delta_average;
      }
      if (costa_delta && classical_delta) {
        ++outcome.paired_total;
        if (*costa_delta <= *classical_delta) ++outcome.paired_costa_wins;
      }
    }
  }
  return outcome;
}

int cmd_sweep(const ExperimentConfig& config, int workers_override) {
  if (config.sweep_seeds.empty() || config.sweep_iterations.empty())
    throw InvalidConfig("sweep: [sweep] seeds and iterations_list are required");
  BuiltProblem built = build_problem(config);
  const int workers = workers_override > 0 ? workers_override : config.workers;
  const SweepOutcome outcome = run_sweep(built, config, workers, config.out_dir + "/cells");

  std::filesystem::create_directories(config.out_dir);
  std::ofstream csv(config.out_dir + "/aggregate.csv");
  csv << "problem,baseline,iterations,seed,delta_average,final_feasibility,"
         "max_feasibility,best_stationarity,accuracy_train,accuracy_test,energy\n";
  for (std::size_t k = 0; k < outcome.cells.size(); ++k) {
    const auto& cell = outcome.cells[k];
    const auto& s = outcome.summaries[k];
    csv << s.problem << ',' << baseline_name(cell.baseline) << ',' << cell.iterations << ','
        << cell.seed << ',' << format_double(s.delta_average) << ','
        << format_double(s.final_feasibility) << ',' << format_double(s.max_feasibility)
        << ',' << format_double(s.best_kkt.stationarity) << ','
        << (s.accuracy_train ? format_double(*s.accuracy_train) : "") << ','
        << (s.accuracy_test ? format_double(*s.accuracy_test) : "") << ','
        << (s.energy ? format_double(*s.energy) : "") << '\n';
  }

  json j;
  json table = json::array();
  for (const auto baseline : config.sweep_baselines) {
    for (const long iterations : config.sweep_iterations) {
      std::vector<Scalar> deltas;
      for (std::size_t k = 0; k < outcome.cells.size(); ++k)
        if (outcome.cells[k].baseline == baseline &&
            outcome.cells[k].iterations == iterations && !outcome.summaries[k].aborted)
          deltas.push_back(outcome.summaries[k].delta_average);
      if (deltas.empty()) continue;
      Scalar mean = 0.0;
      for (const Scalar d : deltas) mean += d;
      mean /= static_cast<Scalar>(deltas.size());
      Scalar var = 0.0;
      for (const Scalar d : deltas) var += (d - mean) * (d - mean);
      const Scalar stddev =
          deltas.size() > 1 ? std::sqrt(var / static_cast<Scalar>(deltas.size() - 1)) : 0.0;
      table.push_back({{"baseline", baseline_name(baseline)},
                       {"iterations", iterations},
                       {"runs", deltas.size()},
                       {"delta_average_mean", mean},
                       {"delta_average_std", stddev}});
    }
  }
  j["cells"] = table;
  j["slopes"] = outcome.slopes;
  if (outcome.paired_costa_wins >= 0)
    j["paired_comparison"] = {{"costa_wins", outcome.paired_costa_wins},
                              {"total", outcome.paired_total}};
  std::ofstream(config.out_dir + "/aggregate_summary.json") << j.dump(2) << '\n';
  write_schema_file(config.out_dir + "/output_schema.txt");

  int aborted = 0;
  for (const auto& s : outcome.summaries)
    if (s.aborted) ++aborted;
  if (aborted > 0) {
    write_failure_marker(config.out_dir,
                         std::to_string(aborted) + " sweep cell(s) aborted");
    std::cerr << aborted << " sweep cell(s) aborted\n";
    return 3;
  }
  std::cout << "sweep complete: " << outcome.cells.size() << " cells\n";
  return 0;
}

}  // namespace costa::harness
