#include "costa/driver.hpp"

#include <algorithm>
#include <cmath>

namespace costa {

namespace {

void validate_config(const StochasticProblem& problem, const RunConfig& config) {
  if (config.iterations < 1) throw InvalidConfig("run: iterations must be >= 1");
  if (!(config.kbar > 0.0) || !(config.w > 0.0) || !(config.c > 0.0))
    throw InvalidConfig("run: kbar, w, c must all be > 0");
  if (!(config.modulus > 0.0)) throw InvalidConfig("run: surrogate modulus must be > 0");
  if (!(config.subsolver_tolerance > 0.0))
    throw InvalidConfig("run: subsolver tolerance must be > 0");
  require_dimension(config.initial_point, problem.dimension, "run initial point");

  const Scalar violation = feasibility_violation(problem, config.initial_point);
  if (violation > 1e-10)
    throw InvalidConfig("run: initial point is infeasible (violation " +
                        std::to_string(violation) + ")");
  const Scalar beta1 =
      config.c * config.kbar * config.kbar / std::pow(config.w, 2.0 / 3.0);
  if (beta1 > 1.0)
    throw InvalidConfig("run: beta_1 = c*kbar^2/w^(2/3) exceeds 1; shrink c or kbar");
  // The iterate update must be a convex combination or feasibility is lost.
  if (config.kbar > std::cbrt(config.w) * (1.0 + 1e-12))
    throw InvalidConfig("run: kbar must not exceed w^(1/3) (step sizes above 1)");
  if (config.eta_override && (*config.eta_override < 0.0 || *config.eta_override > 1.0))
    throw InvalidConfig("run: eta override must lie in [0, 1]");
  if (config.deterministic && !problem.mean_gradient)
    throw InvalidConfig("run: deterministic mode needs the problem's mean gradient oracle");
}

Vector estimate_mean_gradient(const StochasticProblem& problem, const Vector& x,
                              int samples, RngStream& rng) {
  if (problem.mean_gradient) return problem.mean_gradient(x);
  Vector acc = Vector::Zero(x.size());
  for (int k = 0; k < samples; ++k) {
    const Sample xi = problem.draw_sample(rng);
    acc += problem.objective_gradient(x, xi);
  }
  return acc / std::max(samples, 1);
}

RunTrace run_impl(const StochasticProblem& problem, const RunConfig& config) {
  validate_config(problem, config);
  const bool classical = config.baseline == RunConfig::Baseline::kClassical;

  RngStream rng_algo = substream(config.seed, 1);
  RngStream rng_report = substream(config.seed, 2);
  RngStream rng_kkt = substream(config.seed, 3);
  RngStream rng_track = substream(config.seed, 4);

  SolveOptions solver_options = config.subsolver;
  solver_options.tolerance = config.subsolver_tolerance;

  RunTrace trace;
  trace.iterations.reserve(static_cast<std::size_t>(config.iterations));

  const auto num_g = static_cast<Eigen::Index>(problem.nonconvex_constraints.size());
  const auto num_h = static_cast<Eigen::Index>(problem.convex_constraints.size());

  Vector x = config.initial_point;
  Vector x_prev = x;  // x_0 = x_1
  Vector z = Vector::Zero(problem.dimension);
  ScheduleState schedule{config.kbar, config.w, config.c, 0.0, 0};
  Scalar beta = config.c * config.kbar * config.kbar / std::pow(config.w, 2.0 / 3.0);

  Vector warm_lambda = Vector::Zero(num_g);
  Vector warm_nu = Vector::Zero(num_h);

  Scalar best_score = std::numeric_limits<Scalar>::infinity();
  long total_inner = 0;

  for (long t = 1; t <= config.iterations; ++t) {
    const Sample xi = problem.draw_sample(rng_algo);
    const Vector grad_curr = problem.objective_gradient(x, xi);
    const Scalar value_curr = problem.objective_value(x, xi);

    if (classical) {
      trace.oracle_gradient_evals += 1;
      trace.oracle_sample_pairs += 1;
      if (t == 1) z = grad_curr;  // x_0 = x_1, so ∇f(x_0,ξ_1) = ∇f(x_1,ξ_1)
      const Scalar rho =
          config.classical_rho_override
              ? *config.classical_rho_override
              : std::min(1.0, config.classical_rho_scale /
                                  std::pow(static_cast<Scalar>(t) + 1.0,
                                           config.classical_rho_exponent));
      z = (1.0 - rho) * z + rho * grad_curr;
    } else {
      const Vector grad_prev = problem.objective_gradient(x_prev, xi);
      trace.oracle_gradient_evals += 2;
      trace.oracle_sample_pairs += 1;
      if (t == 1) z = grad_prev;  // z_1 = ∇f(x_0, ξ_1)
      z = storm_update(z, grad_curr, grad_prev, std::min(beta, 1.0));
    }

    schedule = accumulate(schedule, grad_curr.norm());  // G_t
    const Scalar eta =
        config.eta_override ? *config.eta_override : step_size(schedule);
    const Scalar beta_next = momentum(schedule, std::max(eta, 1e-300));

    // Classical mode anchors the quadratic model on the tracked gradient, so
    // the running correction vanishes; the momentum mode anchors on the fresh
    // sampled gradient and carries the correction q = z_{t+1} − ∇f(x_t,ξ_t).
    ObjectiveSurrogate fhat = build_proximal_surrogate(
        x, classical ? z : grad_curr, value_curr, config.modulus);
    RunningSurrogate ftil = build_running_surrogate(std::move(fhat), z);

    ConvexSubproblem sub;
    sub.regularizer = problem.regularizer;
    sub.anchor = x;
    sub.modulus = config.modulus;
    sub.objective = std::move(ftil);
    sub.inequality_surrogates.reserve(problem.nonconvex_constraints.size());
    for (const auto& g : problem.nonconvex_constraints)
      sub.inequality_surrogates.push_back(g.surrogate_at(x));
    sub.convex_constraints = problem.convex_constraints;

    SubproblemSolution sol;
    const Vector cold_start = Vector::Zero(problem.dimension);
    try {
      WarmStart warm;
      warm.x = config.subsolver_start_at_anchor ? &x : &cold_start;
      if (config.warm_start_duals) {
        warm.lambda = &warm_lambda;
        warm.nu = &warm_nu;
      }
      sol = solve(sub, solver_options, warm);
    } catch (const SolverFailure& failure) {
      trace.aborted = true;
      trace.abort_reason = failure.what();
      break;
    }
    if (!sol.converged && sol.residuals.worst() > 100.0 * solver_options.tolerance) {
      trace.aborted = true;
      trace.abort_reason = "subsolver failed to converge at iteration " +
                           std::to_string(t) + " (worst residual " +
                           std::to_string(sol.residuals.worst()) + ")";
      break;
    }
    warm_lambda = sol.lambda;
    warm_nu = sol.nu;
    total_inner += sol.inner_iterations;

    const Vector delta = sol.x - x;
    const Vector x_next = (1.0 - eta) * x + eta * sol.x;

    IterationRecord rec;
    rec.t = t;
    rec.eta = eta;
    rec.beta = beta;
    rec.delta_norm = delta.norm();
    rec.feasibility = feasibility_violation(problem, x_next);
    rec.dual_norm_l1 = sol.lambda.lpNorm<1>() + sol.nu.lpNorm<1>();
    rec.dual_norm_l1_inequalities = sol.lambda.lpNorm<1>();
    for (Eigen::Index i = 0; i < num_h; ++i)
      if (!problem.in_equality_pair(static_cast<int>(i)))
        rec.dual_norm_l1_inequalities += sol.nu[i];
    rec.subsolver_iterations = sol.inner_iterations;
    rec.subsolver_converged = sol.converged;

    if (config.report_samples > 0) {
      if (config.deterministic && problem.mean_value)
        rec.objective_estimate =
            problem.mean_value(x_next) + problem.regularizer.eval(x_next);
      else
        rec.objective_estimate =
            estimate_expected_objective(problem, x_next, config.report_samples, rng_report);
    }

    // Observed range of f̃ + u between the anchor and the subproblem
    // minimizer: a running lower estimate of the surrogate-range constant.
    const Scalar range = (sub.objective.value(x) + problem.regularizer.eval(x)) -
                         (sub.objective.value(sol.x) + problem.regularizer.eval(sol.x));
    trace.observed_surrogate_range = std::max(trace.observed_surrogate_range, range);

    if (config.deterministic) {
      rec.tracking_error = (z - problem.mean_gradient(x)).norm();
    } else if (config.track_error_stride > 0 && t % config.track_error_stride == 0) {
      const Vector mean_grad =
          estimate_mean_gradient(problem, x, config.track_error_samples, rng_track);
      rec.tracking_error_estimate = (z - mean_grad).norm();
    }

    if (config.kkt_stride > 0 && (t % config.kkt_stride == 0 || t == config.iterations)) {
      const Vector grad_mean =
          estimate_mean_gradient(problem, sol.x, config.kkt_samples, rng_kkt);
      Vector r = grad_mean;
      Scalar comp_g = 0.0;
      for (Eigen::Index j = 0; j < num_g; ++j) {
        const auto& fn = problem.nonconvex_constraints[j].fn;
        comp_g += sol.lambda[j] * fn.value(sol.x);
        if (sol.lambda[j] != 0.0) r += sol.lambda[j] * fn.gradient(sol.x);
      }
      for (Eigen::Index i = 0; i < num_h; ++i) {
        const auto& fn = problem.convex_constraints[i];
        if (sol.nu[i] != 0.0) r += sol.nu[i] * fn.gradient(sol.x);
      }
      const auto& u = problem.regularizer;
      if (u.min_norm_subgradient)
        r += u.min_norm_subgradient(sol.x, r);
      else if (u.subgradient)
        r += u.subgradient(sol.x);
      const Scalar stationarity = r.norm();

      trace.kkt_scores.push_back({t, stationarity, comp_g});
      const Scalar score = stationarity * stationarity - std::min(0.0, comp_g);
      if (score < best_score) {
        best_score = score;
        trace.best_kkt_iteration = t;
        trace.best_candidate = sol.x;
        trace.best_lambda = sol.lambda;
        trace.best_nu = sol.nu;
        trace.best_kkt.stationarity = stationarity;
        trace.best_kkt.complementarity_g = comp_g;
        trace.best_kkt.samples_used = problem.mean_gradient ? 0 : config.kkt_samples;
      }
    }

    trace.iterations.push_back(std::move(rec));
    const long snapshot_stride = std::max<long>(1, config.iterations / 16);
    if (t % snapshot_stride == 0 || t == config.iterations)
      trace.snapshots.emplace_back(t, x_next);

    x_prev = x;
    x = x_next;
    beta = beta_next;
  }

  trace.final_point = x;
  if (!trace.iterations.empty()) {
    trace.delta_average = average_progress(trace);
    trace.mean_subsolver_iterations =
        static_cast<Scalar>(total_inner) / static_cast<Scalar>(trace.iterations.size());
  }
  if (trace.best_kkt_iteration > 0) {
    // Fill in the deterministic parts of the best report.
    Scalar comp_h = 0.0;
    for (Eigen::Index i = 0; i < num_h; ++i)
      comp_h += trace.best_nu[i] * problem.convex_constraints[i].value(trace.best_candidate);
    trace.best_kkt.complementarity_h = comp_h;
    trace.best_kkt.feasibility = feasibility_violation(problem, trace.best_candidate);
  }
  return trace;
}

}  // namespace

RunTrace run_costa(const StochasticProblem& problem, const RunConfig& config) {
  RunConfig actual = config;
  actual.baseline = RunConfig::Baseline::kCosta;
  return run_impl(problem, actual);
}

RunTrace run_classical_sca(const StochasticProblem& problem, const RunConfig& config) {
  RunConfig actual = config;
  actual.baseline = RunConfig::Baseline::kClassical;
  return run_impl(problem, actual);
}

Scalar average_progress(const RunTrace& trace) {
  if (trace.iterations.empty()) throw InvalidInput("average_progress: empty trace");
  Scalar acc = 0.0;
  for (const auto& rec : trace.iterations) acc += rec.delta_norm;
  return acc / static_cast<Scalar>(trace.iterations.size());
}

long best_kkt_point(const std::vector<KktScoreEntry>& scores) {
  if (scores.empty()) throw InvalidInput("best_kkt_point: no reports");
  long best_t = scores.front().t;
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (const auto& entry : scores) {
    const Scalar score =
        entry.stationarity * entry.stationarity - std::min(0.0, entry.complementarity_g);
    if (score < best) {
      best = score;
      best_t = entry.t;
    }
  }
  return best_t;
}

RateCertificate rate_bound(const SmoothnessMeta& meta, Scalar kbar, Scalar w, Scalar c,
                           long T) {
  if (T < 1) throw InvalidInput("rate_bound: T must be >= 1");
  RateCertificate cert;
  cert.initial_gap = meta.require(meta.initial_gap, "B_1");
  cert.noise_std = meta.require(meta.noise_std, "sigma");
  cert.smoothness = meta.require(meta.smoothness, "L");
  cert.lipschitz = meta.require(meta.lipschitz, "G");
  cert.kbar = kbar;
  cert.momentum_scale = c;
  cert.offset = w;
  cert.horizon = T;

  const Scalar L2 = cert.smoothness * cert.smoothness;
  cert.m_t = 8.0 * cert.initial_gap +
             cert.noise_std * cert.noise_std * std::cbrt(w) / (L2 * kbar * kbar) +
             (2.0 * c * c * kbar * kbar / L2) * std::log(static_cast<Scalar>(T) + 2.0);
  const Scalar g2 = cert.lipschitz * cert.lipschitz;
  cert.bound = std::sqrt(cert.m_t * std::cbrt(w + static_cast<Scalar>(T) * g2) /
                         static_cast<Scalar>(T));
  cert.d = (c - 4.0 * L2 - g2 / (6.0 * kbar * kbar * kbar)) / (2.0 * L2);
  return cert;
}

}  // namespace costa
