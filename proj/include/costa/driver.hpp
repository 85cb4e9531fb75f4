#pragma once

#include "costa/diagnostics.hpp"
#include "costa/problem.hpp"
#include "costa/schedule.hpp"
#include "costa/subsolver.hpp"

#include <optional>

namespace costa {

struct RunConfig {
  long iterations = 0;  // T
  Scalar kbar = 0.0;
  Scalar w = 0.0;
  Scalar c = 0.0;
  Scalar modulus = 0.0;  // surrogate strong-convexity μ
  Scalar subsolver_tolerance = 1e-8;
  Vector initial_point;  // x_1, must be feasible
  std::uint64_t seed = 0;
  bool deterministic = false;

  enum class Baseline { kCosta, kClassical };
  Baseline baseline = Baseline::kCosta;

  // Classical-tracking baseline: z_{t+1} = (1−ρ_t) z_t + ρ_t ∇f(x_t,ξ_t)
  // with ρ_t = min(1, scale/(t+1)^exponent).
  Scalar classical_rho_scale = 1.0;
  Scalar classical_rho_exponent = 0.5;
  std::optional<Scalar> classical_rho_override;

  std::optional<Scalar> eta_override;  // test hook: fixed step size

  int report_samples = 1;  // per-iteration objective estimate (0 = skip)
  int kkt_stride = 1;      // per-iterate KKT scoring stride (0 = off)
  int kkt_samples = 64;    // Monte-Carlo gradient samples when no mean oracle
  int track_error_stride = 0;    // stochastic-mode tracking-error estimate (0 = off)
  int track_error_samples = 64;
  bool warm_start_duals = true;
  // Subproblems start from the anchor x_t by default; disabling this starts
  // them from the origin (the cold-start side of the monitored comparison).
  bool subsolver_start_at_anchor = true;
  SolveOptions subsolver;  // tolerance is overwritten from subsolver_tolerance
};

struct IterationRecord {
  long t = 0;
  Scalar eta = 0.0;
  Scalar beta = 0.0;        // the β_t used in this iteration's tracking update
  Scalar delta_norm = 0.0;  // ‖x̂_t − x_t‖
  Scalar feasibility = 0.0; // violation at x_{t+1}
  Scalar dual_norm_l1 = 0.0;
  // Same norm with equality-pair multipliers excluded; the Slater-based
  // dual bound covers only the inequality part.
  Scalar dual_norm_l1_inequalities = 0.0;
  Scalar objective_estimate = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar tracking_error = std::numeric_limits<Scalar>::quiet_NaN();  // ‖e_t‖, deterministic mode
  Scalar tracking_error_estimate = std::numeric_limits<Scalar>::quiet_NaN();
  int subsolver_iterations = 0;
  bool subsolver_converged = true;
};

struct KktScoreEntry {
  long t = 0;
  Scalar stationarity = 0.0;
  Scalar complementarity_g = 0.0;  // λ̂'g(x̂)
};

struct RunTrace {
  std::vector<IterationRecord> iterations;
  std::vector<KktScoreEntry> kkt_scores;
  std::vector<std::pair<long, Vector>> snapshots;  // coarse iterate samples

  Vector final_point;
  long best_kkt_iteration = 0;
  Vector best_candidate;  // x̂ at the best-KKT iteration
  Vector best_lambda;
  Vector best_nu;
  KKTReport best_kkt;

  Scalar delta_average = 0.0;             // Δ_T
  Scalar observed_surrogate_range = 0.0;  // running lower estimate of B_U
  long oracle_gradient_evals = 0;         // every gradient evaluation counted
  long oracle_sample_pairs = 0;           // per-sample (paired) convention
  Scalar mean_subsolver_iterations = 0.0;
  bool aborted = false;
  std::string abort_reason;
};

/// Runs the momentum-tracked successive-convex-approximation loop: track z,
/// update the schedules, build the running surrogate and the constraint
/// surrogates at x_t, solve the convex subproblem, then average
/// x_{t+1} = (1−η_t)x_t + η_t x̂_t. Deterministic given the seed.
RunTrace run_costa(const StochasticProblem& problem, const RunConfig& config);

/// Same loop with the classical exponential tracking rule and no correction
/// term: the subproblem surrogate is anchored directly on the tracked z.
RunTrace run_classical_sca(const StochasticProblem& problem, const RunConfig& config);

/// Δ_T: arithmetic mean of the recorded ‖δ_t‖.
Scalar average_progress(const RunTrace& trace);

/// argmin over t of stationarity² − min(0, λ̂'g(x̂)); ties break to the
/// smallest t.
long best_kkt_point(const std::vector<KktScoreEntry>& scores);

/// Rate certificate evaluated from the problem constants:
///   M_T = 8B₁ + σ²w^{1/3}/(L²k̄²) + (2c²k̄²/L²)·log(T+2)
///   bound = sqrt(M_T (w + T G²)^{1/3} / T)
///   d = (c − 4L² − G²/(6k̄³)) / (2L²)
struct RateCertificate {
  Scalar m_t = 0.0;
  Scalar d = 0.0;
  Scalar bound = 0.0;
  Scalar initial_gap = 0.0;
  Scalar noise_std = 0.0;
  Scalar smoothness = 0.0;
  Scalar lipschitz = 0.0;
  Scalar kbar = 0.0;
  Scalar momentum_scale = 0.0;
  Scalar offset = 0.0;
  long horizon = 0;
};

RateCertificate rate_bound(const SmoothnessMeta& meta, Scalar kbar, Scalar w, Scalar c,
                           long T);

}  // namespace costa
