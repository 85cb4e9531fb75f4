#pragma once

#include "costa/problem.hpp"
#include "costa/surrogate.hpp"

#include <optional>

namespace costa {

/// Parameters of the strong (ω, ρ)-MFCQ condition at a probed point: a
/// common descent direction d with margin ρ for every constraint within ω of
/// activity. `margin` is +infinity when no constraint is near-active.
struct MFCQParams {
  Scalar activity_threshold = 0.0;  // ω
  Scalar margin = 0.0;              // ρ
  Vector direction;                 // d, box-capped LP maximizer
  std::vector<int> active_nonconvex;  // indices into g
  std::vector<int> active_convex;     // indices into h

  bool no_active_constraints() const { return !std::isfinite(margin); }
};

/// Maximizes ρ subject to ⟨∇g_j(x), d⟩ ≤ −ρ and ⟨∇h_i(x), d⟩ ≤ −ρ over the
/// near-active sets {k : value ≥ −ω}. The ℓ∞ box ‖d‖∞ ≤ box_cap keeps the
/// program linear and bounded; (ρ, d) = (0, 0) is always feasible.
MFCQParams estimate_rho(const StochasticProblem& problem, const Vector& x, Scalar omega,
                        Scalar box_cap = 1.0);

struct SlaterMarginReport {
  Vector probe;            // x_t + (ρ/L)·d̂ with d̂ the ℓ2-normalized direction
  Scalar threshold = 0.0;  // −ρ²/(2L)
  ValidationReport checks;
};

/// Probes the strictly feasible point implied by strong MFCQ and reports the
/// per-constraint margins of the surrogates and of h against −ρ²/(2L), plus
/// the ω ≥ (ρ/L)(G + ρ/2) precondition (skipped when G is unknown).
SlaterMarginReport slater_margin(const StochasticProblem& problem, const Vector& x_t,
                                 const std::vector<ConstraintSurrogate>& surrogates,
                                 const MFCQParams& mfcq, std::optional<Scalar> smoothness);

/// 2·B_U·L/ρ², the bound on ‖λ̂‖₁ + ‖ν̂‖₁ along the run.
Scalar dual_bound(Scalar surrogate_range, Scalar smoothness, Scalar margin);

/// ε-KKT quantities at a candidate point: stationarity with a Monte-Carlo
/// (or exact, when the problem has a mean oracle) objective gradient and the
/// norm-minimizing subgradient of u, plus complementarity slacks and the
/// feasibility violation.
struct KKTReport {
  Scalar stationarity = 0.0;
  Scalar complementarity_g = 0.0;  // λ'g(x)
  Scalar complementarity_h = 0.0;  // ν'h(x)
  Scalar feasibility = 0.0;
  int samples_used = 0;  // 0 = exact mean oracle
  Vector subgradient;    // the v ∈ ∂u(x) selected
};

KKTReport kkt_report(const StochasticProblem& problem, const Vector& x,
                     const Vector& lambda, const Vector& nu, int mc_samples,
                     RngStream& rng);

/// Finite-difference spot estimate of the local smoothness constant of
/// f(·,ξ) near a point. A monitor aid, not a certified bound.
Scalar spot_estimate_smoothness(const StochasticProblem& problem, const Vector& around,
                                int probes, RngStream& rng);

}  // namespace costa
