#pragma once

#include "costa/surrogate.hpp"
#include "costa/types.hpp"

#include <optional>

namespace costa {

/// Problem constants used by parameter validation, rate certificates, and the
/// dual-bound monitor. Entries may be left unknown; operations that need an
/// unknown entry fail with MetadataRequired instead of guessing.
struct SmoothnessMeta {
  std::optional<Scalar> smoothness;        // L
  std::optional<Scalar> lipschitz;         // G
  std::optional<Scalar> noise_std;         // σ
  std::optional<Scalar> strong_convexity;  // μ (surrogate modulus)
  std::optional<Scalar> surrogate_range;   // B_U
  std::optional<Scalar> initial_gap;       // B_1

  void validate() const;
  Scalar require(const std::optional<Scalar>& field, const char* name) const;
};

/// Convex regularizer u. `prox` and `min_norm_subgradient` are optional;
/// the subsolver falls back to subgradient steps when no prox is available,
/// and KKT reports fall back to the plain subgradient when no min-norm
/// completion is available.
struct Regularizer {
  std::function<Scalar(const Vector&)> value;
  std::function<Vector(const Vector&)> subgradient;
  // prox_{step·u}(x)
  std::function<Vector(const Vector&, Scalar)> prox;
  // argmin_{v ∈ ∂u(x)} ‖r + v‖ given the smooth residual r
  std::function<Vector(const Vector&, const Vector&)> min_norm_subgradient;

  static Regularizer zero();
  static Regularizer l1(Scalar weight);

  Scalar eval(const Vector& x) const { return value ? value(x) : 0.0; }
  bool trivial() const { return !static_cast<bool>(value); }
};

/// Possibly non-convex constraint g_j, shipped with its surrogate builder.
struct NonconvexConstraint {
  SmoothFunction fn;
  std::function<ConstraintSurrogate(const Vector& anchor)> surrogate_at;
};

/// The optimization problem: minimize E[f(x,ξ)] + u(x) subject to h(x) ≤ 0
/// (convex) and g(x) ≤ 0 (possibly non-convex). All oracles are immutable
/// after construction and safe to share across threads; each concurrent
/// consumer owns its own RngStream.
struct StochasticProblem {
  Eigen::Index dimension = 0;

  std::function<Sample(RngStream&)> draw_sample;
  std::function<Scalar(const Vector&, const Sample&)> objective_value;    // f(x,ξ)
  std::function<Vector(const Vector&, const Sample&)> objective_gradient; // ∇f(x,ξ)

  // Exact U(x) = E[f(x,ξ)] and ∇U(x) when the problem can provide them
  // (deterministic problems, empirical expectations, closed-form noise).
  std::function<Scalar(const Vector&)> mean_value;
  std::function<Vector(const Vector&)> mean_gradient;

  Regularizer regularizer;
  std::vector<SmoothFunction> convex_constraints;       // h_i
  std::vector<NonconvexConstraint> nonconvex_constraints; // g_j
  // Indices into convex_constraints that encode affine equalities as
  // (h, −h) pairs. Such rows have no strict interior, so the
  // constraint-qualification machinery treats their span as a tangent
  // subspace instead of demanding a descent margin.
  std::vector<std::pair<int, int>> equality_pairs;
  SmoothnessMeta meta;

  bool has_mean_oracle() const { return static_cast<bool>(mean_gradient); }
  bool in_equality_pair(int convex_index) const {
    for (const auto& [lo, hi] : equality_pairs)
      if (convex_index == lo || convex_index == hi) return true;
    return false;
  }
};

/// max(0, max_j g_j(x), max_i h_i(x)); zero iff x is feasible up to exact
/// arithmetic. No constraints => 0.
Scalar feasibility_violation(const StochasticProblem& problem, const Vector& x);

/// Monte-Carlo estimate (1/m)Σ f(x,ξ_k) + u(x) over m fresh samples.
/// Deterministic given the stream state.
Scalar estimate_expected_objective(const StochasticProblem& problem, const Vector& x,
                                   int samples, RngStream& rng);

}  // namespace costa
