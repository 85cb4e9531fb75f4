#pragma once

#include "costa/problem.hpp"

#include <Eigen/Core>

namespace costa::problems {

/// Multi-agent energy-optimal waypoint planning under an analytic ocean
/// current field with multiplicative ensemble noise. The decision vector
/// stacks all waypoints agent-major: x = [x_1(1..T), x_2(1..T), ...] with
/// two coordinates per waypoint; x_i(0) is the fixed start.
struct Environment {
  int agents = 1;
  int horizon = 10;  // T waypoints per agent
  Scalar dt = 1.0;
  std::vector<Eigen::Vector2d> start;
  std::vector<Eigen::Vector2d> goal;
  Eigen::Vector2d obstacle_center = Eigen::Vector2d::Zero();
  Scalar obstacle_radius = 0.0;  // r°; 0 disables obstacle constraints
  Scalar agent_radius = 0.0;     // r; 0 disables inter-agent constraints
  std::vector<Scalar> speed_cap; // v_i^max
  Scalar current_scale = 0.0;    // ω
  Scalar noise_std = 0.0;        // σ

  void validate() const;
  Eigen::Index dimension() const { return 2 * agents * horizon; }

  /// sup‖ϑ‖ over the plane; attained at the origin, equals ω.
  Scalar field_sup() const { return current_scale; }
  /// Δϑ^max: the support bound of ‖ϑ(x,ξ) − E[ϑ(x,ξ)]‖ under the ±3σ noise
  /// truncation.
  Scalar support_bound() const { return 3.0 * noise_std * field_sup(); }
  /// (v_i − Δϑ^max): the tightened per-step speed budget.
  Scalar tightened_cap(int agent) const;
};

/// ϑ(x) = ω [1 − 2x₁², −2x₁x₂]' exp(−‖x‖²)
Eigen::Vector2d currents(const Eigen::Vector2d& p, Scalar omega);
Eigen::Matrix2d currents_jacobian(const Eigen::Vector2d& p, Scalar omega);

/// Componentwise N(0, σ²), redrawn until inside [−3σ, 3σ].
Eigen::Vector2d draw_current_noise(Scalar sigma, RngStream& rng);

/// One ensemble member at a point: ϑ_k(x)(1 + e_k).
Eigen::Vector2d ensemble_sample(const Eigen::Vector2d& p, Scalar omega, Scalar sigma,
                                RngStream& rng);

/// Per-component variance of the truncated noise (slightly below σ²).
Scalar truncated_noise_variance(Scalar sigma);

/// Global bound on the second derivative of the field map, so that
/// ‖ϑ(b) − ϑ(a) − J(a)(b − a)‖ ≤ (C/2)‖b − a‖². Scanned once per call.
Scalar field_curvature_bound(Scalar omega);

Eigen::Vector2d waypoint(const Environment& env, const Vector& x, int agent, int tau);

StochasticProblem build_trajectory_problem(const Environment& env);

Vector straight_line_trajectory(const Environment& env);

/// A feasible starting trajectory: straight lines, detoured around the
/// inflated obstacle when they would cross it. Throws InvalidConfig when no
/// feasible start can be constructed for the given environment.
Vector initial_trajectory(const Environment& env);

Scalar trajectory_energy(const Environment& env, const Vector& x, int samples,
                         RngStream& rng);
Scalar straight_line_energy(const Environment& env, int samples, RngStream& rng);

}  // namespace costa::problems
