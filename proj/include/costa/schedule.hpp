#pragma once

#include "costa/problem.hpp"
#include "costa/types.hpp"

namespace costa {

/// Bookkeeping for the adaptive step-size/momentum schedules
///   η_t = k̄ / (w + Σ_{i≤t} G_i²)^{1/3},   β_{t+1} = c·η_t²,
/// with G_t = ‖∇f(x_t,ξ_t)‖. η is nonincreasing along any run.
struct ScheduleState {
  Scalar kbar = 0.0;
  Scalar offset = 0.0;          // w
  Scalar momentum_scale = 0.0;  // c
  Scalar sum_grad_sq = 0.0;     // Σ G_i²
  long iteration = 0;           // t

  void validate() const;
};

/// k̄ / (w + Σ G_i²)^{1/3}; equals k̄/w^{1/3} before any accumulation.
Scalar step_size(const ScheduleState& state);

/// c·η²; for the initial state this equals β_1 = c·k̄²/w^{2/3}.
Scalar momentum(const ScheduleState& state, Scalar eta);

/// Returns the state with G_t² added and the counter advanced.
ScheduleState accumulate(const ScheduleState& state, Scalar grad_norm);

/// Recursive gradient tracking:
///   z_{t+1} = ∇f(x_t,ξ_t) + (1−β_t)(z_t − ∇f(x_{t−1},ξ_t)).
/// Both gradients must be evaluated under the same sample ξ_t. β=1 returns
/// the fresh gradient; β=0 is the plain recursive (SARAH) correction.
Vector storm_update(const Vector& z, const Vector& grad_at_current,
                    const Vector& grad_at_previous_same_sample, Scalar beta);

/// Checks the step/momentum parameters against the rate-certificate
/// hypotheses:
///   0 < k̄ ≤ w^{1/3},
///   c ≤ w^{2/3}/(4k̄²),
///   c ≥ 4L² + G²/(6Lk̄³)  and the variant without L in the denominator
///     (both appear in the analysis; the stricter one gates the check),
///   w ≥ (2Lk̄/(4μ−3))³,  w ≥ G²,
///   β_1 = c·k̄²/w^{2/3} ≤ 1/4.
/// Checks needing unknown metadata are reported as skipped, not passed.
ValidationReport validate_params(const SmoothnessMeta& meta, Scalar kbar, Scalar w,
                                 Scalar c, Scalar mu);

}  // namespace costa
