#pragma once

#include "costa/types.hpp"

namespace costa {

/// Strongly convex model of the sampled objective, anchored at the current
/// iterate. The default instance is the proximal-linear quadratic
///   f̂(x) = f(x_t,ξ_t) + ⟨∇f(x_t,ξ_t), x − x_t⟩ + (μ/2)‖x − x_t‖²;
/// a custom value/gradient pair may be supplied instead, in which case it
/// must pass the validators below before use.
struct ObjectiveSurrogate {
  Vector anchor;
  Vector anchor_gradient;
  Scalar anchor_value = 0.0;
  Scalar modulus = 0.0;  // strong-convexity modulus μ
  SmoothFunction custom; // empty => proximal-linear quadratic

  Scalar value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
};

/// Objective surrogate plus the linear correction aligning its anchor
/// gradient with the tracked estimate: value(x) = f̂(x) + ⟨x − x_t, q⟩ with
/// q = z_{t+1} − ∇f(x_t,ξ_t), so that ∇f̃(x_t) = z_{t+1} exactly.
struct RunningSurrogate {
  ObjectiveSurrogate base;
  Vector correction;  // q

  Scalar value(const Vector& x) const {
    return base.value(x) + correction.dot(x - base.anchor);
  }
  Vector gradient(const Vector& x) const {
    return base.gradient(x) + correction;
  }
};

enum class ConvexityTag { kLinear, kConvexComposite };

/// Convex majorizer of one non-convex constraint, anchored at x_t. Required
/// to equal the constraint at the anchor, majorize it on the feasible set,
/// and match its gradient at the anchor.
struct ConstraintSurrogate {
  Vector anchor;
  SmoothFunction fn;
  ConvexityTag tag = ConvexityTag::kConvexComposite;
};

ObjectiveSurrogate build_proximal_surrogate(const Vector& anchor,
                                            const Vector& sampled_gradient,
                                            Scalar sampled_value, Scalar modulus);

RunningSurrogate build_running_surrogate(ObjectiveSurrogate base, const Vector& z_next);

/// Checks ∇surrogate(anchor) against a central finite difference of the
/// surrogate itself and against the original gradient oracle. Passes when the
/// worst absolute deviation is at most 10·step² (central-difference
/// truncation order).
ValidationReport validate_tangent_match(const SmoothFunction& surrogate,
                                        const SmoothFunction& original,
                                        const Vector& anchor, Scalar fd_step);

/// Samples x from `sampler` and reports min over samples of
/// surrogate(x) − original(x); passes when the minimum gap is ≥ −1e−10 and
/// the anchor values agree within 1e−12.
ValidationReport validate_majorization(const ConstraintSurrogate& surrogate,
                                       const SmoothFunction& original,
                                       const std::function<Vector(RngStream&)>& sampler,
                                       int samples, RngStream& rng);

/// Checks ⟨∇f̂(x) − ∇f̂(y), x − y⟩ ≥ μ‖x − y‖² − 1e−10 over random pairs
/// drawn around the anchor; reports the minimum slack.
ValidationReport validate_strong_convexity(const ObjectiveSurrogate& surrogate,
                                           Scalar modulus, int pairs, RngStream& rng);

}  // namespace costa
