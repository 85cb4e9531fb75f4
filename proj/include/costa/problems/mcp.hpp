#pragma once

#include "costa/problem.hpp"

namespace costa::problems {

/// Minimax concave penalty, per coordinate λ|x| − h_{λ,θ}(x) with
///   h_{λ,θ}(x) = x²/(2θ) for |x| ≤ θλ,  λ|x| − θλ²/2 otherwise
/// (a Huber function, so its tangents underestimate it and the surrogate
/// below majorizes exactly). The smoothed variant replaces |x| with
/// s(x) = sqrt(x² + ϱ) throughout, keeping the same structure with the
/// branch boundary at s(x) = θλ.
struct McpParams {
  Scalar lambda = 1.0;      // penalty weight
  Scalar theta = 1.0;       // concavity width
  Scalar smoothing = 1e-6;  // ϱ
  Scalar level = 0.0;       // τ: the constraint is mcp(x) ≤ τ
  bool smoothed = true;

  void validate() const;
};

Scalar mcp_value(const Vector& x, const McpParams& params);
Vector mcp_gradient(const Vector& x, const McpParams& params);

/// Surrogate of the raw penalty at the anchor: the ℓ1 (or smoothed-ℓ1) term
/// kept as-is, the concave correction linearized from above.
ConstraintSurrogate mcp_surrogate(const Vector& anchor, const McpParams& params);

/// The constraint g(x) = mcp(x) − τ packaged with its surrogate builder.
NonconvexConstraint mcp_constraint(const McpParams& params);

}  // namespace costa::problems
