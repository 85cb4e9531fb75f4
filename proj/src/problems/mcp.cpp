#include "costa/problems/mcp.hpp"

#include <cmath>

namespace costa::problems {

namespace {

Scalar soft_abs(Scalar x, const McpParams& p) {
  return p.smoothed ? std::sqrt(x * x + p.smoothing) : std::abs(x);
}

Scalar soft_abs_derivative(Scalar x, const McpParams& p) {
  if (p.smoothed) return x / std::sqrt(x * x + p.smoothing);
  return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

Scalar huber(Scalar m, const McpParams& p) {  // m = s(x) >= 0
  const Scalar knee = p.theta * p.lambda;
  if (m <= knee) return m * m / (2.0 * p.theta);
  return p.lambda * m - p.theta * p.lambda * p.lambda / 2.0;
}

Scalar huber_derivative(Scalar m, const McpParams& p) {
  const Scalar knee = p.theta * p.lambda;
  return m <= knee ? m / p.theta : p.lambda;
}

}  // namespace

void McpParams::validate() const {
  if (!(lambda > 0.0)) throw InvalidConfig("mcp: lambda must be > 0");
  if (!(theta > 0.0)) throw InvalidConfig("mcp: theta must be > 0");
  if (!(smoothing > 0.0)) throw InvalidConfig("mcp: smoothing constant must be > 0");
  if (level < 0.0) throw InvalidConfig("mcp: constraint level must be >= 0");
  if (smoothed && smoothing >= theta * theta * lambda * lambda)
    throw InvalidConfig("mcp: smoothing constant must stay below (theta*lambda)^2");
}

Scalar mcp_value(const Vector& x, const McpParams& p) {
  Scalar acc = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const Scalar s = soft_abs(x[k], p);
    acc += p.lambda * s - huber(s, p);
  }
  return acc;
}

Vector mcp_gradient(const Vector& x, const McpParams& p) {
  Vector grad(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const Scalar s = soft_abs(x[k], p);
    grad[k] = soft_abs_derivative(x[k], p) * (p.lambda - huber_derivative(s, p));
  }
  return grad;
}

ConstraintSurrogate mcp_surrogate(const Vector& anchor, const McpParams& p) {
  // Per coordinate: λ s(x) − [h(s_t) + h'(s_t) s'(x_t) (x − x_t)]. The
  // linear part is frozen at the anchor, so precompute it.
  Vector slope(anchor.size());
  Scalar offset = 0.0;
  for (Eigen::Index k = 0; k < anchor.size(); ++k) {
    const Scalar s = soft_abs(anchor[k], p);
    slope[k] = huber_derivative(s, p) * soft_abs_derivative(anchor[k], p);
    offset += huber(s, p) - slope[k] * anchor[k];
  }

  ConstraintSurrogate surrogate;
  surrogate.anchor = anchor;
  surrogate.tag = ConvexityTag::kConvexComposite;
  surrogate.fn.value = [p, slope, offset](const Vector& x) {
    Scalar acc = -offset;
    for (Eigen::Index k = 0; k < x.size(); ++k)
      acc += p.lambda * soft_abs(x[k], p) - slope[k] * x[k];
    return acc;
  };
  surrogate.fn.gradient = [p, slope](const Vector& x) {
    Vector grad(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k)
      grad[k] = p.lambda * soft_abs_derivative(x[k], p) - slope[k];
    return grad;
  };
  return surrogate;
}

NonconvexConstraint mcp_constraint(const McpParams& p) {
  p.validate();
  NonconvexConstraint g;
  g.fn.value = [p](const Vector& x) { return mcp_value(x, p) - p.level; };
  g.fn.gradient = [p](const Vector& x) { return mcp_gradient(x, p); };
  g.surrogate_at = [p](const Vector& anchor) {
    ConstraintSurrogate s = mcp_surrogate(anchor, p);
    auto raw = s.fn.value;
    s.fn.value = [raw, p](const Vector& x) { return raw(x) - p.level; };
    return s;
  };
  return g;
}

}  // namespace costa::problems
