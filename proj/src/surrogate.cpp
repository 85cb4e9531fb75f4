#include "costa/surrogate.hpp"

#include <cmath>

namespace costa {

Scalar ObjectiveSurrogate::value(const Vector& x) const {
  if (custom) return custom.value(x);
  const Vector d = x - anchor;
  return anchor_value + anchor_gradient.dot(d) + 0.5 * modulus * d.squaredNorm();
}

Vector ObjectiveSurrogate::gradient(const Vector& x) const {
  if (custom) return custom.gradient(x);
  return anchor_gradient + modulus * (x - anchor);
}

ObjectiveSurrogate build_proximal_surrogate(const Vector& anchor,
                                            const Vector& sampled_gradient,
                                            Scalar sampled_value, Scalar modulus) {
  if (!(modulus > 0.0)) throw InvalidConfig("proximal surrogate: modulus must be > 0");
  require_dimension(sampled_gradient, anchor.size(), "proximal surrogate gradient");
  ObjectiveSurrogate s;
  s.anchor = anchor;
  s.anchor_gradient = sampled_gradient;
  s.anchor_value = sampled_value;
  s.modulus = modulus;
  return s;
}

RunningSurrogate build_running_surrogate(ObjectiveSurrogate base, const Vector& z_next) {
  require_dimension(z_next, base.anchor.size(), "running surrogate tracker");
  RunningSurrogate r;
  r.correction = z_next - base.anchor_gradient;
  r.base = std::move(base);
  return r;
}

ValidationReport validate_tangent_match(const SmoothFunction& surrogate,
                                        const SmoothFunction& original,
                                        const Vector& anchor, Scalar fd_step) {
  if (!(fd_step > 0.0)) throw InvalidInput("validate_tangent_match: fd step must be > 0");
  const Scalar tol = 10.0 * fd_step * fd_step;
  const Vector analytic = surrogate.gradient(anchor);

  Vector fd(anchor.size());
  Vector probe = anchor;
  for (Eigen::Index k = 0; k < anchor.size(); ++k) {
    probe[k] = anchor[k] + fd_step;
    const Scalar up = surrogate.value(probe);
    probe[k] = anchor[k] - fd_step;
    const Scalar down = surrogate.value(probe);
    probe[k] = anchor[k];
    fd[k] = (up - down) / (2.0 * fd_step);
  }

  ValidationReport report;
  const Scalar fd_dev = (analytic - fd).lpNorm<Eigen::Infinity>();
  report.checks.push_back({"surrogate gradient vs finite difference",
                           fd_dev <= tol ? CheckStatus::kPass : CheckStatus::kFail, fd_dev,
                           tol, ""});
  if (original.gradient) {
    const Scalar orig_dev =
        (analytic - original.gradient(anchor)).lpNorm<Eigen::Infinity>();
    report.checks.push_back({"surrogate gradient vs original gradient",
                             orig_dev <= tol ? CheckStatus::kPass : CheckStatus::kFail,
                             orig_dev, tol, ""});
  }
  return report;
}

ValidationReport validate_majorization(const ConstraintSurrogate& surrogate,
                                       const SmoothFunction& original,
                                       const std::function<Vector(RngStream&)>& sampler,
                                       int samples, RngStream& rng) {
  if (samples < 1) throw InvalidInput("validate_majorization: need at least one sample");
  ValidationReport report;

  const Scalar at_anchor_gap =
      std::abs(surrogate.fn.value(surrogate.anchor) - original.value(surrogate.anchor));
  report.checks.push_back({"equality at anchor",
                           at_anchor_gap <= 1e-12 ? CheckStatus::kPass : CheckStatus::kFail,
                           at_anchor_gap, 1e-12, ""});

  Scalar min_gap = std::numeric_limits<Scalar>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Vector x = sampler(rng);
    min_gap = std::min(min_gap, surrogate.fn.value(x) - original.value(x));
  }
  report.checks.push_back({"majorization min gap",
                           min_gap >= -1e-10 ? CheckStatus::kPass : CheckStatus::kFail,
                           min_gap, -1e-10, ""});
  return report;
}

ValidationReport validate_strong_convexity(const ObjectiveSurrogate& surrogate,
                                           Scalar modulus, int pairs, RngStream& rng) {
  if (pairs < 1) throw InvalidInput("validate_strong_convexity: need at least one pair");
  std::normal_distribution<Scalar> gauss(0.0, 1.0);
  const Eigen::Index n = surrogate.anchor.size();

  Scalar min_slack = std::numeric_limits<Scalar>::infinity();
  for (int k = 0; k < pairs; ++k) {
    Vector x(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = surrogate.anchor[i] + gauss(rng);
      y[i] = surrogate.anchor[i] + gauss(rng);
    }
    const Vector d = x - y;
    const Scalar lhs = (surrogate.gradient(x) - surrogate.gradient(y)).dot(d);
    min_slack = std::min(min_slack, lhs - modulus * d.squaredNorm());
  }

  ValidationReport report;
  report.checks.push_back({"strong convexity min slack",
                           min_slack >= -1e-10 ? CheckStatus::kPass : CheckStatus::kFail,
                           min_slack, -1e-10, ""});
  return report;
}

}  // namespace costa
