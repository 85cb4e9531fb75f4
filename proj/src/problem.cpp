#include "costa/problem.hpp"

#include <algorithm>
#include <cmath>

namespace costa {

void SmoothnessMeta::validate() const {
  auto positive = [](const std::optional<Scalar>& v, const char* name) {
    if (v && !(*v > 0.0))
      throw InvalidConfig(std::string("SmoothnessMeta: ") + name + " must be > 0 when known");
  };
  auto nonnegative = [](const std::optional<Scalar>& v, const char* name) {
    if (v && !(*v >= 0.0))
      throw InvalidConfig(std::string("SmoothnessMeta: ") + name + " must be >= 0 when known");
  };
  positive(smoothness, "L");
  nonnegative(lipschitz, "G");
  nonnegative(noise_std, "sigma");
  positive(strong_convexity, "mu");
  positive(surrogate_range, "B_U");
  nonnegative(initial_gap, "B_1");
}

Scalar SmoothnessMeta::require(const std::optional<Scalar>& field, const char* name) const {
  if (!field) throw MetadataRequired(std::string("metadata required: ") + name + " is unknown");
  return *field;
}

Regularizer Regularizer::zero() { return Regularizer{}; }

Regularizer Regularizer::l1(Scalar weight) {
  if (!(weight > 0.0)) throw InvalidConfig("l1 regularizer: weight must be > 0");
  Regularizer u;
  u.value = [weight](const Vector& x) { return weight * x.lpNorm<1>(); };
  u.subgradient = [weight](const Vector& x) {
    Vector v(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k)
      v[k] = x[k] > 0.0 ? weight : (x[k] < 0.0 ? -weight : 0.0);
    return v;
  };
  u.prox = [weight](const Vector& x, Scalar step) {
    const Scalar s = weight * step;
    Vector p(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k)
      p[k] = x[k] > s ? x[k] - s : (x[k] < -s ? x[k] + s : 0.0);
    return p;
  };
  // On zero coordinates any v_k in [-w, w] is a subgradient; clamp -r there.
  u.min_norm_subgradient = [weight](const Vector& x, const Vector& r) {
    Vector v(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      if (x[k] > 0.0)
        v[k] = weight;
      else if (x[k] < 0.0)
        v[k] = -weight;
      else
        v[k] = std::clamp(-r[k], -weight, weight);
    }
    return v;
  };
  return u;
}

Scalar feasibility_violation(const StochasticProblem& problem, const Vector& x) {
  require_dimension(x, problem.dimension, "feasibility_violation");
  Scalar worst = 0.0;
  for (const auto& g : problem.nonconvex_constraints)
    worst = std::max(worst, g.fn.value(x));
  for (const auto& h : problem.convex_constraints)
    worst = std::max(worst, h.value(x));
  return worst;
}

Scalar estimate_expected_objective(const StochasticProblem& problem, const Vector& x,
                                   int samples, RngStream& rng) {
  require_dimension(x, problem.dimension, "estimate_expected_objective");
  if (samples < 1) throw InvalidInput("estimate_expected_objective: need at least one sample");
  Scalar acc = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Sample xi = problem.draw_sample(rng);
    acc += problem.objective_value(x, xi);
  }
  return acc / samples + problem.regularizer.eval(x);
}

}  // namespace costa
