#include "costa/subsolver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace costa {

namespace {

// Rockafellar augmented-Lagrangian term for one inequality c(x) ≤ 0 with
// multiplier y and penalty p: ψ = (max(0, y + p·c)² − y²)/(2p). Smooth in x,
// and ∂ψ/∂x = max(0, y + p·c)·∇c(x).
struct AugmentedLagrangian {
  const ConvexSubproblem& sub;
  const Vector& lambda;
  const Vector& nu;
  Scalar penalty;

  Scalar value(const Vector& x) const {
    Scalar acc = sub.objective.value(x);
    for (std::size_t j = 0; j < sub.inequality_surrogates.size(); ++j)
      acc += term(sub.inequality_surrogates[j].fn.value(x), lambda[j]);
    for (std::size_t i = 0; i < sub.convex_constraints.size(); ++i)
      acc += term(sub.convex_constraints[i].value(x), nu[i]);
    return acc;
  }

  Scalar value_and_gradient(const Vector& x, Vector& grad) const {
    grad = sub.objective.gradient(x);
    Scalar acc = sub.objective.value(x);
    for (std::size_t j = 0; j < sub.inequality_surrogates.size(); ++j) {
      const auto& fn = sub.inequality_surrogates[j].fn;
      const Scalar c = fn.value(x);
      acc += term(c, lambda[j]);
      const Scalar mult = std::max(0.0, lambda[j] + penalty * c);
      if (mult > 0.0) grad += mult * fn.gradient(x);
    }
    for (std::size_t i = 0; i < sub.convex_constraints.size(); ++i) {
      const auto& fn = sub.convex_constraints[i];
      const Scalar c = fn.value(x);
      acc += term(c, nu[i]);
      const Scalar mult = std::max(0.0, nu[i] + penalty * c);
      if (mult > 0.0) grad += mult * fn.gradient(x);
    }
    return acc;
  }

  Scalar term(Scalar c, Scalar y) const {
    const Scalar shifted = std::max(0.0, y + penalty * c);
    return (shifted * shifted - y * y) / (2.0 * penalty);
  }
};

Vector apply_prox(const Regularizer& u, const Vector& x, Scalar step) {
  if (u.prox) return u.prox(x, step);
  return x;  // trivial regularizer
}

// Diminishing-step subgradient descent: the fallback when u has no prox
// oracle. Tracks the best iterate by objective value.
int minimize_subgradient(const AugmentedLagrangian& al, const Regularizer& u, Vector& x,
                         Scalar step0, int budget) {
  Vector best = x;
  Scalar best_value = al.value(x) + u.eval(x);
  Vector grad(x.size());
  int iter = 0;
  for (; iter < budget; ++iter) {
    al.value_and_gradient(x, grad);
    grad += u.subgradient(x);
    const Scalar norm = grad.norm();
    if (norm <= 1e-14) break;
    const Scalar step = step0 / std::sqrt(static_cast<Scalar>(iter) + 1.0);
    x -= (step / std::max(1.0, norm)) * grad;
    const Scalar value = al.value(x) + u.eval(x);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  }
  x = best;
  return iter;
}

// Proximal gradient with Barzilai-Borwein steps and a nonmonotone
// backtracking safeguard (8-step reference). The spectral step adapts to
// whichever penalty curvature is active, which matters because the
// augmented-Lagrangian Hessian jumps at the constraint boundaries; the
// nonmonotone test keeps the safeguard from clipping the long BB steps.
// Returns the number of iterations spent; `x` holds the last accepted
// iterate and `step` carries over between rounds.
int minimize_inner(const AugmentedLagrangian& al, const Regularizer& u, Vector& x,
                   Scalar& step, Scalar inner_tol, int budget) {
  if (!u.trivial() && !u.prox)
    return minimize_subgradient(al, u, x, step, budget);

  Vector grad(x.size());
  al.value_and_gradient(x, grad);

  constexpr int kMemory = 8;
  std::array<Scalar, kMemory> recent;
  recent.fill(al.value(x) + u.eval(x));
  int slot = 0;

  int iter = 0;
  for (; iter < budget; ++iter) {
    const Scalar f_ref = *std::max_element(recent.begin(), recent.end());
    Vector candidate;
    Scalar f_candidate = 0.0;
    for (int bt = 0; bt < 80; ++bt) {
      candidate = apply_prox(u, x - step * grad, step);
      f_candidate = al.value(candidate) + u.eval(candidate);
      const Scalar slack = 0.01 * (candidate - x).squaredNorm() / (2.0 * step);
      if (f_candidate <= f_ref - slack + 1e-12 * (1.0 + std::abs(f_ref))) break;
      step *= 0.5;
    }

    const Scalar mapping = (x - candidate).norm() / step;
    Vector grad_next(x.size());
    al.value_and_gradient(candidate, grad_next);

    const Vector dx = candidate - x;
    const Vector dg = grad_next - grad;
    const Scalar dx_dg = dx.dot(dg);
    if (dx_dg > 1e-30) {
      step = std::min(std::max(dx.squaredNorm() / dx_dg, 1e-12), 1e12);
    } else {
      step *= 2.0;
    }

    x = candidate;
    grad = grad_next;
    recent[static_cast<std::size_t>(slot)] = f_candidate;
    slot = (slot + 1) % kMemory;
    if (mapping <= inner_tol) {
      ++iter;
      break;
    }
  }
  return iter;
}

}  // namespace

KktResiduals kkt_residuals(const ConvexSubproblem& sub, const Vector& x,
                           const Vector& lambda, const Vector& nu) {
  require_dimension(x, sub.anchor.size(), "kkt_residuals point");
  if (lambda.size() != static_cast<Eigen::Index>(sub.inequality_surrogates.size()) ||
      nu.size() != static_cast<Eigen::Index>(sub.convex_constraints.size()))
    throw InvalidInput("kkt_residuals: dual dimensions do not match the constraints");

  KktResiduals res;
  Vector r = sub.objective.gradient(x);
  for (std::size_t j = 0; j < sub.inequality_surrogates.size(); ++j) {
    const auto& fn = sub.inequality_surrogates[j].fn;
    const Scalar c = fn.value(x);
    res.primal_violation = std::max(res.primal_violation, c);
    res.complementarity = std::max(res.complementarity, std::abs(lambda[j] * c));
    if (lambda[j] != 0.0) r += lambda[j] * fn.gradient(x);
  }
  for (std::size_t i = 0; i < sub.convex_constraints.size(); ++i) {
    const auto& fn = sub.convex_constraints[i];
    const Scalar c = fn.value(x);
    res.primal_violation = std::max(res.primal_violation, c);
    res.complementarity = std::max(res.complementarity, std::abs(nu[i] * c));
    if (nu[i] != 0.0) r += nu[i] * fn.gradient(x);
  }
  res.primal_violation = std::max(res.primal_violation, 0.0);

  const auto& u = sub.regularizer;
  if (u.min_norm_subgradient)
    r += u.min_norm_subgradient(x, r);
  else if (u.subgradient)
    r += u.subgradient(x);
  res.stationarity = r.norm();
  return res;
}

SubproblemSolution solve(const ConvexSubproblem& sub, const SolveOptions& options,
                         const WarmStart& warm) {
  if (!(options.tolerance > 0.0)) throw InvalidConfig("subsolver: tolerance must be > 0");
  const Eigen::Index n = sub.anchor.size();
  const auto num_g = static_cast<Eigen::Index>(sub.inequality_surrogates.size());
  const auto num_h = static_cast<Eigen::Index>(sub.convex_constraints.size());

  SubproblemSolution sol;
  sol.x = warm.x ? *warm.x : sub.anchor;
  require_dimension(sol.x, n, "subsolver warm start");
  sol.lambda = warm.lambda && warm.lambda->size() == num_g ? *warm.lambda
                                                           : Vector::Zero(num_g);
  sol.nu = warm.nu && warm.nu->size() == num_h ? *warm.nu : Vector::Zero(num_h);

  Scalar penalty = options.initial_penalty;
  Scalar step = sub.modulus > 0.0 ? 1.0 / sub.modulus : 1.0;
  Scalar previous_violation = std::numeric_limits<Scalar>::infinity();
  int stalled_rounds = 0;

  SubproblemSolution best = sol;
  best.residuals = kkt_residuals(sub, sol.x, sol.lambda, sol.nu);

  // Inner solves are loose while the multipliers are far off and tighten with
  // the observed residuals; only the closing rounds pay for full accuracy.
  Scalar inner_tol = std::max(0.2 * options.tolerance, 1e-4);

  int budget = options.max_inner_iterations;
  for (int round = 1; round <= options.max_outer_rounds && budget > 0; ++round) {
    AugmentedLagrangian al{sub, sol.lambda, sol.nu, penalty};
    const int spent =
        minimize_inner(al, sub.regularizer, sol.x, step, inner_tol, budget);
    budget -= spent;
    sol.inner_iterations += spent;
    sol.outer_rounds = round;

    // First-order multiplier update; with it the AL gradient at sol.x equals
    // the Lagrangian stationarity residual of the original subproblem.
    for (Eigen::Index j = 0; j < num_g; ++j)
      sol.lambda[j] = std::max(
          0.0, sol.lambda[j] + penalty * sub.inequality_surrogates[j].fn.value(sol.x));
    for (Eigen::Index i = 0; i < num_h; ++i)
      sol.nu[i] =
          std::max(0.0, sol.nu[i] + penalty * sub.convex_constraints[i].value(sol.x));

    sol.residuals = kkt_residuals(sub, sol.x, sol.lambda, sol.nu);
    if (sol.residuals.worst() < best.residuals.worst()) best = sol;
    if (sol.residuals.worst() <= options.tolerance) {
      sol.converged = true;
      return sol;
    }

    // The multiplier iteration contracts at a rate proportional to the
    // penalty, so keep growing it until the residuals fall below tolerance.
    const Scalar violation = sol.residuals.primal_violation;
    penalty = std::min(penalty * options.penalty_growth, options.max_penalty);
    if (penalty >= options.max_penalty && violation > 1e-6 &&
        violation > 0.9 * previous_violation) {
      if (++stalled_rounds >= 3)
        throw SolverFailure("subsolver: subproblem appears infeasible (violation " +
                            std::to_string(violation) + " at the penalty cap)");
    } else {
      stalled_rounds = 0;
    }
    previous_violation = violation;
    inner_tol = std::max(0.2 * options.tolerance,
                         std::min(inner_tol, 0.05 * sol.residuals.worst()));
  }

  best.converged = false;
  best.inner_iterations = sol.inner_iterations;
  best.outer_rounds = sol.outer_rounds;
  return best;
}

}  // namespace costa
