#pragma once

#include "costa/problem.hpp"
#include "costa/surrogate.hpp"

namespace costa {

/// Convex program solved at every outer iteration:
///   minimize f̃(x) + u(x)  s.t.  g̃_j(x) ≤ 0,  h_i(x) ≤ 0,
/// where f̃ is μ-strongly convex and every constraint is convex. The anchor
/// is always feasible for the subproblem when it is feasible for the
/// original problem.
struct ConvexSubproblem {
  RunningSurrogate objective;
  Regularizer regularizer;
  std::vector<ConstraintSurrogate> inequality_surrogates;  // g̃_j
  std::vector<SmoothFunction> convex_constraints;          // h_i
  Vector anchor;
  Scalar modulus = 0.0;  // μ
};

struct KktResiduals {
  Scalar stationarity = 0.0;
  Scalar primal_violation = 0.0;
  Scalar complementarity = 0.0;

  Scalar worst() const {
    return std::max(stationarity, std::max(primal_violation, complementarity));
  }
};

struct SubproblemSolution {
  Vector x;
  Vector lambda;  // duals for g̃, nonnegative
  Vector nu;      // duals for h, nonnegative
  KktResiduals residuals;
  int inner_iterations = 0;
  int outer_rounds = 0;
  bool converged = false;
};

struct SolveOptions {
  Scalar tolerance = 1e-8;
  int max_inner_iterations = 50000;  // total proximal-gradient budget
  int max_outer_rounds = 80;
  Scalar initial_penalty = 10.0;
  Scalar penalty_growth = 10.0;
  Scalar max_penalty = 1e12;
};

struct WarmStart {
  const Vector* x = nullptr;
  const Vector* lambda = nullptr;
  const Vector* nu = nullptr;
};

/// Augmented-Lagrangian outer loop over (λ, ν) with a proximal-gradient
/// inner loop on x; the proximal step absorbs u (subgradient steps when u has
/// no prox oracle). On success all three residuals are at most the requested
/// tolerance. Exhausting the budget returns the best iterate flagged
/// unconverged; a subproblem that resists feasibility at the penalty cap is
/// treated as infeasible and raises SolverFailure.
SubproblemSolution solve(const ConvexSubproblem& sub, const SolveOptions& options = {},
                         const WarmStart& warm = {});

/// Recomputes the three residuals from the oracles alone, independent of any
/// solver internals. Idempotent.
KktResiduals kkt_residuals(const ConvexSubproblem& sub, const Vector& x,
                           const Vector& lambda, const Vector& nu);

}  // namespace costa
