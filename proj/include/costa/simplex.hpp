#pragma once

#include "costa/types.hpp"

namespace costa {

/// Dense primal simplex for small linear programs in the form
///   maximize c'x   s.t.   A x ≤ b,  x ≥ 0,   with b ≥ 0,
/// so the slack basis is a valid start. Bland's rule guards against cycling
/// on the degenerate programs the constraint-qualification estimator
/// produces. Intended for a few hundred variables at most.
struct LpResult {
  enum class Status { kOptimal, kUnbounded, kIterationLimit };
  Status status = Status::kIterationLimit;
  Vector x;
  Scalar value = 0.0;
  int iterations = 0;
};

LpResult solve_lp(const Matrix& A, const Vector& b, const Vector& c,
                  int max_iterations = 0 /* 0 = automatic */);

}  // namespace costa
