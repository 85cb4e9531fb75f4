#include "costa/simplex.hpp"

#include <cmath>
#include <limits>

namespace costa {

LpResult solve_lp(const Matrix& A, const Vector& b, const Vector& c, int max_iterations) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != m || c.size() != n) throw InvalidInput("solve_lp: inconsistent shapes");
  if ((b.array() < 0.0).any())
    throw InvalidInput("solve_lp: requires b >= 0 (slack basis must be feasible)");
  if (max_iterations <= 0) max_iterations = static_cast<int>(50 * (m + n)) + 2000;

  constexpr Scalar eps = 1e-11;

  // Tableau: [A | I | b] with the (negated) objective in the last row.
  Matrix tab = Matrix::Zero(m + 1, n + m + 1);
  tab.block(0, 0, m, n) = A;
  tab.block(0, n, m, m) = Matrix::Identity(m, m);
  tab.block(0, n + m, m, 1) = b;
  tab.block(m, 0, 1, n) = -c.transpose();

  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

  LpResult result;
  for (result.iterations = 0; result.iterations < max_iterations; ++result.iterations) {
    // Bland: entering variable = smallest index with negative reduced cost.
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (tab(m, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      result.status = LpResult::Status::kOptimal;
      break;
    }

    // Ratio test; ties resolved by the smallest basis index (Bland).
    Eigen::Index leave = -1;
    Scalar best_ratio = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab(i, enter) > eps) {
        const Scalar ratio = tab(i, n + m) / tab(i, enter);
        if (ratio < best_ratio - eps ||
            (ratio < best_ratio + eps && (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      result.status = LpResult::Status::kUnbounded;
      return result;
    }

    tab.row(leave) /= tab(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const Scalar factor = tab(i, enter);
      if (factor != 0.0) tab.row(i) -= factor * tab.row(leave);
    }
    basis[leave] = enter;
  }

  result.x = Vector::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[i] < n) result.x[basis[i]] = tab(i, n + m);
  result.value = c.dot(result.x);
  return result;
}

}  // namespace costa
