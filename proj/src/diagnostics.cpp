#include "costa/diagnostics.hpp"

#include "costa/simplex.hpp"

#include <cmath>
#include <limits>

namespace costa {

MFCQParams estimate_rho(const StochasticProblem& problem, const Vector& x, Scalar omega,
                        Scalar box_cap) {
  require_dimension(x, problem.dimension, "estimate_rho");
  if (omega < 0.0) throw InvalidInput("estimate_rho: omega must be >= 0");
  if (!(box_cap > 0.0)) throw InvalidInput("estimate_rho: box cap must be > 0");

  MFCQParams params;
  params.activity_threshold = omega;

  std::vector<Vector> active_gradients;
  for (std::size_t j = 0; j < problem.nonconvex_constraints.size(); ++j) {
    if (problem.nonconvex_constraints[j].fn.value(x) >= -omega) {
      params.active_nonconvex.push_back(static_cast<int>(j));
      active_gradients.push_back(problem.nonconvex_constraints[j].fn.gradient(x));
    }
  }
  for (std::size_t i = 0; i < problem.convex_constraints.size(); ++i) {
    if (problem.in_equality_pair(static_cast<int>(i))) continue;
    if (problem.convex_constraints[i].value(x) >= -omega) {
      params.active_convex.push_back(static_cast<int>(i));
      active_gradients.push_back(problem.convex_constraints[i].gradient(x));
    }
  }
  // Equality pairs have no interior: the direction is confined to their
  // tangent subspace instead of carrying a descent margin.
  std::vector<Vector> tangent_rows;
  for (const auto& [lo, hi] : problem.equality_pairs) {
    (void)hi;
    tangent_rows.push_back(
        problem.convex_constraints[static_cast<std::size_t>(lo)].gradient(x));
  }

  if (active_gradients.empty()) {
    params.margin = std::numeric_limits<Scalar>::infinity();
    return params;
  }

  // Variables (d⁺, d⁻, ρ) ≥ 0 with d = d⁺ − d⁻:
  //   a_k'd + ρ ≤ 0 for each active gradient,
  //   e_m'd ≤ 0 and −e_m'd ≤ 0 for each equality tangent row,
  //   d⁺ ≤ cap, d⁻ ≤ cap.
  const Eigen::Index n = x.size();
  const auto k = static_cast<Eigen::Index>(active_gradients.size());
  const auto m = static_cast<Eigen::Index>(tangent_rows.size());
  Matrix A = Matrix::Zero(k + 2 * m + 2 * n, 2 * n + 1);
  Vector b = Vector::Zero(k + 2 * m + 2 * n);
  for (Eigen::Index row = 0; row < k; ++row) {
    A.block(row, 0, 1, n) = active_gradients[row].transpose();
    A.block(row, n, 1, n) = -active_gradients[row].transpose();
    A(row, 2 * n) = 1.0;
  }
  for (Eigen::Index row = 0; row < m; ++row) {
    A.block(k + 2 * row, 0, 1, n) = tangent_rows[row].transpose();
    A.block(k + 2 * row, n, 1, n) = -tangent_rows[row].transpose();
    A.block(k + 2 * row + 1, 0, 1, n) = -tangent_rows[row].transpose();
    A.block(k + 2 * row + 1, n, 1, n) = tangent_rows[row].transpose();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    A(k + 2 * m + i, i) = 1.0;
    b[k + 2 * m + i] = box_cap;
    A(k + 2 * m + n + i, n + i) = 1.0;
    b[k + 2 * m + n + i] = box_cap;
  }
  Vector c = Vector::Zero(2 * n + 1);
  c[2 * n] = 1.0;

  const LpResult lp = solve_lp(A, b, c);
  if (lp.status != LpResult::Status::kOptimal)
    throw SolverFailure("estimate_rho: LP solve did not reach optimality");

  params.margin = lp.x[2 * n];
  params.direction = lp.x.segment(0, n) - lp.x.segment(n, n);
  return params;
}

SlaterMarginReport slater_margin(const StochasticProblem& problem, const Vector& x_t,
                                 const std::vector<ConstraintSurrogate>& surrogates,
                                 const MFCQParams& mfcq, std::optional<Scalar> smoothness) {
  if (!smoothness) throw MetadataRequired("slater_margin: smoothness constant L is unknown");
  if (!std::isfinite(mfcq.margin))
    throw InvalidInput("slater_margin: needs a finite MFCQ margin");
  if (mfcq.direction.size() == 0 || mfcq.direction.norm() == 0.0)
    throw InvalidInput("slater_margin: needs a nonzero MFCQ direction");
  require_dimension(x_t, problem.dimension, "slater_margin");

  const Scalar L = *smoothness;
  const Scalar rho = mfcq.margin;
  const Vector direction = mfcq.direction / mfcq.direction.norm();

  SlaterMarginReport report;
  report.probe = x_t + (rho / L) * direction;
  report.threshold = -rho * rho / (2.0 * L);

  auto push = [&](std::string name, Scalar margin) {
    report.checks.checks.push_back(
        {std::move(name),
         margin <= report.threshold ? CheckStatus::kPass : CheckStatus::kFail, margin,
         report.threshold, ""});
  };
  for (std::size_t j = 0; j < surrogates.size(); ++j)
    push("gtilde[" + std::to_string(j) + "] margin at probe",
         surrogates[j].fn.value(report.probe));
  for (std::size_t i = 0; i < problem.convex_constraints.size(); ++i) {
    if (problem.in_equality_pair(static_cast<int>(i))) {
      report.checks.checks.push_back(
          {"h[" + std::to_string(i) + "] margin at probe", CheckStatus::kSkipped, 0.0,
           report.threshold, "equality pair: no strict interior"});
      continue;
    }
    push("h[" + std::to_string(i) + "] margin at probe",
         problem.convex_constraints[i].value(report.probe));
  }

  if (problem.meta.lipschitz) {
    const Scalar needed = (rho / L) * (*problem.meta.lipschitz + rho / 2.0);
    report.checks.checks.push_back(
        {"omega >= (rho/L)(G + rho/2)",
         mfcq.activity_threshold >= needed ? CheckStatus::kPass : CheckStatus::kFail,
         mfcq.activity_threshold, needed, ""});
  } else {
    report.checks.checks.push_back(
        {"omega >= (rho/L)(G + rho/2)", CheckStatus::kSkipped, 0.0, 0.0, "G unknown"});
  }
  return report;
}

Scalar dual_bound(Scalar surrogate_range, Scalar smoothness, Scalar margin) {
  if (std::isnan(surrogate_range) || std::isnan(smoothness) || std::isnan(margin))
    throw MetadataRequired("dual_bound: B_U, L, and rho must all be known");
  if (!(surrogate_range > 0.0) || !(smoothness > 0.0) || !(margin > 0.0) ||
      !std::isfinite(margin))
    throw InvalidInput("dual_bound: inputs must be positive and finite");
  return 2.0 * surrogate_range * smoothness / (margin * margin);
}

KKTReport kkt_report(const StochasticProblem& problem, const Vector& x,
                     const Vector& lambda, const Vector& nu, int mc_samples,
                     RngStream& rng) {
  require_dimension(x, problem.dimension, "kkt_report");
  if (lambda.size() != static_cast<Eigen::Index>(problem.nonconvex_constraints.size()) ||
      nu.size() != static_cast<Eigen::Index>(problem.convex_constraints.size()))
    throw InvalidInput("kkt_report: dual dimensions do not match the constraints");
  if ((lambda.array() < 0.0).any() || (nu.array() < 0.0).any())
    throw InvalidInput("kkt_report: duals must be nonnegative");

  KKTReport report;
  Vector grad_mean;
  if (problem.mean_gradient) {
    grad_mean = problem.mean_gradient(x);
    report.samples_used = 0;
  } else {
    if (mc_samples < 1)
      throw InvalidInput("kkt_report: Monte-Carlo samples required without a mean oracle");
    grad_mean = Vector::Zero(x.size());
    for (int k = 0; k < mc_samples; ++k) {
      const Sample xi = problem.draw_sample(rng);
      grad_mean += problem.objective_gradient(x, xi);
    }
    grad_mean /= mc_samples;
    report.samples_used = mc_samples;
  }

  Vector r = grad_mean;
  for (std::size_t j = 0; j < problem.nonconvex_constraints.size(); ++j) {
    const auto& fn = problem.nonconvex_constraints[j].fn;
    report.complementarity_g += lambda[j] * fn.value(x);
    if (lambda[j] != 0.0) r += lambda[j] * fn.gradient(x);
  }
  for (std::size_t i = 0; i < problem.convex_constraints.size(); ++i) {
    const auto& fn = problem.convex_constraints[i];
    report.complementarity_h += nu[i] * fn.value(x);
    if (nu[i] != 0.0) r += nu[i] * fn.gradient(x);
  }

  const auto& u = problem.regularizer;
  if (u.min_norm_subgradient)
    report.subgradient = u.min_norm_subgradient(x, r);
  else if (u.subgradient)
    report.subgradient = u.subgradient(x);
  else
    report.subgradient = Vector::Zero(x.size());

  report.stationarity = (r + report.subgradient).norm();
  report.feasibility = feasibility_violation(problem, x);
  return report;
}

Scalar spot_estimate_smoothness(const StochasticProblem& problem, const Vector& around,
                                int probes, RngStream& rng) {
  require_dimension(around, problem.dimension, "spot_estimate_smoothness");
  if (probes < 1) throw InvalidInput("spot_estimate_smoothness: need at least one probe");
  std::normal_distribution<Scalar> gauss(0.0, 1.0);
  const Scalar h = 1e-4;
  Scalar worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    const Sample xi = problem.draw_sample(rng);
    Vector direction(around.size());
    for (Eigen::Index i = 0; i < direction.size(); ++i) direction[i] = gauss(rng);
    direction.normalize();
    Vector base = around;
    for (Eigen::Index i = 0; i < base.size(); ++i) base[i] += 0.1 * gauss(rng);
    const Vector g0 = problem.objective_gradient(base, xi);
    const Vector g1 = problem.objective_gradient(base + h * direction, xi);
    worst = std::max(worst, (g1 - g0).norm() / h);
  }
  return worst;
}

}  // namespace costa
