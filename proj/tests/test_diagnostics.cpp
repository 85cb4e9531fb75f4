#include "costa/diagnostics.hpp"

#include "testing_oracles.hpp"

#include <doctest.h>

using namespace costa;
using namespace costa::testing;

namespace {

Vector vec2(Scalar a, Scalar b) {
  Vector v(2);
  v << a, b;
  return v;
}

NonconvexConstraint linear_g(const Vector& normal, Scalar offset) {
  NonconvexConstraint g;
  g.fn = affine_constraint(normal, offset);
  g.surrogate_at = [fn = g.fn](const Vector& anchor) {
    return ConstraintSurrogate{anchor, fn, ConvexityTag::kLinear};
  };
  return g;
}

StochasticProblem deterministic_problem(Eigen::Index n) {
  StochasticProblem p;
  p.dimension = n;
  p.draw_sample = [](RngStream&) { return Sample(0); };
  p.objective_value = [](const Vector& x, const Sample&) { return 0.5 * x.squaredNorm(); };
  p.objective_gradient = [](const Vector& x, const Sample&) { return x; };
  p.mean_value = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  p.mean_gradient = [](const Vector& x) { return x; };
  return p;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("estimate_rho: single near-active constraint") {
  StochasticProblem p = deterministic_problem(2);
  p.nonconvex_constraints.push_back(linear_g(vec2(1.0, 0.0), 0.0));  // g = x1

  const MFCQParams params = estimate_rho(p, Vector::Zero(2), 0.5);
  CHECK(params.margin == doctest::Approx(1.0));
  CHECK(params.direction[0] == doctest::Approx(-1.0));
  CHECK(params.active_nonconvex == std::vector<int>{0});
  // Re-substitution: the produced pair satisfies its own constraint.
  CHECK(p.nonconvex_constraints[0].fn.gradient(Vector::Zero(2)).dot(params.direction) <=
        -params.margin + 1e-9);
}

TEST_CASE("estimate_rho: opposing gradients leave no descent direction") {
  StochasticProblem p = deterministic_problem(2);
  p.nonconvex_constraints.push_back(linear_g(vec2(1.0, 0.0), 0.0));
  p.nonconvex_constraints.push_back(linear_g(vec2(-1.0, 0.0), 0.0));
  const MFCQParams params = estimate_rho(p, Vector::Zero(2), 0.5);
  CHECK(params.margin == doctest::Approx(0.0));
}

TEST_CASE("estimate_rho: no near-active constraints") {
  StochasticProblem p = deterministic_problem(2);
  p.nonconvex_constraints.push_back(linear_g(vec2(1.0, 0.0), 5.0));  // g = x1 - 5
  const MFCQParams params = estimate_rho(p, Vector::Zero(2), 0.5);
  CHECK(params.no_active_constraints());
}

TEST_CASE("estimate_rho: re-substitution holds on random active sets") {
  RngStream rng = substream(71, 0);
  std::normal_distribution<Scalar> gauss(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    StochasticProblem p = deterministic_problem(4);
    const int constraints = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < constraints; ++k) {
      Vector normal(4);
      for (Eigen::Index i = 0; i < 4; ++i) normal[i] = gauss(rng);
      p.nonconvex_constraints.push_back(linear_g(normal, 0.0));
    }
    const MFCQParams params = estimate_rho(p, Vector::Zero(4), 1.0);
    REQUIRE(std::isfinite(params.margin));
    CHECK(params.margin >= -1e-12);
    CHECK(params.direction.lpNorm<Eigen::Infinity>() <= 1.0 + 1e-9);
    for (const auto& g : p.nonconvex_constraints)
      CHECK(g.fn.gradient(Vector::Zero(4)).dot(params.direction) <=
            -params.margin + 1e-8);
  }
}

TEST_CASE("slater margin at the hand-worked probe") {
  StochasticProblem p = deterministic_problem(2);
  p.nonconvex_constraints.push_back(linear_g(vec2(1.0, 0.0), 0.0));  // g = x1
  p.meta.lipschitz = 1.0;

  const Vector x_t = vec2(-1.0, 0.0);
  MFCQParams mfcq;
  mfcq.activity_threshold = 1.5;
  mfcq.margin = 1.0;
  mfcq.direction = vec2(-1.0, 0.0);

  std::vector<ConstraintSurrogate> surrogates{
      p.nonconvex_constraints[0].surrogate_at(x_t)};

  const SlaterMarginReport report = slater_margin(p, x_t, surrogates, mfcq, 1.0);
  CHECK(report.probe[0] == doctest::Approx(-2.0));
  CHECK(report.threshold == doctest::Approx(-0.5));
  CHECK(report.checks.find("gtilde[0] margin at probe")->status == CheckStatus::kPass);
  CHECK(report.checks.find("gtilde[0] margin at probe")->observed == doctest::Approx(-2.0));
  // omega = 1.5 >= (rho/L)(G + rho/2) = 1.5 holds with equality.
  CHECK(report.checks.find("omega >= (rho/L)(G + rho/2)")->status == CheckStatus::kPass);

  SUBCASE("omega below the precondition is flagged") {
    mfcq.activity_threshold = 0.3;
    const SlaterMarginReport flagged = slater_margin(p, x_t, surrogates, mfcq, 1.0);
    CHECK(flagged.checks.find("omega >= (rho/L)(G + rho/2)")->status == CheckStatus::kFail);
  }

  SUBCASE("vanishing margin passes vacuously") {
    mfcq.margin = 1e-12;
    const SlaterMarginReport vacuous = slater_margin(p, x_t, surrogates, mfcq, 1.0);
    CHECK(vacuous.threshold == doctest::Approx(0.0));
    CHECK(vacuous.checks.find("gtilde[0] margin at probe")->status == CheckStatus::kPass);
  }

  SUBCASE("unknown smoothness raises metadata-required") {
    CHECK_THROWS_AS(slater_margin(p, x_t, surrogates, mfcq, std::nullopt),
                    MetadataRequired);
  }
}

TEST_CASE("dual bound formula and errors") {
  CHECK(dual_bound(1.0, 2.0, 1.0) == doctest::Approx(4.0));
  CHECK(dual_bound(1.0, 2.0, 2.0) == doctest::Approx(1.0));  // rho doubled: /4
  CHECK_THROWS_AS(dual_bound(std::nan(""), 2.0, 1.0), MetadataRequired);
  CHECK_THROWS_AS(dual_bound(1.0, -2.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(dual_bound(1.0, 2.0, std::numeric_limits<Scalar>::infinity()),
                  InvalidInput);
}

TEST_CASE("kkt report at an exact optimum and at interior points") {
  StochasticProblem p = deterministic_problem(2);
  RngStream rng = substream(73, 0);

  const KKTReport at_zero =
      kkt_report(p, Vector::Zero(2), Vector::Zero(0), Vector::Zero(0), 0, rng);
  CHECK(at_zero.stationarity == doctest::Approx(0.0));
  CHECK(at_zero.complementarity_g == 0.0);
  CHECK(at_zero.feasibility == 0.0);
  CHECK(at_zero.samples_used == 0);  // exact mean oracle

  const Vector interior = vec2(0.3, -0.4);
  const KKTReport away =
      kkt_report(p, interior, Vector::Zero(0), Vector::Zero(0), 0, rng);
  CHECK(away.stationarity == doctest::Approx(interior.norm()));

  CHECK_THROWS_AS(
      kkt_report(p, interior, Vector::Ones(1), Vector::Zero(0), 0, rng), InvalidInput);
}

TEST_CASE("kkt report on the exterior-ball optimum with its analytic dual") {
  // min ||x - (0.2, 0)||^2 s.t. 1 - ||x||^2 <= 0; optimum (1, 0), lambda = 0.8.
  StochasticProblem p;
  p.dimension = 2;
  const Vector target = vec2(0.2, 0.0);
  p.draw_sample = [](RngStream&) { return Sample(0); };
  p.objective_value = [target](const Vector& x, const Sample&) {
    return (x - target).squaredNorm();
  };
  p.objective_gradient = [target](const Vector& x, const Sample&) {
    return Vector(2.0 * (x - target));
  };
  p.mean_gradient = [target](const Vector& x) { return Vector(2.0 * (x - target)); };
  NonconvexConstraint g;
  g.fn.value = [](const Vector& x) { return 1.0 - x.squaredNorm(); };
  g.fn.gradient = [](const Vector& x) { return Vector(-2.0 * x); };
  g.surrogate_at = [](const Vector& anchor) {
    return ConstraintSurrogate{anchor, SmoothFunction{}, ConvexityTag::kLinear};
  };
  p.nonconvex_constraints.push_back(std::move(g));

  RngStream rng = substream(79, 0);
  Vector lambda(1);
  lambda << 0.8;
  const KKTReport report =
      kkt_report(p, vec2(1.0, 0.0), lambda, Vector::Zero(0), 0, rng);
  CHECK(report.stationarity <= 1e-12);
  CHECK(report.complementarity_g == doctest::Approx(0.0));
  CHECK(report.feasibility == doctest::Approx(0.0));

  CHECK_THROWS_AS(kkt_report(p, vec2(1.0, 0.0), Vector(-lambda), Vector::Zero(0), 0, rng),
                  InvalidInput);
}

TEST_CASE("monte-carlo gradient path is used without a mean oracle") {
  StochasticProblem p;
  p.dimension = 1;
  p.draw_sample = [](RngStream& rng) {
    std::normal_distribution<Scalar> gauss(0.0, 0.5);
    return Sample(gauss(rng));
  };
  p.objective_value = [](const Vector& x, const Sample& xi) {
    return 0.5 * x.squaredNorm() + std::any_cast<Scalar>(xi) * x[0];
  };
  p.objective_gradient = [](const Vector& x, const Sample& xi) {
    Vector g = x;
    g[0] += std::any_cast<Scalar>(xi);
    return g;
  };
  RngStream rng = substream(83, 0);
  const KKTReport report =
      kkt_report(p, Vector::Zero(1), Vector::Zero(0), Vector::Zero(0), 4096, rng);
  CHECK(report.samples_used == 4096);
  CHECK(report.stationarity <= 4.0 * 0.5 / std::sqrt(4096.0));

  CHECK_THROWS_AS(kkt_report(p, Vector::Zero(1), Vector::Zero(0), Vector::Zero(0), 0, rng),
                  InvalidInput);
}

TEST_CASE("a passing slater probe is strictly feasible for the subproblem") {
  // Cross-module consistency: the probe point certified by the margin report
  // satisfies the subproblem's constraints with the same margins.
  StochasticProblem p = deterministic_problem(2);
  p.nonconvex_constraints.push_back(linear_g(vec2(1.0, 0.0), 0.0));
  p.meta.lipschitz = 1.0;

  const Vector x_t = vec2(-0.2, 0.0);  // g(x_t) = -0.2, near-active
  // omega chosen to satisfy the (rho/L)(G + rho/2) precondition as well
  const MFCQParams mfcq = estimate_rho(p, x_t, 1.5);
  REQUIRE(std::isfinite(mfcq.margin));
  REQUIRE(mfcq.margin > 0.0);

  std::vector<ConstraintSurrogate> surrogates{p.nonconvex_constraints[0].surrogate_at(x_t)};
  const SlaterMarginReport report = slater_margin(p, x_t, surrogates, mfcq, 1.0);
  REQUIRE(report.checks.passed());

  ConvexSubproblem sub;
  sub.objective = testing::as_objective(2, testing::quadratic_objective(x_t, 1.0), 1.0);
  sub.regularizer = Regularizer::zero();
  sub.anchor = x_t;
  sub.modulus = 1.0;
  sub.inequality_surrogates = surrogates;
  for (const auto& s : sub.inequality_surrogates)
    CHECK(s.fn.value(report.probe) <= report.threshold + 1e-12);
}

TEST_CASE("kkt report matches subsolver residuals when the surrogate is exact") {
  // Convex constraint used through the surrogate slot with the identity
  // surrogate: the subproblem's KKT point is a KKT point of the original
  // problem, so the report and the residuals agree within solver accuracy.
  StochasticProblem p;
  p.dimension = 2;
  const Vector target = vec2(2.0, 0.0);
  p.draw_sample = [](RngStream&) { return Sample(0); };
  p.objective_value = [target](const Vector& x, const Sample&) {
    return (x - target).squaredNorm();
  };
  p.objective_gradient = [target](const Vector& x, const Sample&) {
    return Vector(2.0 * (x - target));
  };
  p.mean_gradient = [target](const Vector& x) { return Vector(2.0 * (x - target)); };
  SmoothFunction ball{[](const Vector& x) { return x.squaredNorm() - 1.0; },
                      [](const Vector& x) { return Vector(2.0 * x); }};
  NonconvexConstraint g;
  g.fn = ball;
  g.surrogate_at = [ball](const Vector& anchor) {
    return ConstraintSurrogate{anchor, ball, ConvexityTag::kConvexComposite};
  };
  p.nonconvex_constraints.push_back(std::move(g));

  ConvexSubproblem sub;
  // The running surrogate of the objective itself (deterministic, exact).
  sub.objective = testing::as_objective(
      2,
      SmoothFunction{[&p](const Vector& x) { return p.objective_value(x, Sample(0)); },
                     [&p](const Vector& x) { return p.objective_gradient(x, Sample(0)); }},
      2.0);
  sub.regularizer = Regularizer::zero();
  sub.anchor = Vector::Zero(2);
  sub.modulus = 2.0;
  sub.inequality_surrogates.push_back(p.nonconvex_constraints[0].surrogate_at(sub.anchor));

  const SubproblemSolution sol = solve(sub);
  REQUIRE(sol.converged);

  RngStream rng = substream(41, 0);
  const KKTReport report = kkt_report(p, sol.x, sol.lambda, Vector::Zero(0), 0, rng);
  CHECK(report.stationarity <= 2.0 * 1e-8 + sol.residuals.stationarity);
  CHECK(std::abs(report.complementarity_g) <= 2.0 * 1e-8);
  CHECK(report.feasibility <= 2.0 * 1e-8);
}

TEST_CASE("spot smoothness estimate brackets a known constant") {
  StochasticProblem p = deterministic_problem(3);  // Hessian = I
  RngStream rng = substream(89, 0);
  const Scalar estimate = spot_estimate_smoothness(p, Vector::Zero(3), 16, rng);
  CHECK(estimate == doctest::Approx(1.0).epsilon(1e-3));
}

}  // TEST_SUITE
