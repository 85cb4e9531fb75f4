#include "costa/problem.hpp"

#include "testing_oracles.hpp"

#include <doctest.h>

#include <memory>

using namespace costa;

namespace {

StochasticProblem ball_exterior_problem() {
  StochasticProblem p;
  p.dimension = 2;
  p.draw_sample = [](RngStream&) { return Sample(0); };
  p.objective_value = [](const Vector& x, const Sample&) { return x.squaredNorm(); };
  p.objective_gradient = [](const Vector& x, const Sample&) { return Vector(2.0 * x); };
  NonconvexConstraint g;
  g.fn.value = [](const Vector& x) { return x.squaredNorm() - 1.0; };
  g.fn.gradient = [](const Vector& x) { return Vector(2.0 * x); };
  g.surrogate_at = [](const Vector& anchor) {
    return ConstraintSurrogate{anchor, SmoothFunction{}, ConvexityTag::kLinear};
  };
  p.nonconvex_constraints.push_back(std::move(g));
  return p;
}

}  // namespace

TEST_SUITE("problem") {

TEST_CASE("feasibility violation of the quadratic constraint") {
  StochasticProblem p = ball_exterior_problem();
  Vector interior(2);
  interior << 0.0, 0.0;
  CHECK(feasibility_violation(p, interior) == doctest::Approx(0.0));

  Vector outside(2);
  outside << 2.0, 0.0;
  // g(2,0) = 4 - 1
  CHECK(feasibility_violation(p, outside) == doctest::Approx(3.0));
}

TEST_CASE("feasibility with no constraints is zero") {
  StochasticProblem p = ball_exterior_problem();
  p.nonconvex_constraints.clear();
  Vector x(2);
  x << 42.0, -17.0;
  CHECK(feasibility_violation(p, x) == 0.0);
}

TEST_CASE("feasibility rejects dimension mismatches") {
  StochasticProblem p = ball_exterior_problem();
  Vector bad(3);
  bad.setZero();
  CHECK_THROWS_AS(feasibility_violation(p, bad), InvalidInput);
}

TEST_CASE("objective estimate is exact for deterministic problems") {
  StochasticProblem p = ball_exterior_problem();
  Vector x(2);
  x << 1.5, -0.5;
  RngStream rng = substream(3, 0);
  for (int m : {1, 7}) CHECK(estimate_expected_objective(p, x, m, rng) ==
                             doctest::Approx(x.squaredNorm()));
}

TEST_CASE("objective estimate covers both atoms of a two-point sample space") {
  // f(x, xi) = (x - xi)^2 with xi alternating over {0, 2}; at x = 1 the
  // enumerated mean is ((1-0)^2 + (1-2)^2)/2 = 1, plus u(1).
  auto counter = std::make_shared<int>(0);
  StochasticProblem p;
  p.dimension = 1;
  p.draw_sample = [counter](RngStream&) { return Sample(((*counter)++ % 2) * 2.0); };
  p.objective_value = [](const Vector& x, const Sample& xi) {
    const Scalar atom = std::any_cast<Scalar>(xi);
    return (x[0] - atom) * (x[0] - atom);
  };
  p.regularizer = Regularizer::l1(0.5);

  Vector x(1);
  x << 1.0;
  RngStream rng = substream(5, 0);
  CHECK(estimate_expected_objective(p, x, 10, rng) == doctest::Approx(1.0 + 0.5));
}

TEST_CASE("objective estimate of a zero-mean linear term vanishes in the limit") {
  StochasticProblem p;
  p.dimension = 1;
  p.draw_sample = [](RngStream& rng) {
    std::normal_distribution<Scalar> gauss(0.0, 1.0);
    return Sample(gauss(rng));
  };
  p.objective_value = [](const Vector& x, const Sample& xi) {
    return std::any_cast<Scalar>(xi) * x[0];
  };
  Vector x(1);
  x << 3.0;
  RngStream rng = substream(7, 0);
  const int m = 40000;
  const Scalar estimate = estimate_expected_objective(p, x, m, rng);
  CHECK(std::abs(estimate) < 4.0 * 3.0 / std::sqrt(static_cast<Scalar>(m)));
}

TEST_CASE("objective estimate is bit-reproducible for a fixed stream") {
  StochasticProblem p;
  p.dimension = 1;
  p.draw_sample = [](RngStream& rng) {
    std::normal_distribution<Scalar> gauss(0.0, 1.0);
    return Sample(gauss(rng));
  };
  p.objective_value = [](const Vector& x, const Sample& xi) {
    return std::any_cast<Scalar>(xi) + x[0];
  };
  Vector x(1);
  x << 0.25;
  RngStream a = substream(11, 2);
  RngStream b = substream(11, 2);
  CHECK(estimate_expected_objective(p, x, 100, a) ==
        estimate_expected_objective(p, x, 100, b));
}

TEST_CASE("objective estimate needs at least one sample") {
  StochasticProblem p = ball_exterior_problem();
  Vector x = Vector::Zero(2);
  RngStream rng = substream(1, 0);
  CHECK_THROWS_AS(estimate_expected_objective(p, x, 0, rng), InvalidInput);
}

TEST_CASE("metadata validation and the metadata-required error") {
  SmoothnessMeta meta;
  meta.validate();  // everything unknown is fine
  meta.smoothness = 2.0;
  meta.validate();
  CHECK(meta.require(meta.smoothness, "L") == 2.0);
  CHECK_THROWS_AS(meta.require(meta.lipschitz, "G"), MetadataRequired);

  meta.strong_convexity = -1.0;
  CHECK_THROWS_AS(meta.validate(), InvalidConfig);
}

TEST_CASE("l1 regularizer oracles") {
  const Regularizer u = Regularizer::l1(0.5);
  Vector x(3);
  x << 2.0, -1.0, 0.0;
  CHECK(u.value(x) == doctest::Approx(1.5));

  const Vector sub = u.subgradient(x);
  CHECK(sub[0] == 0.5);
  CHECK(sub[1] == -0.5);
  CHECK(sub[2] == 0.0);

  const Vector prox = u.prox(x, 1.0);
  CHECK(prox[0] == doctest::Approx(1.5));
  CHECK(prox[1] == doctest::Approx(-0.5));
  CHECK(prox[2] == 0.0);

  // Min-norm completion clamps the residual on zero coordinates.
  Vector r(3);
  r << 1.0, 1.0, -0.2;
  const Vector v = u.min_norm_subgradient(x, r);
  CHECK(v[0] == 0.5);
  CHECK(v[1] == -0.5);
  CHECK(v[2] == doctest::Approx(0.2));

  CHECK_THROWS_AS(Regularizer::l1(0.0), InvalidConfig);
}

}  // TEST_SUITE
