#include "costa/problems/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace costa::problems {

namespace {

constexpr Scalar kTruncationSigmas = 3.0;

Eigen::Index block_index(const Environment& env, int agent, int tau) {
  return 2 * (static_cast<Eigen::Index>(agent) * env.horizon + (tau - 1));
}

Eigen::Vector2d noisy_currents(const Eigen::Vector2d& p, Scalar omega,
                               const Eigen::Vector2d& noise) {
  return currents(p, omega).cwiseProduct(Eigen::Vector2d::Ones() + noise);
}

struct SegmentRef {
  int agent;
  int tau;  // segment from waypoint tau to tau+1, tau in [0, T-1]
};

}  // namespace

void Environment::validate() const {
  if (agents < 1) throw InvalidConfig("environment: need at least one agent");
  if (horizon < 1) throw InvalidConfig("environment: need at least one waypoint");
  if (!(dt > 0.0)) throw InvalidConfig("environment: dt must be > 0");
  if (start.size() != static_cast<std::size_t>(agents) ||
      goal.size() != static_cast<std::size_t>(agents) ||
      speed_cap.size() != static_cast<std::size_t>(agents))
    throw InvalidConfig("environment: starts, goals, and speed caps must cover all agents");
  if (obstacle_radius < 0.0 || agent_radius < 0.0)
    throw InvalidConfig("environment: radii must be >= 0");
  if (noise_std < 0.0 || current_scale < 0.0)
    throw InvalidConfig("environment: noise and current scales must be >= 0");
  for (int i = 0; i < agents; ++i) {
    if (!(tightened_cap(i) > 0.0))
      throw InvalidConfig("environment: speed cap must exceed the noise support bound");
    if (obstacle_radius > 0.0) {
      const Scalar clearance = obstacle_radius + agent_radius;
      if ((start[i] - obstacle_center).norm() <= clearance ||
          (goal[i] - obstacle_center).norm() <= clearance)
        throw InvalidConfig("environment: starts and goals must lie outside the obstacle");
    }
  }
}

Scalar Environment::tightened_cap(int agent) const {
  return speed_cap[static_cast<std::size_t>(agent)] - support_bound();
}

Eigen::Vector2d currents(const Eigen::Vector2d& p, Scalar omega) {
  const Scalar envelope = std::exp(-p.squaredNorm());
  return omega * envelope * Eigen::Vector2d(1.0 - 2.0 * p.x() * p.x(),
                                            -2.0 * p.x() * p.y());
}

Eigen::Matrix2d currents_jacobian(const Eigen::Vector2d& p, Scalar omega) {
  const Scalar envelope = std::exp(-p.squaredNorm());
  Eigen::Matrix2d poly;
  poly << -4.0 * p.x(), 0.0, -2.0 * p.y(), -2.0 * p.x();
  const Eigen::Vector2d v(1.0 - 2.0 * p.x() * p.x(), -2.0 * p.x() * p.y());
  return omega * envelope * (poly - 2.0 * v * p.transpose());
}

Eigen::Vector2d draw_current_noise(Scalar sigma, RngStream& rng) {
  if (sigma < 0.0) throw InvalidInput("draw_current_noise: sigma must be >= 0");
  if (sigma == 0.0) return Eigen::Vector2d::Zero();
  std::normal_distribution<Scalar> gauss(0.0, sigma);
  Eigen::Vector2d e;
  for (int k = 0; k < 2; ++k) {
    Scalar draw = gauss(rng);
    while (std::abs(draw) > kTruncationSigmas * sigma) draw = gauss(rng);
    e[k] = draw;
  }
  return e;
}

Eigen::Vector2d ensemble_sample(const Eigen::Vector2d& p, Scalar omega, Scalar sigma,
                                RngStream& rng) {
  return noisy_currents(p, omega, draw_current_noise(sigma, rng));
}

Scalar truncated_noise_variance(Scalar sigma) {
  if (sigma == 0.0) return 0.0;
  const Scalar a = kTruncationSigmas;
  const Scalar phi = std::exp(-0.5 * a * a) / std::sqrt(2.0 * M_PI);
  const Scalar mass = std::erf(a / std::sqrt(2.0));  // 2Φ(a) − 1
  return sigma * sigma * (1.0 - 2.0 * a * phi / mass);
}

Scalar field_curvature_bound(Scalar omega) {
  // Directional finite-difference scan of the Jacobian over the region where
  // the Gaussian envelope is non-negligible, padded with a safety margin.
  // The field is linear in ω, so the scan runs once at unit scale.
  static const Scalar unit_scale_worst = [] {
    constexpr Scalar h = 1e-4;
    Scalar worst = 0.0;
    for (Scalar x = -4.0; x <= 4.0; x += 0.1) {
      for (Scalar y = -4.0; y <= 4.0; y += 0.1) {
        const Eigen::Vector2d p(x, y);
        const Eigen::Matrix2d j0 = currents_jacobian(p, 1.0);
        for (int k = 0; k < 8; ++k) {
          const Scalar angle = M_PI * k / 8.0;
          const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
          const Eigen::Matrix2d j1 = currents_jacobian(p + h * dir, 1.0);
          worst = std::max(worst, ((j1 - j0) * dir).norm() / h);
        }
      }
    }
    return worst;
  }();
  return 1.3 * omega * unit_scale_worst;
}

Eigen::Vector2d waypoint(const Environment& env, const Vector& x, int agent, int tau) {
  if (tau == 0) return env.start[static_cast<std::size_t>(agent)];
  return x.segment<2>(block_index(env, agent, tau));
}

StochasticProblem build_trajectory_problem(const Environment& env) {
  env.validate();

  StochasticProblem problem;
  problem.dimension = env.dimension();
  problem.regularizer = Regularizer::zero();

  const Scalar omega = env.current_scale;
  const Scalar sigma = env.noise_std;
  const Scalar dt = env.dt;
  const Scalar noise_var = truncated_noise_variance(sigma);

  problem.draw_sample = [sigma](RngStream& rng) {
    return Sample(draw_current_noise(sigma, rng));
  };

  problem.objective_value = [env, omega, dt](const Vector& x, const Sample& xi) {
    const auto noise = std::any_cast<Eigen::Vector2d>(xi);
    Scalar acc = 0.0;
    for (int i = 0; i < env.agents; ++i) {
      for (int tau = 0; tau < env.horizon; ++tau) {
        const Eigen::Vector2d p0 = waypoint(env, x, i, tau);
        const Eigen::Vector2d p1 = waypoint(env, x, i, tau + 1);
        acc += (p1 - p0 - dt * noisy_currents(p0, omega, noise)).squaredNorm();
      }
    }
    return acc;
  };

  problem.objective_gradient = [env, omega, dt](const Vector& x, const Sample& xi) {
    const auto noise = std::any_cast<Eigen::Vector2d>(xi);
    Vector grad = Vector::Zero(x.size());
    for (int i = 0; i < env.agents; ++i) {
      for (int tau = 0; tau < env.horizon; ++tau) {
        const Eigen::Vector2d p0 = waypoint(env, x, i, tau);
        const Eigen::Vector2d p1 = waypoint(env, x, i, tau + 1);
        const Eigen::Vector2d u = p1 - p0 - dt * noisy_currents(p0, omega, noise);
        grad.segment<2>(block_index(env, i, tau + 1)) += 2.0 * u;
        if (tau >= 1) {
          const Eigen::Matrix2d jac =
              (Eigen::Vector2d::Ones() + noise).asDiagonal() *
              currents_jacobian(p0, omega);
          grad.segment<2>(block_index(env, i, tau)) -=
              2.0 * u + 2.0 * dt * jac.transpose() * u;
        }
      }
    }
    return grad;
  };

  // E over the multiplicative noise: ‖u₀‖² picks up dt²·Var(e)·‖ϑ‖² per
  // segment, with u₀ the noise-free control residual.
  problem.mean_value = [env, omega, dt, noise_var](const Vector& x) {
    Scalar acc = 0.0;
    for (int i = 0; i < env.agents; ++i) {
      for (int tau = 0; tau < env.horizon; ++tau) {
        const Eigen::Vector2d p0 = waypoint(env, x, i, tau);
        const Eigen::Vector2d p1 = waypoint(env, x, i, tau + 1);
        const Eigen::Vector2d drift = currents(p0, omega);
        acc += (p1 - p0 - dt * drift).squaredNorm() +
               dt * dt * noise_var * drift.squaredNorm();
      }
    }
    return acc;
  };
  problem.mean_gradient = [env, omega, dt, noise_var](const Vector& x) {
    Vector grad = Vector::Zero(x.size());
    for (int i = 0; i < env.agents; ++i) {
      for (int tau = 0; tau < env.horizon; ++tau) {
        const Eigen::Vector2d p0 = waypoint(env, x, i, tau);
        const Eigen::Vector2d p1 = waypoint(env, x, i, tau + 1);
        const Eigen::Vector2d drift = currents(p0, omega);
        const Eigen::Vector2d u = p1 - p0 - dt * drift;
        grad.segment<2>(block_index(env, i, tau + 1)) += 2.0 * u;
        if (tau >= 1) {
          const Eigen::Matrix2d jac = currents_jacobian(p0, omega);
          grad.segment<2>(block_index(env, i, tau)) -=
              2.0 * u + 2.0 * dt * jac.transpose() * u;
          grad.segment<2>(block_index(env, i, tau)) +=
              2.0 * dt * dt * noise_var * jac.transpose() * drift;
        }
      }
    }
    return grad;
  };

  // Terminal conditions x_i(T) = goal_i as affine inequality pairs in h.
  for (int i = 0; i < env.agents; ++i) {
    for (int coord = 0; coord < 2; ++coord) {
      const Eigen::Index idx = block_index(env, i, env.horizon) + coord;
      const Scalar target = env.goal[static_cast<std::size_t>(i)][coord];
      const int first = static_cast<int>(problem.convex_constraints.size());
      for (const Scalar sign : {1.0, -1.0}) {
        SmoothFunction fn;
        fn.value = [idx, target, sign](const Vector& x) { return sign * (x[idx] - target); };
        fn.gradient = [idx, sign](const Vector& x) {
          Vector g = Vector::Zero(x.size());
          g[idx] = sign;
          return g;
        };
        problem.convex_constraints.push_back(std::move(fn));
      }
      problem.equality_pairs.emplace_back(first, first + 1);
    }
  }

  // Obstacle avoidance: (r° + r) − ‖x_i(τ) − x°‖ ≤ 0, linearized from above
  // through the concavity of −‖·‖.
  if (env.obstacle_radius > 0.0) {
    const Scalar clearance = env.obstacle_radius + env.agent_radius;
    const Eigen::Vector2d center = env.obstacle_center;
    for (int i = 0; i < env.agents; ++i) {
      for (int tau = 1; tau <= env.horizon; ++tau) {
        const Eigen::Index idx = block_index(env, i, tau);
        NonconvexConstraint g;
        g.fn.value = [idx, center, clearance](const Vector& x) {
          return clearance - (x.segment<2>(idx) - center).norm();
        };
        g.fn.gradient = [idx, center](const Vector& x) {
          Vector grad = Vector::Zero(x.size());
          const Eigen::Vector2d d = x.segment<2>(idx) - center;
          const Scalar norm = d.norm();
          if (norm > 0.0) grad.segment<2>(idx) = -d / norm;
          return grad;
        };
        g.surrogate_at = [idx, center, clearance](const Vector& anchor) {
          const Eigen::Vector2d d = anchor.segment<2>(idx) - center;
          const Scalar norm = d.norm();
          if (norm < 1e-12)
            throw InvalidInput(
                "obstacle surrogate undefined: anchor waypoint coincides with the center");
          const Eigen::Vector2d unit = d / norm;
          ConstraintSurrogate s;
          s.anchor = anchor;
          s.tag = ConvexityTag::kLinear;
          const Scalar offset = clearance - norm + unit.dot(d);
          s.fn.value = [idx, center, unit, offset](const Vector& x) {
            return offset - unit.dot(x.segment<2>(idx) - center);
          };
          s.fn.gradient = [idx, unit](const Vector& x) {
            Vector grad = Vector::Zero(x.size());
            grad.segment<2>(idx) = -unit;
            return grad;
          };
          return s;
        };
        problem.nonconvex_constraints.push_back(std::move(g));
      }
    }
  }

  // Pairwise separation: 2r − ‖x_i(τ) − x_j(τ)‖ ≤ 0.
  if (env.agent_radius > 0.0 && env.agents >= 2) {
    const Scalar separation = 2.0 * env.agent_radius;
    for (int i = 0; i < env.agents; ++i) {
      for (int j = i + 1; j < env.agents; ++j) {
        for (int tau = 1; tau <= env.horizon; ++tau) {
          const Eigen::Index a = block_index(env, i, tau);
          const Eigen::Index b = block_index(env, j, tau);
          NonconvexConstraint g;
          g.fn.value = [a, b, separation](const Vector& x) {
            return separation - (x.segment<2>(a) - x.segment<2>(b)).norm();
          };
          g.fn.gradient = [a, b](const Vector& x) {
            Vector grad = Vector::Zero(x.size());
            const Eigen::Vector2d d = x.segment<2>(a) - x.segment<2>(b);
            const Scalar norm = d.norm();
            if (norm > 0.0) {
              grad.segment<2>(a) = -d / norm;
              grad.segment<2>(b) = d / norm;
            }
            return grad;
          };
          g.surrogate_at = [a, b, separation](const Vector& anchor) {
            const Eigen::Vector2d d = anchor.segment<2>(a) - anchor.segment<2>(b);
            const Scalar norm = d.norm();
            if (norm < 1e-12)
              throw InvalidInput(
                  "separation surrogate undefined: anchor waypoints coincide");
            const Eigen::Vector2d unit = d / norm;
            ConstraintSurrogate s;
            s.anchor = anchor;
            s.tag = ConvexityTag::kLinear;
            const Scalar offset = separation - norm + unit.dot(d);
            s.fn.value = [a, b, unit, offset](const Vector& x) {
              return offset - unit.dot(x.segment<2>(a) - x.segment<2>(b));
            };
            s.fn.gradient = [a, b, unit](const Vector& x) {
              Vector grad = Vector::Zero(x.size());
              grad.segment<2>(a) = -unit;
              grad.segment<2>(b) = unit;
              return grad;
            };
            return s;
          };
          problem.nonconvex_constraints.push_back(std::move(g));
        }
      }
    }
  }

  // Tightened speed caps on the mean-current residual, with the norm
  // smoothed the same way the sparsity penalty smooths |x|:
  //   sqrt(‖x_i(τ+1) − x_i(τ) − ϑ(x_i(τ))Δt‖² + ε²) ≤ (vᵢ − Δϑ^max)Δt,
  // ε = ε_frac·budget. The smoothed form implies the plain cap, keeps the
  // constraint C^∞ (no kink at zero control residual, bounded third
  // derivatives for the finite-difference validators), and costs a few
  // percent of budget. For τ ≥ 1 the surrogate linearizes ϑ inside the norm
  // and adds the curvature slack (C/2)Δt‖x_i(τ) − y_i(τ)‖²; the smoothed
  // norm is 1-Lipschitz in its argument, so the slack majorizes exactly and
  // the tangent matches.
  const Scalar curvature = field_curvature_bound(omega);
  constexpr Scalar kCapSmoothingFraction = 0.35;
  const auto smooth_norm = [](const Eigen::Vector2d& u, Scalar eps) {
    return std::sqrt(u.squaredNorm() + eps * eps);
  };
  for (int i = 0; i < env.agents; ++i) {
    const Scalar budget = env.tightened_cap(i) * dt;
    const Scalar eps = kCapSmoothingFraction * budget;
    for (int tau = 0; tau < env.horizon; ++tau) {
      NonconvexConstraint g;
      if (tau == 0) {
        const Eigen::Vector2d p0 = env.start[static_cast<std::size_t>(i)];
        const Eigen::Vector2d drift = dt * currents(p0, omega);
        const Eigen::Index idx1 = block_index(env, i, 1);
        g.fn.value = [idx1, p0, drift, budget, eps, smooth_norm](const Vector& x) {
          return smooth_norm(x.segment<2>(idx1) - p0 - drift, eps) - budget;
        };
        g.fn.gradient = [idx1, p0, drift, eps, smooth_norm](const Vector& x) {
          Vector grad = Vector::Zero(x.size());
          const Eigen::Vector2d u = x.segment<2>(idx1) - p0 - drift;
          grad.segment<2>(idx1) = u / smooth_norm(u, eps);
          return grad;
        };
        // Already convex (the current term is a constant): its own surrogate.
        SmoothFunction fn = g.fn;
        g.surrogate_at = [fn](const Vector& anchor) {
          return ConstraintSurrogate{anchor, fn, ConvexityTag::kConvexComposite};
        };
      } else {
        const Eigen::Index idx0 = block_index(env, i, tau);
        const Eigen::Index idx1 = block_index(env, i, tau + 1);
        g.fn.value = [idx0, idx1, omega, dt, budget, eps, smooth_norm](const Vector& x) {
          const Eigen::Vector2d p0 = x.segment<2>(idx0);
          const Eigen::Vector2d u = x.segment<2>(idx1) - p0 - dt * currents(p0, omega);
          return smooth_norm(u, eps) - budget;
        };
        g.fn.gradient = [idx0, idx1, omega, dt, eps, smooth_norm](const Vector& x) {
          Vector grad = Vector::Zero(x.size());
          const Eigen::Vector2d p0 = x.segment<2>(idx0);
          const Eigen::Vector2d u = x.segment<2>(idx1) - p0 - dt * currents(p0, omega);
          const Eigen::Vector2d w = u / smooth_norm(u, eps);
          grad.segment<2>(idx1) = w;
          grad.segment<2>(idx0) = -w - dt * currents_jacobian(p0, omega).transpose() * w;
          return grad;
        };
        g.surrogate_at = [idx0, idx1, omega, dt, budget, eps, curvature,
                          smooth_norm](const Vector& anchor) {
          const Eigen::Vector2d y0 = anchor.segment<2>(idx0);
          const Eigen::Vector2d drift = currents(y0, omega);
          const Eigen::Matrix2d jac = currents_jacobian(y0, omega);
          ConstraintSurrogate s;
          s.anchor = anchor;
          s.tag = ConvexityTag::kConvexComposite;
          s.fn.value = [idx0, idx1, y0, drift, jac, dt, budget, eps, curvature,
                        smooth_norm](const Vector& x) {
            const Eigen::Vector2d p0 = x.segment<2>(idx0);
            const Eigen::Vector2d lin = drift + jac * (p0 - y0);
            return smooth_norm(x.segment<2>(idx1) - p0 - dt * lin, eps) +
                   0.5 * curvature * dt * (p0 - y0).squaredNorm() - budget;
          };
          s.fn.gradient = [idx0, idx1, y0, drift, jac, dt, eps, curvature,
                           smooth_norm](const Vector& x) {
            Vector grad = Vector::Zero(x.size());
            const Eigen::Vector2d p0 = x.segment<2>(idx0);
            const Eigen::Vector2d u =
                x.segment<2>(idx1) - p0 - dt * (drift + jac * (p0 - y0));
            const Eigen::Vector2d w = u / smooth_norm(u, eps);
            grad.segment<2>(idx1) = w;
            grad.segment<2>(idx0) =
                -w - dt * jac.transpose() * w + curvature * dt * (p0 - y0);
            return grad;
          };
          return s;
        };
      }
      problem.nonconvex_constraints.push_back(std::move(g));
    }
  }

  return problem;
}

Vector straight_line_trajectory(const Environment& env) {
  Vector x(env.dimension());
  for (int i = 0; i < env.agents; ++i) {
    const Eigen::Vector2d s = env.start[static_cast<std::size_t>(i)];
    const Eigen::Vector2d g = env.goal[static_cast<std::size_t>(i)];
    for (int tau = 1; tau <= env.horizon; ++tau) {
      const Scalar frac = static_cast<Scalar>(tau) / env.horizon;
      x.segment<2>(block_index(env, i, tau)) = s + frac * (g - s);
    }
  }
  return x;
}

Vector initial_trajectory(const Environment& env) {
  env.validate();
  const Scalar detour_radius = env.obstacle_radius + env.agent_radius + 0.15;

  Vector x(env.dimension());
  for (int i = 0; i < env.agents; ++i) {
    const Eigen::Vector2d s = env.start[static_cast<std::size_t>(i)];
    const Eigen::Vector2d g = env.goal[static_cast<std::size_t>(i)];

    // Densely sample the straight segment, push samples out of the inflated
    // obstacle radially, then resample T+1 waypoints by arclength.
    constexpr int kDense = 512;
    std::vector<Eigen::Vector2d> path(kDense + 1);
    const Eigen::Vector2d chord = g - s;
    Eigen::Vector2d perp(-chord.y(), chord.x());
    if (perp.norm() > 0.0) perp.normalize();
    const Scalar side = i % 2 == 0 ? 1.0 : -1.0;
    for (int k = 0; k <= kDense; ++k) {
      Eigen::Vector2d p = s + (static_cast<Scalar>(k) / kDense) * chord;
      if (env.obstacle_radius > 0.0) {
        Eigen::Vector2d d = p - env.obstacle_center;
        if (d.norm() < 1e-9) d = side * perp;
        if (d.norm() < detour_radius)
          p = env.obstacle_center + (detour_radius / d.norm()) * d;
      }
      path[static_cast<std::size_t>(k)] = p;
    }

    std::vector<Scalar> arclength(path.size(), 0.0);
    for (std::size_t k = 1; k < path.size(); ++k)
      arclength[k] = arclength[k - 1] + (path[k] - path[k - 1]).norm();
    const Scalar total = arclength.back();

    std::size_t cursor = 0;
    for (int tau = 1; tau <= env.horizon; ++tau) {
      const Scalar target = total * static_cast<Scalar>(tau) / env.horizon;
      while (cursor + 1 < path.size() && arclength[cursor + 1] < target) ++cursor;
      Eigen::Vector2d p;
      if (cursor + 1 >= path.size()) {
        p = path.back();
      } else {
        const Scalar span = arclength[cursor + 1] - arclength[cursor];
        const Scalar blend = span > 0.0 ? (target - arclength[cursor]) / span : 0.0;
        p = path[cursor] + blend * (path[cursor + 1] - path[cursor]);
      }
      x.segment<2>(block_index(env, i, tau)) = tau == env.horizon ? g : p;
    }
  }

  const StochasticProblem problem = build_trajectory_problem(env);
  const Scalar violation = feasibility_violation(problem, x);
  if (violation > 1e-9)
    throw InvalidConfig(
        "initial_trajectory: could not construct a feasible start (violation " +
        std::to_string(violation) + "); increase the horizon, dt, or speed caps");
  return x;
}

Scalar trajectory_energy(const Environment& env, const Vector& x, int samples,
                         RngStream& rng) {
  if (samples < 1) throw InvalidInput("trajectory_energy: need at least one sample");
  const StochasticProblem problem = build_trajectory_problem(env);
  Scalar acc = 0.0;
  for (int k = 0; k < samples; ++k)
    acc += problem.objective_value(x, problem.draw_sample(rng));
  return acc / samples;
}

Scalar straight_line_energy(const Environment& env, int samples, RngStream& rng) {
  return trajectory_energy(env, straight_line_trajectory(env), samples, rng);
}

}  // namespace costa::problems
