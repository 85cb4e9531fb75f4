#include "costa/schedule.hpp"

#include <cmath>

namespace costa {

void ScheduleState::validate() const {
  if (!(kbar > 0.0)) throw InvalidConfig("schedule: kbar must be > 0");
  if (!(offset > 0.0)) throw InvalidConfig("schedule: w must be > 0");
  if (!(momentum_scale > 0.0)) throw InvalidConfig("schedule: c must be > 0");
  if (sum_grad_sq < 0.0) throw InvalidConfig("schedule: sum of squared gradient norms < 0");
}

Scalar step_size(const ScheduleState& state) {
  state.validate();
  return state.kbar / std::cbrt(state.offset + state.sum_grad_sq);
}

Scalar momentum(const ScheduleState& state, Scalar eta) {
  if (!(eta > 0.0)) throw InvalidInput("momentum: eta must be > 0");
  return state.momentum_scale * eta * eta;
}

ScheduleState accumulate(const ScheduleState& state, Scalar grad_norm) {
  if (grad_norm < 0.0) throw InvalidInput("accumulate: gradient norm must be >= 0");
  ScheduleState next = state;
  next.sum_grad_sq += grad_norm * grad_norm;
  next.iteration += 1;
  return next;
}

Vector storm_update(const Vector& z, const Vector& grad_at_current,
                    const Vector& grad_at_previous_same_sample, Scalar beta) {
  if (grad_at_current.size() != z.size() || grad_at_previous_same_sample.size() != z.size())
    throw InvalidInput("storm_update: dimension mismatch");
  if (beta < 0.0 || beta > 1.0) throw InvalidInput("storm_update: beta must lie in [0, 1]");
  return grad_at_current + (1.0 - beta) * (z - grad_at_previous_same_sample);
}

ValidationReport validate_params(const SmoothnessMeta& meta, Scalar kbar, Scalar w,
                                 Scalar c, Scalar mu) {
  ValidationReport report;
  // Comparisons carry a relative slack so configurations sitting exactly on
  // a hypothesis boundary do not fail on rounding noise.
  auto leq = [](Scalar a, Scalar b) { return a <= b + 1e-12 * (std::abs(b) + 1.0); };
  auto push = [&report](std::string name, bool ok, Scalar observed, Scalar threshold,
                        std::string note = "") {
    report.checks.push_back({std::move(name),
                             ok ? CheckStatus::kPass : CheckStatus::kFail, observed,
                             threshold, std::move(note)});
  };
  auto skip = [&report](std::string name, std::string note) {
    report.checks.push_back({std::move(name), CheckStatus::kSkipped, 0.0, 0.0, std::move(note)});
  };

  if (!(kbar > 0.0) || !(w > 0.0)) {
    push("positivity", false, std::min(kbar, w), 0.0, "kbar and w must be positive");
    return report;
  }
  push("kbar <= w^(1/3)", leq(kbar, std::cbrt(w)), kbar, std::cbrt(w));

  const Scalar c_upper = std::pow(w, 2.0 / 3.0) / (4.0 * kbar * kbar);
  push("c <= w^(2/3)/(4 kbar^2)", leq(c, c_upper), c, c_upper);

  const Scalar beta1 = c * kbar * kbar / std::pow(w, 2.0 / 3.0);
  push("beta_1 <= 1/4", leq(beta1, 0.25), beta1, 0.25);

  if (meta.smoothness && meta.lipschitz) {
    const Scalar L = *meta.smoothness;
    const Scalar G = *meta.lipschitz;
    const Scalar k3 = kbar * kbar * kbar;
    // The two stated lower thresholds differ by a factor of L in the G² term;
    // gate on the stricter one and record both.
    const Scalar with_L = 4.0 * L * L + G * G / (6.0 * L * k3);
    const Scalar without_L = 4.0 * L * L + G * G / (6.0 * k3);
    const Scalar strict = std::max(with_L, without_L);
    push("c >= 4L^2 + G^2/(6 L kbar^3) [strict form]", leq(strict, c), c, strict,
         "alternate threshold without L: " + std::to_string(without_L));
  } else {
    skip("c >= 4L^2 + G^2/(6 L kbar^3) [strict form]", "L or G unknown");
  }

  if (meta.smoothness) {
    const Scalar L = *meta.smoothness;
    if (4.0 * mu - 3.0 <= 0.0) {
      push("w >= (2 L kbar/(4 mu - 3))^3", false, 4.0 * mu - 3.0, 0.0,
           "4*mu - 3 <= 0: hypothesis infeasible for any w");
    } else {
      const Scalar lower = std::pow(2.0 * L * kbar / (4.0 * mu - 3.0), 3.0);
      push("w >= (2 L kbar/(4 mu - 3))^3", leq(lower, w), w, lower);
    }
  } else {
    skip("w >= (2 L kbar/(4 mu - 3))^3", "L unknown");
  }

  if (meta.lipschitz) {
    const Scalar G = *meta.lipschitz;
    push("w >= G^2", leq(G * G, w), w, G * G);
  } else {
    skip("w >= G^2", "G unknown");
  }
  return report;
}

}  // namespace costa
