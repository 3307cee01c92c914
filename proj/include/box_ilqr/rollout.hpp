/*
 Copyright 2026 The Box-iLQR Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef BOX_ILQR_ROLLOUT_HPP
#define BOX_ILQR_ROLLOUT_HPP

#include "box_ilqr/riccati.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <variant>

namespace boxilqr {

/// Backtracking parameters. A step is accepted when the realized/predicted
/// cost-change ratio is at least c1.
struct LineSearchConfig {
  double c1 = 1e-4;
  double alpha_init = 1.0;
  double backtrack_factor = 0.5;
  double alpha_min = 1e-10;
};

inline void validate(const LineSearchConfig& c) {
  if (!(c.c1 > 0.0 && c.c1 < 1.0)) throw std::invalid_argument("line_search.c1 must be in (0,1)");
  if (!(c.backtrack_factor > 0.0 && c.backtrack_factor < 1.0)) {
    throw std::invalid_argument("line_search.backtrack_factor must be in (0,1)");
  }
  if (!(c.alpha_min > 0.0 && c.alpha_min < c.alpha_init && c.alpha_init <= 1.0)) {
    throw std::invalid_argument("line_search: need 0 < alpha_min < alpha_init <= 1");
  }
}

/// Why a candidate rollout was rejected before its cost could be compared.
struct InfeasibleRollout {
  int time_index = 0;
  VariableKind kind = VariableKind::kControl;
  int index = 0;
  BoundSide side = BoundSide::kLower;
  bool non_finite = false;  ///< integration blew up instead of leaving the box
};

/**
 * Rolls the affine policy u = u_bar + alpha k + K (x - x_bar) through the
 * dynamics from the nominal's x_0. Returns the candidate with its augmented
 * cost, or the first point that left the strict interior.
 */
inline std::variant<Trajectory, InfeasibleRollout> forward_pass(const Problem& p,
                                                                const Trajectory& nominal,
                                                                const GainSchedule& gs,
                                                                double alpha,
                                                                const BarrierState& bs) {
  const int T = p.horizon();
  Trajectory out;
  out.states.reserve(T + 1);
  out.controls.reserve(T);
  out.states.push_back(nominal.states.front());

  for (int t = 0; t < T; ++t) {
    const Vector& x = out.states.back();
    if (auto v = first_violation(p.box, &x, nullptr)) {
      return InfeasibleRollout{t, v->kind, v->index, v->side, false};
    }
    Vector u = nominal.controls[t] + alpha * gs.k[t] + gs.K[t] * (x - nominal.states[t]);
    if (!u.allFinite()) return InfeasibleRollout{t, VariableKind::kControl, 0, BoundSide::kLower, true};
    if (auto v = first_violation(p.box, nullptr, &u)) {
      return InfeasibleRollout{t, v->kind, v->index, v->side, false};
    }
    Vector next;
    try {
      next = p.dynamics.step(x, u, t);
    } catch (const StepFailure&) {
      return InfeasibleRollout{t, VariableKind::kState, 0, BoundSide::kLower, true};
    }
    out.controls.push_back(std::move(u));
    out.states.push_back(std::move(next));
  }
  if (auto v = first_violation(p.box, &out.states.back(), nullptr)) {
    return InfeasibleRollout{T, v->kind, v->index, v->side, false};
  }
  out.total_cost = total_augmented_cost(p, out, bs);
  if (!std::isfinite(out.total_cost)) {
    return InfeasibleRollout{T, VariableKind::kState, 0, BoundSide::kLower, true};
  }
  return out;
}

struct AcceptedStep {
  Trajectory trajectory;
  double alpha = 1.0;
  double ratio = 1.0;  ///< realized / predicted cost change
  int trials = 1;
};

struct NoAcceptableStep {
  int trials = 0;
  std::optional<InfeasibleRollout> last_infeasible;
};

/**
 * Backtracking search on alpha. Candidates that leave the box are rejected
 * outright, which keeps every accepted iterate strictly feasible; the rest
 * must achieve at least c1 of the predicted decrease.
 */
inline std::variant<AcceptedStep, NoAcceptableStep> line_search(const Problem& p,
                                                                const Trajectory& nominal,
                                                                const GainSchedule& gs,
                                                                const LineSearchConfig& cfg,
                                                                const BarrierState& bs) {
  NoAcceptableStep failure;
  for (double alpha = cfg.alpha_init; alpha >= cfg.alpha_min; alpha *= cfg.backtrack_factor) {
    ++failure.trials;
    auto candidate = forward_pass(p, nominal, gs, alpha, bs);
    if (auto* bad = std::get_if<InfeasibleRollout>(&candidate)) {
      failure.last_infeasible = *bad;
      continue;
    }
    auto& traj = std::get<Trajectory>(candidate);
    const double predicted = expected_reduction(gs, alpha);
    const double actual = traj.total_cost - nominal.total_cost;
    if (predicted < 0.0 && actual < 0.0) {
      const double ratio = actual / predicted;
      if (ratio >= cfg.c1) return AcceptedStep{std::move(traj), alpha, ratio, failure.trials};
    }
  }
  return failure;
}

/// Smallest lower-side and upper-side slack over all constrained components
/// of a trajectory (infinite when nothing is constrained).
struct SlackSummary {
  double lower = std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

inline SlackSummary min_slacks(const Problem& p, const Trajectory& traj) {
  SlackSummary s;
  const auto& box = p.box;
  for (const Vector& x : traj.states) {
    for (int i : box.constrained_state_indices()) {
      s.lower = std::min(s.lower, x(i) - box.x_lower()(i));
      s.upper = std::min(s.upper, box.x_upper()(i) - x(i));
    }
  }
  for (const Vector& u : traj.controls) {
    for (int j : box.constrained_control_indices()) {
      s.lower = std::min(s.lower, u(j) - box.u_lower()(j));
      s.upper = std::min(s.upper, box.u_upper()(j) - u(j));
    }
  }
  return s;
}

}  // namespace boxilqr

#endif  // BOX_ILQR_ROLLOUT_HPP
