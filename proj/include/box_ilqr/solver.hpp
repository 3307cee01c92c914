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

#ifndef BOX_ILQR_SOLVER_HPP
#define BOX_ILQR_SOLVER_HPP

#include "box_ilqr/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace boxilqr {

struct SolverConfig {
  double mu0 = 1e8;
  double sigma0 = 1e8;
  double r_mu0 = 0.5;
  double r_sigma0 = 0.5;
  double beta_r = 1.0 / 0.95;
  double eps_barrier = 0.01;

  int inner_max_iters = 500;
  /// Inner loop stops once sum Q_u' Q_uu^-1 Q_u falls to this value...
  double inner_grad_tol = 1e-8;
  /// ...or to this fraction of |J|, below which the predicted decrease is
  /// lost in the rounding of J itself.
  double inner_rel_tol = 1e-12;

  int outer_max_iters = 200;
  /// A constraint is implicated in an inner failure when its slack falls
  /// below this fraction of its box width.
  double failure_slack_frac = 1e-6;

  LineSearchConfig line_search;
  Regularization reg;
};

inline void validate(const SolverConfig& c) {
  auto in_open_unit = [](double r) { return r > 0.0 && r < 1.0; };
  if (!(c.mu0 > 0.0) || !(c.sigma0 > 0.0)) throw std::invalid_argument("mu0 and sigma0 must be positive");
  if (!in_open_unit(c.r_mu0)) throw std::invalid_argument("r_mu must be in (0,1)");
  if (!in_open_unit(c.r_sigma0)) throw std::invalid_argument("r_sigma must be in (0,1)");
  if (!(c.beta_r > 1.0)) throw std::invalid_argument("beta_r must be > 1");
  if (!(c.eps_barrier > 0.0)) throw std::invalid_argument("eps_barrier must be positive");
  if (c.inner_max_iters <= 0) throw std::invalid_argument("inner_max_iters must be positive");
  if (!(c.inner_grad_tol > 0.0)) throw std::invalid_argument("inner_grad_tol must be positive");
  if (!(c.inner_rel_tol >= 0.0)) throw std::invalid_argument("inner_rel_tol must be >= 0");
  if (c.outer_max_iters <= 0) throw std::invalid_argument("outer_max_iters must be positive");
  validate(c.line_search);
  if (!(c.reg.zeta_min > 0.0 && c.reg.zeta_max >= c.reg.zeta_min && c.reg.growth > 1.0)) {
    throw std::invalid_argument("regularization: need 0 < zeta_min <= zeta_max and growth > 1");
  }
}

/// Raised when the starting rollout is not strictly inside the box.
class InfeasibleInitialTrajectory : public std::runtime_error {
 public:
  InfeasibleInitialTrajectory(int t, VariableKind kind, int index, BoundSide side)
      : std::runtime_error("initial trajectory violates the " + std::string(to_string(side)) +
                           " bound of " + to_string(kind) + " component " +
                           std::to_string(index) + " at t=" + std::to_string(t)),
        time_index(t),
        kind(kind),
        index(index),
        side(side) {}

  int time_index;
  VariableKind kind;
  int index;
  BoundSide side;
};

/**
 * Rolls out `controls` (zeros when empty) from x0 and checks strict
 * feasibility everywhere. No search for a feasible start is attempted.
 * The cost is evaluated at the initial barrier weights.
 */
inline Trajectory initial_trajectory(const Problem& p, const SolverConfig& cfg,
                                     std::vector<Vector> controls = {}) {
  if (controls.empty()) controls.assign(p.horizon(), Vector::Zero(p.control_dim()));
  for (std::size_t t = 0; t < controls.size(); ++t) {
    if (controls[t].size() != p.control_dim()) {
      throw std::invalid_argument("initial_trajectory: control " + std::to_string(t) +
                                  " has the wrong length");
    }
  }
  Trajectory traj = simulate(p, std::move(controls));
  for (int t = 0; t <= p.horizon(); ++t) {
    const Vector* u = t < p.horizon() ? &traj.controls[t] : nullptr;
    if (auto v = first_violation(p.box, &traj.states[t], u)) {
      throw InfeasibleInitialTrajectory(t, v->kind, v->index, v->side);
    }
  }
  const BarrierState bs = BarrierState::uniform(p.box, cfg.mu0, cfg.sigma0, cfg.r_mu0, cfg.r_sigma0);
  traj.total_cost = total_augmented_cost(p, traj, bs);
  return traj;
}

/// Outcome of one fixed-barrier iLQR solve.
struct InnerResult {
  Trajectory trajectory;
  GainSchedule gains;
  bool success = false;
  bool hit_iteration_cap = false;
  std::vector<ConstraintIndex> failed_indices;
  std::string failure_reason;
  std::vector<double> costs;   ///< cost of the warm start, then every accepted iterate
  std::vector<double> alphas;  ///< accepted step sizes
  int iterations = 0;          ///< accepted iterations
};

/// Constrained components whose slack anywhere along `traj` is below
/// frac * (box width).
inline std::vector<ConstraintIndex> near_boundary_indices(const Problem& p, const Trajectory& traj,
                                                          double frac) {
  std::vector<ConstraintIndex> out;
  const auto& box = p.box;
  auto tight = [frac](double v, double lo, double hi) {
    const double width = std::isfinite(hi - lo) ? hi - lo : 1.0;
    return std::min(v - lo, hi - v) < frac * width;
  };
  for (int i : box.constrained_state_indices()) {
    for (const Vector& x : traj.states) {
      if (tight(x(i), box.x_lower()(i), box.x_upper()(i))) {
        out.push_back({VariableKind::kState, i});
        break;
      }
    }
  }
  for (int j : box.constrained_control_indices()) {
    for (const Vector& u : traj.controls) {
      if (tight(u(j), box.u_lower()(j), box.u_upper()(j))) {
        out.push_back({VariableKind::kControl, j});
        break;
      }
    }
  }
  return out;
}

/**
 * iLQR at fixed barrier weights, warm-started from a strictly feasible
 * trajectory. Alternates backward pass and line search until the predicted
 * decrease vanishes. Failures (no acceptable step, Q_uu not positive
 * definite) are reported through `success` rather than thrown.
 */
inline InnerResult ilqr_solve(const Problem& p, const Trajectory& warm_start,
                              const BarrierState& bs, const SolverConfig& cfg) {
  InnerResult res;
  res.trajectory = warm_start;
  res.trajectory.total_cost = total_augmented_cost(p, res.trajectory, bs);
  res.costs.push_back(res.trajectory.total_cost);

  auto fail = [&](std::string why) {
    res.success = false;
    res.failure_reason = std::move(why);
    res.failed_indices = near_boundary_indices(p, res.trajectory, cfg.failure_slack_frac);
    return res;
  };
  auto converged = [&](const GainSchedule& gs) {
    return gs.expected_reduction_sum <= cfg.inner_grad_tol ||
           gs.expected_reduction_sum <= cfg.inner_rel_tol * std::abs(res.trajectory.total_cost);
  };

  Regularization reg = cfg.reg;
  for (int iter = 0; iter < cfg.inner_max_iters; ++iter) {
    try {
      res.gains = backward_pass(p, res.trajectory, bs, reg);
    } catch (const NonPositiveDefinite& e) {
      return fail(e.what());
    }
    if (converged(res.gains)) {
      res.success = true;
      return res;
    }
    auto step = line_search(p, res.trajectory, res.gains, cfg.line_search, bs);
    if (std::holds_alternative<NoAcceptableStep>(step)) return fail("no acceptable step size");
    auto& accepted = std::get<AcceptedStep>(step);
    res.trajectory = std::move(accepted.trajectory);
    res.costs.push_back(res.trajectory.total_cost);
    res.alphas.push_back(accepted.alpha);
    ++res.iterations;
    reg.zeta = 0.0;
  }

  // Cap reached: report gains consistent with the returned trajectory.
  res.hit_iteration_cap = true;
  try {
    res.gains = backward_pass(p, res.trajectory, bs, reg);
  } catch (const NonPositiveDefinite& e) {
    return fail(e.what());
  }
  res.success = true;
  return res;
}

enum class SolveStatus { kConverged, kInnerFailure, kIterationCap };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged: return "Converged";
    case SolveStatus::kInnerFailure: return "InnerFailure";
    case SolveStatus::kIterationCap: return "IterationCap";
  }
  return "Unknown";
}

/// One pass of the barrier-relaxation loop.
struct OuterRecord {
  Vector mu;       ///< weights the inner solve ran with
  Vector sigma;
  Vector r_mu;     ///< reduction factors after this record's update
  Vector r_sigma;
  int inner_iters = 0;
  double final_inner_cost = 0.0;
  std::vector<double> costs;
  std::vector<double> accepted_alphas;
  bool failed = false;
  bool hit_iteration_cap = false;
  std::vector<ConstraintIndex> failed_indices;
  std::string failure_reason;
  SlackSummary slack;  ///< smallest slacks of the inner solve's final iterate
};

struct SolveReport {
  std::vector<OuterRecord> outer_iterations;
  Trajectory final_trajectory;
  GainSchedule final_gains;
  BarrierState final_barrier;  ///< weights of the last successful inner solve
  int reductions = 0;          ///< successful barrier reductions performed
  SolveStatus status = SolveStatus::kConverged;
};

using InnerSolver = std::function<InnerResult(const Problem&, const Trajectory&,
                                              const BarrierState&, const SolverConfig&)>;

/**
 * Barrier relaxation around ilqr_solve.
 *
 * While any weight exceeds eps_barrier (max-norm): solve at the current
 * weights warm-started from the last iterate. On success, remember the
 * weights and shrink them element-wise by their factors. On failure, restore
 * the remembered weights and raise each implicated factor to
 * min(1, r * beta_r) (all factors when none is implicated), then retry.
 *
 * The inner solver is injectable for testing the adaptation path.
 */
inline SolveReport box_ilqr(const Problem& p, const SolverConfig& cfg, const Trajectory& start,
                            const InnerSolver& inner = ilqr_solve) {
  validate(p);
  validate(cfg);
  SolveReport report;
  BarrierState bs = BarrierState::uniform(p.box, cfg.mu0, cfg.sigma0, cfg.r_mu0, cfg.r_sigma0);
  Vector mu_prev = bs.mu;
  Vector sigma_prev = bs.sigma;
  Trajectory current = start;
  report.final_trajectory = start;
  report.final_barrier = bs;

  auto soften = [&](const std::vector<ConstraintIndex>& failed) {
    bool changed = false;
    auto raise = [&](Vector& r, Eigen::Index k) {
      const double next = std::min(1.0, r(k) * cfg.beta_r);
      changed = changed || next != r(k);
      r(k) = next;
    };
    const auto& xi = p.box.constrained_state_indices();
    const auto& ui = p.box.constrained_control_indices();
    if (failed.empty()) {
      for (Eigen::Index k = 0; k < bs.r_mu.size(); ++k) raise(bs.r_mu, k);
      for (Eigen::Index k = 0; k < bs.r_sigma.size(); ++k) raise(bs.r_sigma, k);
      return changed;
    }
    for (const auto& c : failed) {
      const auto& idx = c.kind == VariableKind::kState ? xi : ui;
      auto it = std::find(idx.begin(), idx.end(), c.index);
      if (it == idx.end()) continue;
      raise(c.kind == VariableKind::kState ? bs.r_mu : bs.r_sigma, it - idx.begin());
    }
    return changed;
  };

  auto record_from = [&](const InnerResult& r) {
    OuterRecord rec;
    rec.mu = bs.mu;
    rec.sigma = bs.sigma;
    rec.inner_iters = r.iterations;
    rec.final_inner_cost = r.trajectory.total_cost;
    rec.costs = r.costs;
    rec.accepted_alphas = r.alphas;
    rec.failed = !r.success;
    rec.hit_iteration_cap = r.hit_iteration_cap;
    rec.failed_indices = r.failed_indices;
    rec.failure_reason = r.failure_reason;
    rec.slack = min_slacks(p, r.trajectory);
    return rec;
  };

  // With no constrained components the loop below never runs; a single
  // inner solve is the whole algorithm.
  if (bs.max_weight() <= cfg.eps_barrier) {
    InnerResult r = inner(p, current, bs, cfg);
    OuterRecord rec = record_from(r);
    rec.r_mu = bs.r_mu;
    rec.r_sigma = bs.r_sigma;
    report.outer_iterations.push_back(std::move(rec));
    report.final_trajectory = std::move(r.trajectory);
    report.final_gains = std::move(r.gains);
    report.status = r.success ? SolveStatus::kConverged : SolveStatus::kInnerFailure;
    return report;
  }

  while (bs.max_weight() > cfg.eps_barrier) {
    if (static_cast<int>(report.outer_iterations.size()) >= cfg.outer_max_iters) {
      report.status = SolveStatus::kIterationCap;
      return report;
    }
    InnerResult r = inner(p, current, bs, cfg);
    OuterRecord rec = record_from(r);
    current = r.trajectory;

    if (!r.success) {
      bs.mu = mu_prev;
      bs.sigma = sigma_prev;
      const bool changed = soften(r.failed_indices);
      rec.r_mu = bs.r_mu;
      rec.r_sigma = bs.r_sigma;
      report.outer_iterations.push_back(std::move(rec));
      if (!changed) {
        report.status = SolveStatus::kInnerFailure;
        return report;
      }
      continue;
    }

    report.final_trajectory = r.trajectory;
    report.final_gains = std::move(r.gains);
    report.final_barrier = bs;
    mu_prev = bs.mu;
    sigma_prev = bs.sigma;
    bs.mu = bs.r_mu.cwiseProduct(bs.mu);
    bs.sigma = bs.r_sigma.cwiseProduct(bs.sigma);
    ++report.reductions;
    rec.r_mu = bs.r_mu;
    rec.r_sigma = bs.r_sigma;
    report.outer_iterations.push_back(std::move(rec));
  }
  report.status = SolveStatus::kConverged;
  return report;
}

inline SolveReport box_ilqr(const Problem& p, const SolverConfig& cfg) {
  return box_ilqr(p, cfg, initial_trajectory(p, cfg));
}

}  // namespace boxilqr

#endif  // BOX_ILQR_SOLVER_HPP
