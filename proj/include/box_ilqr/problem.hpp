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

#ifndef BOX_ILQR_PROBLEM_HPP
#define BOX_ILQR_PROBLEM_HPP

#include "box_ilqr/model.hpp"
#include "box_ilqr/objective.hpp"

#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace boxilqr {

/// A box-constrained finite-horizon optimal control problem.
struct Problem {
  DiscreteDynamics dynamics;
  QuadraticCost cost;
  BoxSpec box;
  Vector initial_state;

  int horizon() const { return dynamics.horizon(); }
  int state_dim() const { return dynamics.state_dim(); }
  int control_dim() const { return dynamics.control_dim(); }
};

/// Throws std::invalid_argument if dimensions disagree or x0 is not strictly
/// inside the state box.
inline void validate(const Problem& p) {
  const int n = p.state_dim();
  const int m = p.control_dim();
  validate(p.cost);
  if (p.cost.goal.size() != n || p.cost.R.rows() != m) {
    throw std::invalid_argument("Problem: cost dimensions do not match the dynamics");
  }
  if (p.box.state_dim() != n || p.box.control_dim() != m) {
    throw std::invalid_argument("Problem: box dimensions do not match the dynamics");
  }
  if (p.initial_state.size() != n) {
    throw std::invalid_argument("Problem: initial_state has the wrong length");
  }
  if (auto v = first_violation(p.box, &p.initial_state, nullptr)) {
    throw std::invalid_argument("Problem: initial_state component " + std::to_string(v->index) +
                                " is not strictly inside its " + to_string(v->side) + " bound");
  }
}

/// States x_0..x_T, controls u_0..u_{T-1} and the augmented cost at the
/// barrier weights the trajectory was last evaluated with.
struct Trajectory {
  std::vector<Vector> states;
  std::vector<Vector> controls;
  double total_cost = 0.0;

  int horizon() const { return static_cast<int>(controls.size()); }
};

inline double total_augmented_cost(const Problem& p, const Trajectory& traj,
                                   const BarrierState& bs) {
  return augmented_cost(p.cost, p.box, bs, traj.states, traj.controls);
}

/// Open-loop rollout of a control sequence from x0. No feasibility check.
inline Trajectory simulate(const Problem& p, std::vector<Vector> controls) {
  if (static_cast<int>(controls.size()) != p.horizon()) {
    throw std::invalid_argument("simulate: control sequence length differs from the horizon");
  }
  Trajectory traj;
  traj.controls = std::move(controls);
  traj.states.reserve(traj.controls.size() + 1);
  traj.states.push_back(p.initial_state);
  for (int t = 0; t < p.horizon(); ++t) {
    traj.states.push_back(p.dynamics.step(traj.states.back(), traj.controls[t], t));
  }
  return traj;
}

inline Matrix scaled_identity(int n, double s) { return s * Matrix::Identity(n, n); }

/// Benchmark problem with the standard weights and bounds, starting at rest
/// hanging down. The goal is the upright equilibrium. Stage costs are
/// weighted by dt.
inline Problem make_benchmark_problem(Benchmark which) {
  constexpr double pi = std::numbers::pi;
  DiscreteDynamics dyn = make_benchmark(which);
  switch (which) {
    case Benchmark::kPendulum: {
      Vector goal(2);
      goal << pi, 0.0;
      Vector lo(1), hi(1);
      lo << -1.0;
      hi << 1.0;
      return {dyn,
              {scaled_identity(2, 3.0), scaled_identity(1, 3.0), scaled_identity(2, 30.0), goal, dyn.dt()},
              BoxSpec(Vector::Constant(2, -kInf), Vector::Constant(2, kInf), lo, hi),
              Vector::Zero(2)};
    }
    case Benchmark::kCartPole: {
      Vector goal(4);
      goal << 0.0, 0.0, pi, 0.0;
      Vector xl = Vector::Constant(4, -kInf), xu = Vector::Constant(4, kInf);
      xl(0) = -0.2;
      xu(0) = 0.2;
      Vector lo(1), hi(1);
      lo << -2.0;
      hi << 2.0;
      return {dyn,
              {scaled_identity(4, 10.0), scaled_identity(1, 10.0), scaled_identity(4, 1e4), goal, dyn.dt()},
              BoxSpec(xl, xu, lo, hi),
              Vector::Zero(4)};
    }
    case Benchmark::kAcrobot: {
      Vector goal(4);
      goal << pi, 0.0, 0.0, 0.0;
      Vector lo(1), hi(1);
      lo << -5.0;
      hi << 5.0;
      return {dyn,
              {scaled_identity(4, 500.0), scaled_identity(1, 10.0), scaled_identity(4, 5e4), goal, dyn.dt()},
              BoxSpec(Vector::Constant(4, -kInf), Vector::Constant(4, kInf), lo, hi),
              Vector::Zero(4)};
    }
  }
  throw std::invalid_argument("unknown benchmark");
}

}  // namespace boxilqr

#endif  // BOX_ILQR_PROBLEM_HPP
