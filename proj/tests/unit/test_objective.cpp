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

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace boxilqr;
using namespace testing_support;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// One control in [-1, 1], no state bounds.
BoxSpec unit_control_box(int n) {
  return BoxSpec(Vector::Constant(n, -kInf), Vector::Constant(n, kInf), vec({-1}), vec({1}));
}

BarrierState weights(const BoxSpec& box, double mu, double sigma) {
  return BarrierState::uniform(box, mu, sigma, 0.5, 0.5);
}

}  // namespace

TEST(Box, IndexSetsFollowFiniteBounds) {
  const BoxSpec box(vec({-1, -kInf, -kInf}), vec({kInf, kInf, 2}), vec({-kInf, 0}), vec({kInf, 1}));
  EXPECT_EQ(box.constrained_state_indices(), (std::vector<int>{0, 2}));
  EXPECT_EQ(box.constrained_control_indices(), (std::vector<int>{1}));
  EXPECT_TRUE(BoxSpec::unbounded(3, 2).empty());
}

TEST(Box, LowerMustBeBelowUpper) {
  EXPECT_THROW(BoxSpec(vec({0}), vec({0}), vec({-1}), vec({1})), std::invalid_argument);
  EXPECT_THROW(BoxSpec(vec({-1}), vec({1}), vec({2}), vec({1})), std::invalid_argument);
}

TEST(StageCost, ZeroAtGoalWithoutControl) {
  const QuadraticCost qc{3 * Matrix::Identity(2, 2), 3 * Matrix::Identity(1, 1), 30 * Matrix::Identity(2, 2),
                         vec({std::numbers::pi, 0})};
  EXPECT_EQ(stage_cost(qc, qc.goal, vec({0})), 0.0);
}

TEST(StageCost, PendulumWeightsUnitControl) {
  const QuadraticCost qc{3 * Matrix::Identity(2, 2), 3 * Matrix::Identity(1, 1), 30 * Matrix::Identity(2, 2),
                         vec({std::numbers::pi, 0})};
  EXPECT_DOUBLE_EQ(stage_cost(qc, vec({std::numbers::pi, 0}), vec({1})), 1.5);
}

TEST(StageCost, MatchesElementwiseExpansion) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    QuadraticCost qc{random_psd(rng, 3, 0.0), random_psd(rng, 2, 0.5), random_psd(rng, 3, 0.0),
                     random_matrix(rng, 3, 1), uniform(rng, 0.1, 2.0)};
    const Vector x = random_matrix(rng, 3, 1), u = random_matrix(rng, 2, 1);
    double ref = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) ref += 0.5 * (x(i) - qc.goal(i)) * qc.Q(i, j) * (x(j) - qc.goal(j));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) ref += 0.5 * u(i) * qc.R(i, j) * u(j);
    EXPECT_NEAR(stage_cost(qc, x, u), qc.stage_scale * ref, 1e-12 * (1.0 + std::abs(ref)));
  }
}

TEST(StageCost, RejectsIndefiniteControlWeight) {
  QuadraticCost qc{Matrix::Identity(2, 2), -Matrix::Identity(1, 1), Matrix::Identity(2, 2), vec({0, 0})};
  EXPECT_THROW(validate(qc), std::invalid_argument);
}

TEST(Barrier, EmptyIndexSetsContributeNothing) {
  const BoxSpec box = BoxSpec::unbounded(2, 1);
  const BarrierState bs = weights(box, 1, 1);
  EXPECT_EQ(barrier_running(box, bs, vec({100, -3}), vec({1e6})), 0.0);
}

TEST(Barrier, MidpointOfUnitBoxIsZero) {
  const BoxSpec box = unit_control_box(1);
  EXPECT_EQ(barrier_running(box, weights(box, 1, 1), vec({0}), vec({0})), 0.0);
}

TEST(Barrier, OffCenterValue) {
  const BoxSpec box = unit_control_box(1);
  EXPECT_NEAR(barrier_running(box, weights(box, 1, 1), vec({0}), vec({0.5})), -(std::log(1.5) + std::log(0.5)), 1e-15);
  EXPECT_NEAR(barrier_running(box, weights(box, 1, 1), vec({0}), vec({0.5})), 0.287682, 1e-6);
}

TEST(Barrier, InfeasiblePointNamesIndexAndSide) {
  const BoxSpec box(vec({-kInf, 0}), vec({kInf, 1}), vec({-1}), vec({1}));
  const BarrierState bs = weights(box, 1, 1);
  try {
    barrier_running(box, bs, vec({0, 1.0}), vec({0}));
    FAIL() << "expected InfeasiblePoint";
  } catch (const InfeasiblePoint& e) {
    EXPECT_EQ(e.kind(), VariableKind::kState);
    EXPECT_EQ(e.index(), 1);
    EXPECT_EQ(e.side(), BoundSide::kUpper);
  }
  try {
    barrier_running(box, bs, vec({0, 0.5}), vec({-1.5}));
    FAIL() << "expected InfeasiblePoint";
  } catch (const InfeasiblePoint& e) {
    EXPECT_EQ(e.kind(), VariableKind::kControl);
    EXPECT_EQ(e.index(), 0);
    EXPECT_EQ(e.side(), BoundSide::kLower);
  }
}

TEST(Barrier, GrowsWithoutBoundNearEitherSide) {
  const BoxSpec box = unit_control_box(1);
  const BarrierState bs = weights(box, 1, 1);
  for (double side : {-1.0, 1.0}) {
    const double far = barrier_running(box, bs, vec({0}), vec({side * (1 - 1e-3)}));
    const double near = barrier_running(box, bs, vec({0}), vec({side * (1 - 1e-6)}));
    EXPECT_GT(near, far);
  }
}

TEST(BarrierDerivatives, SymmetricPointOfUnitBox) {
  const BoxSpec box = unit_control_box(1);
  const CostDerivatives d = barrier_derivatives(box, weights(box, 1, 1), vec({0}), vec({0}));
  EXPECT_EQ(d.cu(0), 0.0);
  EXPECT_DOUBLE_EQ(d.cuu(0, 0), 2.0);
}

TEST(BarrierDerivatives, StateAtQuarterOfUnitInterval) {
  const BoxSpec box(vec({0}), vec({1}), vec({-kInf}), vec({kInf}));
  const BarrierState bs = weights(box, 1, 1);
  const CostDerivatives d = barrier_derivatives(box, bs, vec({0.25}), vec({0}));
  EXPECT_NEAR(d.cx(0), -8.0 / 3.0, 1e-12);
  EXPECT_NEAR(d.cxx(0, 0), 16.0 + 16.0 / 9.0, 1e-12);
  EXPECT_NEAR(d.cxx(0, 0), 17.7778, 1e-4);
  const Vector g = fd_gradient([&](const Vector& x) { return barrier_running(box, bs, x, vec({0})); }, vec({0.25}));
  EXPECT_LT(rel_error(d.cx, g), 1e-5);
}

TEST(BarrierDerivatives, UnconstrainedEntriesAreExactlyZero) {
  const BoxSpec box(vec({-1, -kInf}), vec({1, kInf}), vec({-kInf, -2}), vec({kInf, 2}));
  const CostDerivatives d = barrier_derivatives(box, weights(box, 0.7, 0.3), vec({0.4, 9}), vec({5, 1}));
  EXPECT_EQ(d.cx(1), 0.0);
  EXPECT_EQ(d.cu(0), 0.0);
  EXPECT_EQ(d.cxx(1, 1), 0.0);
  EXPECT_EQ(d.cxx(0, 1), 0.0);
  EXPECT_EQ(d.cuu(0, 0), 0.0);
  EXPECT_EQ(d.cuu(0, 1), 0.0);
  EXPECT_TRUE(d.cux.isZero(0.0));
  EXPECT_GT(d.cxx(0, 0), 0.0);
  EXPECT_GT(d.cuu(1, 1), 0.0);
}

TEST(BarrierDerivatives, MatchFiniteDifferencesAtInteriorPoints) {
  std::mt19937_64 rng(17);
  const BoxSpec box(vec({-1, 0, -kInf}), vec({1, kInf, kInf}), vec({-2, -kInf}), vec({3, 0.5}));
  for (int k = 0; k < 100; ++k) {
    const BarrierState bs{vec({uniform(rng, 0.01, 10), uniform(rng, 0.01, 10)}),
                          vec({uniform(rng, 0.01, 10), uniform(rng, 0.01, 10)}), vec({0.5, 0.5}), vec({0.5, 0.5})};
    // Slack of at least 1e-3 from every finite bound.
    const Vector x = vec({uniform(rng, -0.999, 0.999), uniform(rng, 1e-3, 5), uniform(rng, -5, 5)});
    const Vector u = vec({uniform(rng, -1.999, 2.999), uniform(rng, -5, 0.499)});
    const CostDerivatives d = barrier_derivatives(box, bs, x, u);
    EXPECT_LT(rel_error(d.cx, fd_gradient([&](const Vector& z) { return barrier_running(box, bs, z, u); }, x)), 1e-5);
    EXPECT_LT(rel_error(d.cu, fd_gradient([&](const Vector& w) { return barrier_running(box, bs, x, w); }, u)), 1e-5);
    EXPECT_LT(rel_error(d.cxx, fd_jacobian([&](const Vector& z) { return Vector(barrier_derivatives(box, bs, z, u).cx); }, x)), 1e-5);
    EXPECT_LT(rel_error(d.cuu, fd_jacobian([&](const Vector& w) { return Vector(barrier_derivatives(box, bs, x, w).cu); }, u)), 1e-5);
    EXPECT_TRUE(d.cux.isZero(0.0));
  }
}

TEST(TerminalDerivatives, AtGoalWithoutStateBounds) {
  const Problem p = make_benchmark_problem(Benchmark::kPendulum);
  const BarrierState bs = weights(p.box, 1, 1);
  const CostDerivatives d = terminal_cost_derivatives(p.cost, p.box, bs, p.cost.goal);
  EXPECT_TRUE(d.cx.isZero(0.0));
  EXPECT_EQ(d.cxx, 30.0 * Matrix::Identity(2, 2));
}

TEST(TerminalDerivatives, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(23);
  const Problem p = make_benchmark_problem(Benchmark::kCartPole);
  const BarrierState bs = weights(p.box, 0.5, 0.5);
  for (int k = 0; k < 100; ++k) {
    auto [x, u] = interior_point(p, rng);
    const CostDerivatives d = terminal_cost_derivatives(p.cost, p.box, bs, x);
    auto phi = [&](const Vector& z) { return terminal_cost(p.cost, z) + state_barrier(p.box, bs.mu, z); };
    EXPECT_LT(rel_error(d.cx, fd_gradient(phi, x)), 1e-5);
    EXPECT_NEAR(d.value, phi(x), 1e-12 * std::abs(phi(x)));
  }
}

TEST(AugmentedCost, ZeroWeightsGivePlainQuadraticCost) {
  Problem p = make_benchmark_problem(Benchmark::kPendulum);
  const Trajectory traj = simulate(p, std::vector<Vector>(p.horizon(), vec({0.3})));
  double ref = 0.0;
  for (int t = 0; t < p.horizon(); ++t) ref += stage_cost(p.cost, traj.states[t], traj.controls[t]);
  ref += terminal_cost(p.cost, traj.states.back());
  const BarrierState bs = weights(p.box, 1, 1);
  EXPECT_NEAR(total_augmented_cost(p, traj, bs.zeroed()), ref, 1e-9 * ref);
}

TEST(AugmentedCost, BarrierAddsItsRunningValue) {
  const Problem p = make_benchmark_problem(Benchmark::kPendulum);
  const Trajectory traj = simulate(p, std::vector<Vector>(p.horizon(), vec({0.3})));
  const BarrierState bs = weights(p.box, 2, 2);
  double barrier = 0.0;
  for (int t = 0; t < p.horizon(); ++t) barrier += barrier_running(p.box, bs, traj.states[t], traj.controls[t]);
  const double with = total_augmented_cost(p, traj, bs);
  const double without = total_augmented_cost(p, traj, bs.zeroed());
  EXPECT_NEAR(with - without, barrier, 1e-9 * std::abs(with));
}

TEST(AugmentedCost, MatchesNaiveResummation) {
  std::mt19937_64 rng(29);
  const Problem p = make_benchmark_problem(Benchmark::kCartPole);
  std::vector<Vector> controls(p.horizon());
  for (auto& u : controls) u = vec({uniform(rng, -0.01, 0.01)});
  const Trajectory traj = simulate(p, controls);
  const BarrierState bs = weights(p.box, 3, 0.2);
  double ref = 0.0;
  for (int t = 0; t < p.horizon(); ++t) {
    const Vector dx = traj.states[t] - p.cost.goal;
    ref += 0.5 * p.cost.stage_scale * (dx.dot(p.cost.Q * dx) + traj.controls[t].dot(p.cost.R * traj.controls[t]));
    const double x1 = traj.states[t](0), u = traj.controls[t](0);
    ref -= 3 * (std::log(x1 + 0.2) + std::log(0.2 - x1));
    ref -= 0.2 * (std::log(u + 2) + std::log(2 - u));
  }
  const Vector dT = traj.states.back() - p.cost.goal;
  ref += 0.5 * dT.dot(p.cost.Qf * dT);
  const double xT = traj.states.back()(0);
  ref -= 3 * (std::log(xT + 0.2) + std::log(0.2 - xT));
  EXPECT_NEAR(total_augmented_cost(p, traj, bs), ref, 1e-9 * std::abs(ref));
}
