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

// x' = a x + b u over one step with C = 1/2 q x^2 + 1/2 r u^2 and Phi = 1/2 qf x^2.
Problem scalar_problem(double a, double b, double q, double r, double qf, int T = 1) {
  Matrix A = Matrix::Constant(1, 1, a), B = Matrix::Constant(1, 1, b);
  return Problem{DiscreteDynamics(std::make_shared<LinearModel>(A, B), 1.0, T, Integrator::kDiscreteMap),
                 QuadraticCost{Matrix::Constant(1, 1, q), Matrix::Constant(1, 1, r), Matrix::Constant(1, 1, qf),
                               Vector::Zero(1), 1.0},
                 BoxSpec::unbounded(1, 1), Vector::Zero(1)};
}

BarrierState no_barrier(const Problem& p) { return BarrierState::uniform(p.box, 1.0, 1.0, 0.5, 0.5); }

}  // namespace

TEST(BackwardPass, ScalarFeedforwardIsMinusGradientOverCurvature) {
  // Q_uu = r = 2, Q_u = r u = 4 at u = 2, Q_ux = 0 because Phi = 0.
  const Problem p = scalar_problem(0.7, 1.0, 1.0, 2.0, 0.0);
  const Trajectory nominal = simulate(p, {Vector::Constant(1, 2.0)});
  const GainSchedule gs = backward_pass(p, nominal, no_barrier(p));
  EXPECT_DOUBLE_EQ(gs.k[0](0), -2.0);
  EXPECT_DOUBLE_EQ(gs.K[0](0, 0), 0.0);
  EXPECT_DOUBLE_EQ(gs.expected_reduction_sum, 8.0);
}

TEST(BackwardPass, OneStepGainMatchesClosedForm) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto lq = random_lq(rng, 3, 2, 1);
    const Problem p = lq_problem(lq, Vector::Ones(3));
    const GainSchedule gs = backward_pass(p, simulate(p, {Vector::Zero(2)}), BarrierState{});
    const Matrix closed = -(lq.R + lq.B.transpose() * lq.Qf * lq.B).inverse() * lq.B.transpose() * lq.Qf * lq.A;
    EXPECT_LT(rel_error(gs.K[0], closed), 1e-10);
    EXPECT_LT(rel_error(lqr_oracle(lq).K[0], closed), 1e-10);
  }
}

TEST(BackwardPass, MatchesRiccatiOracleOnRandomInstances) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4), m = 1 + static_cast<int>(rng() % 2);
    const int T = 1 + static_cast<int>(rng() % 100);
    const auto lq = random_lq(rng, n, m, T);
    const Problem p = lq_problem(lq, random_matrix(rng, n, 1));
    std::vector<Vector> controls(T);
    for (auto& u : controls) u = random_matrix(rng, m, 1);
    const GainSchedule gs = backward_pass(p, simulate(p, controls), BarrierState{});
    const GainSchedule ref = lqr_oracle(lq);
    double worst = 0.0;
    for (int t = 0; t < T; ++t) {
      worst = std::max(worst, rel_error(gs.K[t], ref.K[t]));
      worst = std::max(worst, rel_error(gs.S[t], ref.S[t]));
    }
    worst = std::max(worst, rel_error(gs.S[T], ref.S[T]));
    EXPECT_LT(worst, 1e-8) << "trial " << trial << " n=" << n << " m=" << m << " T=" << T;
  }
}

TEST(BackwardPass, OracleDoubleIntegrator) {
  LinearQuadraticProblem lq;
  lq.A = Matrix(2, 2);
  lq.A << 1.0, 0.1, 0.0, 1.0;
  lq.B = Matrix(2, 1);
  lq.B << 0.005, 0.1;
  lq.Q = Matrix::Identity(2, 2);
  lq.R = Matrix::Identity(1, 1);
  lq.Qf = Matrix::Identity(2, 2);
  lq.horizon = 50;
  const Problem p = lq_problem(lq, Vector::Ones(2));
  const GainSchedule gs = backward_pass(p, simulate(p, std::vector<Vector>(50, Vector::Zero(1))), BarrierState{});
  const GainSchedule ref = lqr_oracle(lq);
  for (int t = 0; t < 50; ++t) EXPECT_LT(rel_error(gs.K[t], ref.K[t]), 1e-8);
}

TEST(BackwardPass, CostlessProblemHasZeroGains) {
  LinearQuadraticProblem lq;
  lq.A = Matrix::Identity(2, 2);
  lq.B = Matrix::Ones(2, 1);
  lq.Q = Matrix::Zero(2, 2);
  lq.R = Matrix::Identity(1, 1);
  lq.Qf = Matrix::Zero(2, 2);
  lq.horizon = 10;
  for (const auto& K : lqr_oracle(lq).K) EXPECT_TRUE(K.isZero(0.0));
  const Problem p = lq_problem(lq, Vector::Ones(2));
  const GainSchedule gs = backward_pass(p, simulate(p, std::vector<Vector>(10, Vector::Zero(1))), BarrierState{});
  for (const auto& K : gs.K) EXPECT_TRUE(K.isZero(0.0));
}

TEST(BackwardPass, StationaryNominalHasZeroFeedforward) {
  std::mt19937_64 rng(41);
  const auto lq = random_lq(rng, 3, 2, 30);
  const Problem p = lq_problem(lq, Vector::Zero(3));
  const GainSchedule gs = backward_pass(p, simulate(p, std::vector<Vector>(30, Vector::Zero(2))), BarrierState{});
  EXPECT_EQ(gs.expected_reduction_sum, 0.0);
  for (const auto& k : gs.k) EXPECT_TRUE(k.isZero(0.0));
}

TEST(BackwardPass, ValueHessiansAreExactlySymmetric) {
  const Problem p = make_benchmark_problem(Benchmark::kAcrobot);
  const Trajectory nominal = simulate(p, std::vector<Vector>(p.horizon(), Vector::Constant(1, 0.5)));
  const GainSchedule gs = backward_pass(p, nominal, BarrierState::uniform(p.box, 1, 1, 0.5, 0.5));
  for (const auto& S : gs.S) EXPECT_EQ(S, S.transpose());
  EXPECT_GE(gs.expected_reduction_sum, 0.0);
}

TEST(BackwardPass, ShiftGrowsUntilControlHessianFactors) {
  const Problem p = scalar_problem(1.0, 1.0, 1.0, -1.0, 0.0);
  const GainSchedule gs = backward_pass(p, simulate(p, {Vector::Constant(1, 1.0)}), BarrierState{});
  EXPECT_GT(gs.zeta, 1.0);
  EXPECT_LE(gs.zeta, 10.0 * (1 + 1e-12));
  EXPECT_GT(gs.expected_reduction_sum, 0.0);
}

TEST(BackwardPass, ShiftPastCeilingIsReported) {
  const Problem p = scalar_problem(1.0, 1.0, 1.0, -1e9, 0.0);
  EXPECT_THROW(backward_pass(p, simulate(p, {Vector::Constant(1, 1.0)}), BarrierState{}), NonPositiveDefinite);
}

TEST(BackwardPass, RejectsInfeasibleNominal) {
  const Problem p = make_benchmark_problem(Benchmark::kPendulum);
  const Trajectory nominal = simulate(p, std::vector<Vector>(p.horizon(), Vector::Constant(1, 1.0)));
  EXPECT_THROW(backward_pass(p, nominal, BarrierState::uniform(p.box, 1, 1, 0.5, 0.5)), InfeasiblePoint);
}

TEST(ExpectedReduction, Substitution) {
  GainSchedule gs;
  gs.expected_reduction_sum = 8.0;
  EXPECT_DOUBLE_EQ(expected_reduction(gs, 1.0), -4.0);
  EXPECT_DOUBLE_EQ(expected_reduction(gs, 0.5), -3.0);
  gs.expected_reduction_sum = 0.0;
  for (double a : {0.1, 0.5, 1.0}) EXPECT_EQ(expected_reduction(gs, a), 0.0);
}

TEST(ExpectedReduction, NonIncreasingInStepSize) {
  GainSchedule gs;
  gs.expected_reduction_sum = 3.7;
  double prev = expected_reduction(gs, 1e-6);
  for (double a = 0.01; a <= 1.0 + 1e-12; a += 0.01) {
    const double cur = expected_reduction(gs, a);
    EXPECT_LE(cur, prev);
    EXPECT_LE(cur, 0.0);
    prev = cur;
  }
}

TEST(Regularization, BarrierRaisesSmallestControlCurvature) {
  // 50 random strictly interior nominals on the bounded-control benchmarks.
  std::mt19937_64 rng(43);
  for (int k = 0; k < 50; ++k) {
    const Benchmark b = k % 2 ? Benchmark::kAcrobot : Benchmark::kPendulum;
    Problem p = make_benchmark_problem(b);
    p.dynamics = DiscreteDynamics(p.dynamics.model_ptr(), p.dynamics.dt(), 100);
    const double hi = p.box.u_upper()(0);
    std::vector<Vector> controls(p.horizon());
    for (auto& u : controls) u = Vector::Constant(1, uniform(rng, -0.99 * hi, 0.99 * hi));
    const BarrierState bs = BarrierState::uniform(p.box, uniform(rng, 1e-3, 10), uniform(rng, 1e-3, 10), 0.5, 0.5);
    const auto cmp = compare_control_hessians(p, simulate(p, controls), bs);
    for (std::size_t t = 0; t < cmp.with_barrier.size(); ++t) {
      EXPECT_GT(cmp.with_barrier[t], cmp.without_barrier[t]) << to_string(b) << " t=" << t;
    }
  }
}
