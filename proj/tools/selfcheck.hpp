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

// Quick oracle and invariant sweep behind `box_ilqr check`. The full suite
// lives under tests/; this is the subset that runs in a second or two.

#ifndef BOX_ILQR_TOOLS_SELFCHECK_HPP
#define BOX_ILQR_TOOLS_SELFCHECK_HPP

#include "box_ilqr/analysis.hpp"

#include <cstdio>
#include <numbers>
#include <random>
#include <string>

namespace boxilqr::tools {

struct CheckLine {
  std::string name;
  bool pass;
  std::string detail;
};

namespace detail {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// A point strictly inside the benchmark's box; unbounded state components
// are drawn from a range covering the swing-up.
inline std::pair<Vector, Vector> interior_point(const Problem& p, std::mt19937_64& rng) {
  const double pi = std::numbers::pi;
  Vector x(p.state_dim()), u(p.control_dim());
  for (int i = 0; i < x.size(); ++i) {
    const double lo = p.box.x_lower()(i), hi = p.box.x_upper()(i);
    if (std::isfinite(lo) && std::isfinite(hi)) {
      x(i) = uniform(rng, lo + 0.01 * (hi - lo), hi - 0.01 * (hi - lo));
    } else {
      x(i) = uniform(rng, -pi, 2.0 * pi);
    }
  }
  for (int j = 0; j < u.size(); ++j) {
    const double lo = p.box.u_lower()(j), hi = p.box.u_upper()(j);
    u(j) = (std::isfinite(lo) && std::isfinite(hi)) ? uniform(rng, lo + 0.01 * (hi - lo), hi - 0.01 * (hi - lo))
                                                     : uniform(rng, -3.0, 3.0);
  }
  return {x, u};
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace detail

inline std::vector<CheckLine> run_selfcheck() {
  std::vector<CheckLine> out;
  std::mt19937_64 rng(20260101);

  // Riccati recursion against the textbook form on random LQ instances.
  {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 1 + trial % 4, m = 1 + trial % 2, T = 5 + 5 * trial;
      LinearQuadraticProblem lq;
      lq.A = Matrix::Random(n, n);
      const double rho = lq.A.eigenvalues().cwiseAbs().maxCoeff();
      if (rho > 1.2) lq.A *= 1.2 / rho;
      lq.B = Matrix::Random(n, m);
      Matrix g = Matrix::Random(n, n);
      lq.Q = g * g.transpose();
      g = Matrix::Random(m, m);
      lq.R = g * g.transpose() + Matrix::Identity(m, m);
      g = Matrix::Random(n, n);
      lq.Qf = g * g.transpose();
      lq.horizon = T;
      const Problem p = to_problem(lq, Vector::Ones(n));
      const Trajectory nominal = simulate(p, std::vector<Vector>(T, Vector::Zero(m)));
      const BarrierState none = BarrierState::uniform(p.box, 0, 0, 0.5, 0.5);
      const GainSchedule gs = backward_pass(p, nominal, none);
      const GainSchedule ref = lqr_oracle(lq);
      for (int t = 0; t < T; ++t) {
        worst = std::max(worst, max_relative_error(gs.K[t], ref.K[t]));
        worst = std::max(worst, max_relative_error(gs.S[t], ref.S[t]));
      }
    }
    out.push_back({"lqr-oracle", worst < 1e-8, detail::fmt("max rel err %.3g", worst)});
  }

  // Dynamics and barrier derivatives against central differences.
  for (Benchmark b : {Benchmark::kPendulum, Benchmark::kCartPole, Benchmark::kAcrobot}) {
    const Problem p = make_benchmark_problem(b);
    const BarrierState bs = BarrierState::uniform(p.box, 0.3, 0.7, 0.5, 0.5);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      auto [x, u] = detail::interior_point(p, rng);
      // Vector-field partials; the RK4 chain rule on top is covered by the
      // test suite with an extended-precision oracle.
      const DynamicsModel& model = p.dynamics.model();
      Matrix fx, fu;
      if (model.rhs_jacobians(x, u, 0.0, fx, fu)) {
        worst = std::max(worst, fd_check([&](const Vector& z) { return model.rhs(z, u, 0.0); }, x, fx));
        worst = std::max(worst, fd_check([&](const Vector& w) { return model.rhs(x, w, 0.0); }, u, fu));
      }
      const CostDerivatives d = barrier_derivatives(p.box, bs, x, u);
      worst = std::max(worst, fd_check([&](const Vector& z) { return barrier_running(p.box, bs, z, u); }, x, d.cx));
      worst = std::max(worst, fd_check([&](const Vector& w) { return barrier_running(p.box, bs, x, w); }, u, d.cu));
      worst = std::max(worst, fd_check([&](const Vector& z) { return Vector(barrier_derivatives(p.box, bs, z, u).cx); },
                                       x, d.cxx));
      worst = std::max(worst, fd_check([&](const Vector& w) { return Vector(barrier_derivatives(p.box, bs, x, w).cu); },
                                       u, d.cuu));
    }
    out.push_back({std::string("derivatives-") + to_string(b), worst < 1e-5,
                   detail::fmt("max rel err %.3g", worst)});
  }

  // Barrier terms make Q_uu strictly more positive.
  {
    const Problem p = make_benchmark_problem(Benchmark::kPendulum);
    const BarrierState bs = BarrierState::uniform(p.box, 1.0, 1.0, 0.5, 0.5);
    bool ok = true;
    for (int k = 0; k < 50 && ok; ++k) {
      std::vector<Vector> controls(p.horizon());
      for (auto& u : controls) u = Vector::Constant(1, detail::uniform(rng, -0.98, 0.98));
      const Trajectory nominal = simulate(p, controls);
      const auto cmp = compare_control_hessians(p, nominal, bs);
      for (std::size_t t = 0; t < cmp.with_barrier.size(); ++t) {
        ok = ok && cmp.with_barrier[t] > cmp.without_barrier[t];
      }
    }
    out.push_back({"barrier-regularization", ok, "50 nominals"});
  }
  return out;
}

}  // namespace boxilqr::tools

#endif  // BOX_ILQR_TOOLS_SELFCHECK_HPP
