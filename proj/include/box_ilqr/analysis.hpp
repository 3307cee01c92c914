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

#ifndef BOX_ILQR_ANALYSIS_HPP
#define BOX_ILQR_ANALYSIS_HPP

#include "box_ilqr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace boxilqr {

// ---------------------------------------------------------------------------
// Feedback gains near saturation
// ---------------------------------------------------------------------------

struct ChannelSaturation {
  int channel = 0;                  ///< control component index
  std::vector<int> saturated_steps;
  double peak_row_norm = 0.0;       ///< max_t |K_t(channel, :)|
  double saturated_max_norm = 0.0;  ///< same max restricted to saturated steps
};

struct SaturationReport {
  double threshold_frac = 0.01;
  Matrix gain_row_norms;                 ///< T x m
  std::vector<ChannelSaturation> channels;  ///< one per bounded control

  bool empty() const { return channels.empty(); }
};

/// Flags (t, j) as saturated when the control's slack to the nearer bound is
/// below threshold_frac of the box width, and tabulates feedback row norms.
inline SaturationReport saturation_report(const Trajectory& traj, const GainSchedule& gs,
                                          const BoxSpec& box, double threshold_frac = 0.01) {
  SaturationReport rep;
  rep.threshold_frac = threshold_frac;
  const int T = gs.horizon();
  const int m = box.control_dim();
  rep.gain_row_norms = Matrix::Zero(T, m);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < m; ++j) rep.gain_row_norms(t, j) = gs.K[t].row(j).norm();
  }
  for (int j : box.constrained_control_indices()) {
    ChannelSaturation ch;
    ch.channel = j;
    const double lo = box.u_lower()(j);
    const double hi = box.u_upper()(j);
    for (int t = 0; t < T; ++t) {
      const double norm = rep.gain_row_norms(t, j);
      ch.peak_row_norm = std::max(ch.peak_row_norm, norm);
      if (slack_fraction(traj.controls[t](j), lo, hi) < threshold_frac) {
        ch.saturated_steps.push_back(t);
        ch.saturated_max_norm = std::max(ch.saturated_max_norm, norm);
      }
    }
    rep.channels.push_back(std::move(ch));
  }
  return rep;
}

/// Consecutive runs [first, last] of saturated steps, for shading plots.
inline std::vector<std::pair<int, int>> saturated_intervals(const std::vector<int>& steps) {
  std::vector<std::pair<int, int>> out;
  for (int t : steps) {
    if (!out.empty() && out.back().second + 1 == t) {
      out.back().second = t;
    } else {
      out.emplace_back(t, t);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Independent finite-horizon LQR
// ---------------------------------------------------------------------------

/// x_{t+1} = A x_t + B u_t with cost sum 1/2 x'Qx + 1/2 u'Ru + 1/2 x_T'Qf x_T.
struct LinearQuadraticProblem {
  Matrix A, B, Q, R, Qf;
  int horizon = 1;
};

/**
 * Textbook discrete Riccati recursion, written without reference to
 * backward_pass:
 *   P_T = Qf,  K_t = -(R + B'P B)^{-1} B'P A,  P_t = Q + A'P (A + B K_t).
 * Fills K and S (= P); feedforward terms and value gradients are zero.
 */
inline GainSchedule lqr_oracle(const LinearQuadraticProblem& lq) {
  const int T = lq.horizon;
  const auto n = lq.A.rows();
  const auto m = lq.B.cols();
  GainSchedule gs;
  gs.k.assign(T, Vector::Zero(m));
  gs.K.assign(T, Matrix::Zero(m, n));
  gs.v.assign(T + 1, Vector::Zero(n));
  gs.S.assign(T + 1, Matrix::Zero(n, n));
  gs.S[T] = lq.Qf;
  for (int t = T - 1; t >= 0; --t) {
    const Matrix& P = gs.S[t + 1];
    const Matrix gram = lq.R + lq.B.transpose() * P * lq.B;
    gs.K[t] = -gram.fullPivLu().solve(lq.B.transpose() * P * lq.A);
    const Matrix next = lq.Q + lq.A.transpose() * P * (lq.A + lq.B * gs.K[t]);
    gs.S[t] = 0.5 * (next + next.transpose());
  }
  return gs;
}

/// Problem wrapper for an LQ instance: discrete-map dynamics, zero goal,
/// unbounded box, unit stage scale.
inline Problem to_problem(const LinearQuadraticProblem& lq, const Vector& x0) {
  auto model = std::make_shared<LinearModel>(lq.A, lq.B);
  const auto n = static_cast<int>(lq.A.rows());
  const auto m = static_cast<int>(lq.B.cols());
  return {DiscreteDynamics(model, 1.0, lq.horizon, Integrator::kDiscreteMap),
          {lq.Q, lq.R, lq.Qf, Vector::Zero(n), 1.0},
          BoxSpec::unbounded(n, m),
          x0};
}

/// max over entries of |a - b| / max(|a|, |b|, floor).
inline double max_relative_error(const Matrix& a, const Matrix& b, double floor = 1e-8) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_relative_error: shape mismatch");
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double denom = std::max({std::abs(a(i, j)), std::abs(b(i, j)), floor});
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / denom);
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Finite-difference checks
// ---------------------------------------------------------------------------

using VectorMap = std::function<Vector(const Vector&)>;

/// Central-difference Jacobian with h = 1e-6 (1 + |x_i|).
inline Matrix central_difference(const VectorMap& f, const Vector& point) {
  const Vector f0 = f(point);
  Matrix jac(f0.size(), point.size());
  Vector xp = point, xm = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(point(i)));
    xp(i) = point(i) + h;
    xm(i) = point(i) - h;
    jac.col(i) = (f(xp) - f(xm)) / (2.0 * h);
    xp(i) = xm(i) = point(i);
  }
  return jac;
}

/// Largest element-wise relative error between `analytic` and the
/// central-difference derivative of f at `point` (denominator floored at
/// 1e-8). Scalar maps return a 1-vector; `analytic` is then a 1 x n row.
inline double fd_check(const VectorMap& f, const Vector& point, const Matrix& analytic) {
  return max_relative_error(analytic, central_difference(f, point), 1e-8);
}

inline double fd_check(const std::function<double(const Vector&)>& f, const Vector& point,
                       const Vector& gradient) {
  VectorMap wrapped = [&f](const Vector& x) { return Vector::Constant(1, f(x)); };
  return fd_check(wrapped, point, Matrix(gradient.transpose()));
}

// ---------------------------------------------------------------------------
// Barrier regularization and state-boundary feedback diagnostics
// ---------------------------------------------------------------------------

inline double min_eigenvalue(const Matrix& sym) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

/// Per step, the smallest eigenvalue of Q_uu with the given barrier weights
/// and with the same layout zeroed, at the same nominal.
struct ControlHessianComparison {
  std::vector<double> with_barrier;
  std::vector<double> without_barrier;
};

inline ControlHessianComparison compare_control_hessians(const Problem& p,
                                                         const Trajectory& nominal,
                                                         const BarrierState& bs) {
  const GainSchedule with = backward_pass(p, nominal, bs);
  const GainSchedule without = backward_pass(p, nominal, bs.zeroed());
  ControlHessianComparison out;
  for (int t = 0; t < p.horizon(); ++t) {
    out.with_barrier.push_back(min_eigenvalue(with.Quu[t]));
    out.without_barrier.push_back(min_eigenvalue(without.Quu[t]));
  }
  return out;
}

/// |e_i' F_u(t) K_t|: how strongly the feedback correction at t moves state
/// component i at t+1, evaluated along `traj`.
inline std::vector<double> state_feedback_influence(const Problem& p, const Trajectory& traj,
                                                    const GainSchedule& gs, int state_index) {
  std::vector<double> out;
  out.reserve(p.horizon());
  for (int t = 0; t < p.horizon(); ++t) {
    const Jacobians jac = p.dynamics.jacobians(traj.states[t], traj.controls[t], t);
    out.push_back((jac.fu.row(state_index) * gs.K[t]).norm());
  }
  return out;
}

/// Steps t whose successor state component i sits within threshold_frac of
/// the box width from a bound.
inline std::vector<int> state_boundary_steps(const Problem& p, const Trajectory& traj,
                                             int state_index, double threshold_frac) {
  std::vector<int> out;
  const double lo = p.box.x_lower()(state_index);
  const double hi = p.box.x_upper()(state_index);
  for (int t = 0; t < p.horizon(); ++t) {
    if (slack_fraction(traj.states[t + 1](state_index), lo, hi) < threshold_frac) out.push_back(t);
  }
  return out;
}

}  // namespace boxilqr

#endif  // BOX_ILQR_ANALYSIS_HPP
