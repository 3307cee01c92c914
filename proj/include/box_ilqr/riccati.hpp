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

#ifndef BOX_ILQR_RICCATI_HPP
#define BOX_ILQR_RICCATI_HPP

#include "box_ilqr/problem.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace boxilqr {

/// Raised when Q_uu + zeta I cannot be Cholesky-factored even at zeta_max.
class NonPositiveDefinite : public std::runtime_error {
 public:
  NonPositiveDefinite(int time_index, double zeta)
      : std::runtime_error("Q_uu + zeta I is not positive definite at t=" +
                           std::to_string(time_index) + " (zeta=" + std::to_string(zeta) + ")"),
        time_index_(time_index) {}

  int time_index() const { return time_index_; }

 private:
  int time_index_;
};

/// Levenberg-style shift added to Q_uu. Starts at zero; grows by `growth`
/// (at least to zeta_min) each time a factorization fails.
struct Regularization {
  double zeta = 0.0;
  double zeta_min = 1e-6;
  double zeta_max = 1e8;
  double growth = 10.0;

  /// Next shift after a failed factorization; false once past zeta_max.
  bool increase() {
    zeta = std::max(zeta_min, zeta * growth);
    return zeta <= zeta_max;
  }
};

/**
 * @brief Affine policy and local value function from one backward pass.
 *
 * Control law: u = u_bar + alpha k_t + K_t (x - x_bar). The value function is
 * approximated by its gradient v_t and Hessian S_t. Q_uu keeps the
 * unregularized control Hessian per step for diagnostics.
 */
struct GainSchedule {
  std::vector<Vector> k;
  std::vector<Matrix> K;
  std::vector<Vector> v;
  std::vector<Matrix> S;
  std::vector<Matrix> Quu;
  double expected_reduction_sum = 0.0;
  double zeta = 0.0;

  int horizon() const { return static_cast<int>(k.size()); }
};

/// Predicted change in cost for step size alpha; never positive.
inline double expected_reduction(const GainSchedule& gs, double alpha) {
  return -(alpha - 0.5 * alpha * alpha) * gs.expected_reduction_sum;
}

namespace detail {

// One attempt at the recursion with a fixed shift; returns false (and the
// failing step) when a factorization fails.
inline bool backward_sweep(const Problem& p, const std::vector<CostDerivatives>& stage,
                           const std::vector<Jacobians>& jac, const CostDerivatives& terminal,
                           double zeta, GainSchedule& gs, int& failed_at) {
  const int T = p.horizon();
  const int m = p.control_dim();
  gs.k.assign(T, Vector());
  gs.K.assign(T, Matrix());
  gs.v.assign(T + 1, Vector());
  gs.S.assign(T + 1, Matrix());
  gs.Quu.assign(T, Matrix());
  gs.expected_reduction_sum = 0.0;
  gs.zeta = zeta;

  gs.v[T] = terminal.cx;
  gs.S[T] = terminal.cxx;

  for (int t = T - 1; t >= 0; --t) {
    const CostDerivatives& c = stage[t];
    const Matrix& fx = jac[t].fx;
    const Matrix& fu = jac[t].fu;
    const Vector& v_next = gs.v[t + 1];
    const Matrix& s_next = gs.S[t + 1];

    const Matrix s_fx = s_next * fx;
    const Matrix s_fu = s_next * fu;
    const Vector qx = c.cx + fx.transpose() * v_next;
    const Vector qu = c.cu + fu.transpose() * v_next;
    const Matrix qxx = c.cxx + fx.transpose() * s_fx;
    Matrix quu = c.cuu + fu.transpose() * s_fu;
    quu = 0.5 * (quu + quu.transpose());
    const Matrix qux = c.cux + fu.transpose() * s_fx;

    const Matrix quu_reg = quu + zeta * Matrix::Identity(m, m);
    Eigen::LLT<Matrix> llt(quu_reg);
    if (llt.info() != Eigen::Success) {
      failed_at = t;
      return false;
    }
    Vector k = -llt.solve(qu);
    Matrix K = -llt.solve(qux);

    gs.expected_reduction_sum += -qu.dot(k);

    const Matrix Kt = K.transpose();
    gs.v[t] = qx + Kt * (quu * k) + Kt * qu + qux.transpose() * k;
    Matrix s = qxx + Kt * quu * K + Kt * qux + qux.transpose() * K;
    gs.S[t] = 0.5 * (s + s.transpose());
    gs.k[t] = std::move(k);
    gs.K[t] = std::move(K);
    gs.Quu[t] = std::move(quu);
  }
  return true;
}

}  // namespace detail

/**
 * Backward pass around `nominal` at barrier weights `bs`.
 *
 * Retries with a growing shift when Q_uu + zeta I is not positive definite;
 * throws NonPositiveDefinite past reg.zeta_max. Throws InfeasiblePoint if
 * the nominal is not strictly inside the box.
 */
inline GainSchedule backward_pass(const Problem& p, const Trajectory& nominal,
                                  const BarrierState& bs, Regularization reg = {}) {
  const int T = p.horizon();
  if (nominal.horizon() != T || static_cast<int>(nominal.states.size()) != T + 1) {
    throw std::invalid_argument("backward_pass: nominal trajectory has the wrong horizon");
  }
  std::vector<CostDerivatives> stage;
  std::vector<Jacobians> jac;
  stage.reserve(T);
  jac.reserve(T);
  for (int t = 0; t < T; ++t) {
    stage.push_back(stage_cost_derivatives(p.cost, p.box, bs, nominal.states[t], nominal.controls[t]));
    jac.push_back(p.dynamics.jacobians(nominal.states[t], nominal.controls[t], t));
  }
  const CostDerivatives terminal = terminal_cost_derivatives(p.cost, p.box, bs, nominal.states[T]);

  GainSchedule gs;
  int failed_at = -1;
  while (!detail::backward_sweep(p, stage, jac, terminal, reg.zeta, gs, failed_at)) {
    if (!reg.increase()) throw NonPositiveDefinite(failed_at, reg.zeta);
  }
  return gs;
}

}  // namespace boxilqr

#endif  // BOX_ILQR_RICCATI_HPP
