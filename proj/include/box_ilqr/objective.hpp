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

#ifndef BOX_ILQR_OBJECTIVE_HPP
#define BOX_ILQR_OBJECTIVE_HPP

#include "box_ilqr/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace boxilqr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/**
 * @brief Per-component lower/upper bounds on states and controls.
 *
 * Infinite bounds are allowed. A component is "constrained" iff at least one
 * of its bounds is finite; only constrained components carry a barrier term.
 * The order of constrained_state_indices / constrained_control_indices fixes
 * the layout of the barrier parameter vectors.
 */
class BoxSpec {
 public:
  BoxSpec() = default;

  BoxSpec(Vector x_lower, Vector x_upper, Vector u_lower, Vector u_upper)
      : x_lower_(std::move(x_lower)),
        x_upper_(std::move(x_upper)),
        u_lower_(std::move(u_lower)),
        u_upper_(std::move(u_upper)) {
    if (x_lower_.size() != x_upper_.size() || u_lower_.size() != u_upper_.size()) {
      throw std::invalid_argument("BoxSpec: lower/upper bound lengths differ");
    }
    collect(x_lower_, x_upper_, "x", state_idx_);
    collect(u_lower_, u_upper_, "u", control_idx_);
  }

  static BoxSpec unbounded(int n, int m) {
    return BoxSpec(Vector::Constant(n, -kInf), Vector::Constant(n, kInf),
                   Vector::Constant(m, -kInf), Vector::Constant(m, kInf));
  }

  const Vector& x_lower() const { return x_lower_; }
  const Vector& x_upper() const { return x_upper_; }
  const Vector& u_lower() const { return u_lower_; }
  const Vector& u_upper() const { return u_upper_; }
  const std::vector<int>& constrained_state_indices() const { return state_idx_; }
  const std::vector<int>& constrained_control_indices() const { return control_idx_; }
  int num_constrained_states() const { return static_cast<int>(state_idx_.size()); }
  int num_constrained_controls() const { return static_cast<int>(control_idx_.size()); }
  int state_dim() const { return static_cast<int>(x_lower_.size()); }
  int control_dim() const { return static_cast<int>(u_lower_.size()); }
  bool empty() const { return state_idx_.empty() && control_idx_.empty(); }

 private:
  static void collect(const Vector& lo, const Vector& hi, const char* what,
                      std::vector<int>& out) {
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      if (std::isnan(lo(i)) || std::isnan(hi(i))) {
        throw std::invalid_argument(std::string("BoxSpec: NaN bound on ") + what);
      }
      if (std::isinf(lo(i)) && std::isinf(hi(i))) {
        if (lo(i) > 0 || hi(i) < 0) {
          throw std::invalid_argument(std::string("BoxSpec: empty box on ") + what +
                                      std::to_string(i + 1));
        }
        continue;
      }
      if (!(lo(i) < hi(i))) {
        throw std::invalid_argument(std::string("BoxSpec: ") + what + "_lower[" +
                                    std::to_string(i) + "] must be < " + what + "_upper[" +
                                    std::to_string(i) + "]");
      }
      out.push_back(static_cast<int>(i));
    }
  }

  Vector x_lower_, x_upper_, u_lower_, u_upper_;
  std::vector<int> state_idx_, control_idx_;
};

/// C = s [1/2 (x-g)' Q (x-g) + 1/2 u' R u] and Phi = 1/2 (x-g)' Qf (x-g),
/// where s = stage_scale. Benchmarks set s = dt so that C integrates the
/// continuous running cost over one interval.
struct QuadraticCost {
  Matrix Q;
  Matrix R;
  Matrix Qf;
  Vector goal;
  double stage_scale = 1.0;
};

inline void validate(const QuadraticCost& qc) {
  const auto n = qc.goal.size();
  if (qc.Q.rows() != n || qc.Q.cols() != n || qc.Qf.rows() != n || qc.Qf.cols() != n) {
    throw std::invalid_argument("QuadraticCost: Q and Qf must be n x n with n = goal size");
  }
  if (qc.R.rows() != qc.R.cols()) throw std::invalid_argument("QuadraticCost: R must be square");
  if (qc.Q != qc.Q.transpose() || qc.Qf != qc.Qf.transpose() || qc.R != qc.R.transpose()) {
    throw std::invalid_argument("QuadraticCost: weights must be symmetric");
  }
  if (!(qc.stage_scale > 0.0)) throw std::invalid_argument("QuadraticCost: stage_scale must be positive");
  if (Eigen::LLT<Matrix>(qc.R).info() != Eigen::Success) {
    throw std::invalid_argument("QuadraticCost: R must be positive definite");
  }
}

/// Barrier weights (mu on constrained states, sigma on constrained
/// controls) and their per-component reduction factors.
struct BarrierState {
  Vector mu;
  Vector sigma;
  Vector r_mu;
  Vector r_sigma;

  static BarrierState uniform(const BoxSpec& box, double mu0, double sigma0, double r_mu0,
                              double r_sigma0) {
    const int n1 = box.num_constrained_states();
    const int m1 = box.num_constrained_controls();
    return {Vector::Constant(n1, mu0), Vector::Constant(m1, sigma0), Vector::Constant(n1, r_mu0),
            Vector::Constant(m1, r_sigma0)};
  }

  /// Same layout with every weight zeroed; evaluates the barrier-free cost.
  BarrierState zeroed() const {
    return {Vector::Zero(mu.size()), Vector::Zero(sigma.size()), r_mu, r_sigma};
  }

  /// Max-norm over both weight vectors (0 when there are none).
  double max_weight() const {
    double m = 0.0;
    if (mu.size() > 0) m = std::max(m, mu.cwiseAbs().maxCoeff());
    if (sigma.size() > 0) m = std::max(m, sigma.cwiseAbs().maxCoeff());
    return m;
  }
};

/// Value, gradient and Hessian blocks of a stage (or terminal) cost.
struct CostDerivatives {
  double value = 0.0;
  Vector cx;
  Vector cu;
  Matrix cxx;
  Matrix cuu;
  Matrix cux;

  static CostDerivatives zero(int n, int m) {
    return {0.0,          Vector::Zero(n),    Vector::Zero(m),
            Matrix::Zero(n, n), Matrix::Zero(m, m), Matrix::Zero(m, n)};
  }
};

inline double stage_cost(const QuadraticCost& qc, const Vector& x, const Vector& u) {
  const Vector dx = x - qc.goal;
  return qc.stage_scale * (0.5 * dx.dot(qc.Q * dx) + 0.5 * u.dot(qc.R * u));
}

inline double terminal_cost(const QuadraticCost& qc, const Vector& x) {
  const Vector dx = x - qc.goal;
  return 0.5 * dx.dot(qc.Qf * dx);
}

namespace detail {

// Slacks to both sides of component i; throws when either is not positive.
inline std::pair<double, double> slacks(double v, double lo, double hi, VariableKind kind,
                                        int i) {
  const double below = v - lo;
  const double above = hi - v;
  if (!(below > 0.0)) throw InfeasiblePoint(kind, i, BoundSide::kLower);
  if (!(above > 0.0)) throw InfeasiblePoint(kind, i, BoundSide::kUpper);
  return {below, above};
}

// -w (log(v - lo) + log(hi - v)); an infinite side contributes nothing.
inline double log_barrier(double w, double v, double lo, double hi, VariableKind kind, int i) {
  const auto [below, above] = slacks(v, lo, hi, kind, i);
  double acc = 0.0;
  if (std::isfinite(lo)) acc += std::log(below);
  if (std::isfinite(hi)) acc += std::log(above);
  return -w * acc;
}

inline void add_barrier_terms(double w, double v, double lo, double hi, VariableKind kind, int i,
                              double& grad, double& hess) {
  const auto [below, above] = slacks(v, lo, hi, kind, i);
  const double inv_lo = std::isfinite(lo) ? 1.0 / below : 0.0;
  const double inv_hi = std::isfinite(hi) ? 1.0 / above : 0.0;
  grad += -w * (inv_lo - inv_hi);
  hess += w * (inv_lo * inv_lo + inv_hi * inv_hi);
}

}  // namespace detail

/// Barrier on the constrained state components only (the terminal barrier).
inline double state_barrier(const BoxSpec& box, const Vector& mu, const Vector& x) {
  double acc = 0.0;
  const auto& idx = box.constrained_state_indices();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const int i = idx[k];
    acc += detail::log_barrier(mu(static_cast<Eigen::Index>(k)), x(i), box.x_lower()(i),
                               box.x_upper()(i), VariableKind::kState, i);
  }
  return acc;
}

inline double control_barrier(const BoxSpec& box, const Vector& sigma, const Vector& u) {
  double acc = 0.0;
  const auto& idx = box.constrained_control_indices();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const int j = idx[k];
    acc += detail::log_barrier(sigma(static_cast<Eigen::Index>(k)), u(j), box.u_lower()(j),
                               box.u_upper()(j), VariableKind::kControl, j);
  }
  return acc;
}

/// Running barrier: state terms weighted by mu plus control terms by sigma.
inline double barrier_running(const BoxSpec& box, const BarrierState& bs, const Vector& x,
                              const Vector& u) {
  return state_barrier(box, bs.mu, x) + control_barrier(box, bs.sigma, u);
}

/// Derivatives of barrier_running(). The Hessian blocks are diagonal and the
/// cross term is zero.
inline CostDerivatives barrier_derivatives(const BoxSpec& box, const BarrierState& bs,
                                           const Vector& x, const Vector& u) {
  const auto n = static_cast<int>(x.size());
  const auto m = static_cast<int>(u.size());
  CostDerivatives d = CostDerivatives::zero(n, m);
  d.value = barrier_running(box, bs, x, u);
  const auto& xi = box.constrained_state_indices();
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const int i = xi[k];
    detail::add_barrier_terms(bs.mu(static_cast<Eigen::Index>(k)), x(i), box.x_lower()(i),
                              box.x_upper()(i), VariableKind::kState, i, d.cx(i), d.cxx(i, i));
  }
  const auto& ui = box.constrained_control_indices();
  for (std::size_t k = 0; k < ui.size(); ++k) {
    const int j = ui[k];
    detail::add_barrier_terms(bs.sigma(static_cast<Eigen::Index>(k)), u(j), box.u_lower()(j),
                              box.u_upper()(j), VariableKind::kControl, j, d.cu(j), d.cuu(j, j));
  }
  return d;
}

/// Quadratic stage cost plus running barrier, with all derivatives.
inline CostDerivatives stage_cost_derivatives(const QuadraticCost& qc, const BoxSpec& box,
                                              const BarrierState& bs, const Vector& x,
                                              const Vector& u) {
  CostDerivatives d = barrier_derivatives(box, bs, x, u);
  const Vector dx = x - qc.goal;
  d.value += stage_cost(qc, x, u);
  const double s = qc.stage_scale;
  d.cx += s * (qc.Q * dx);
  d.cu += s * (qc.R * u);
  d.cxx += s * qc.Q;
  d.cuu += s * qc.R;
  return d;
}

/// Phi(xT) + Omega(xT); seeds the value function at the final step.
inline CostDerivatives terminal_cost_derivatives(const QuadraticCost& qc, const BoxSpec& box,
                                                 const BarrierState& bs, const Vector& xT) {
  const auto n = static_cast<int>(xT.size());
  CostDerivatives d = CostDerivatives::zero(n, 0);
  const Vector dx = xT - qc.goal;
  d.value = terminal_cost(qc, xT) + state_barrier(box, bs.mu, xT);
  d.cx = qc.Qf * dx;
  d.cxx = qc.Qf;
  const auto& xi = box.constrained_state_indices();
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const int i = xi[k];
    detail::add_barrier_terms(bs.mu(static_cast<Eigen::Index>(k)), xT(i), box.x_lower()(i),
                              box.x_upper()(i), VariableKind::kState, i, d.cx(i), d.cxx(i, i));
  }
  return d;
}

/// Sum over t of [C + omega] plus Phi + Omega. The multiplier term of the
/// Lagrangian vanishes on rolled-out trajectories and is not evaluated.
inline double augmented_cost(const QuadraticCost& qc, const BoxSpec& box, const BarrierState& bs,
                             std::span<const Vector> states, std::span<const Vector> controls) {
  if (states.size() != controls.size() + 1) {
    throw std::invalid_argument("augmented_cost: expected T+1 states and T controls");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < controls.size(); ++t) {
    total += stage_cost(qc, states[t], controls[t]) +
             barrier_running(box, bs, states[t], controls[t]);
  }
  const Vector& xT = states.back();
  return total + terminal_cost(qc, xT) + state_barrier(box, bs.mu, xT);
}

/// First constrained component of (x, u) that is not strictly inside its box.
struct Violation {
  VariableKind kind;
  int index;
  BoundSide side;
};

inline std::optional<Violation> first_violation(const BoxSpec& box, const Vector* x,
                                                const Vector* u) {
  if (x) {
    for (int i : box.constrained_state_indices()) {
      if (!((*x)(i) > box.x_lower()(i))) return Violation{VariableKind::kState, i, BoundSide::kLower};
      if (!((*x)(i) < box.x_upper()(i))) return Violation{VariableKind::kState, i, BoundSide::kUpper};
    }
  }
  if (u) {
    for (int j : box.constrained_control_indices()) {
      if (!((*u)(j) > box.u_lower()(j))) return Violation{VariableKind::kControl, j, BoundSide::kLower};
      if (!((*u)(j) < box.u_upper()(j))) return Violation{VariableKind::kControl, j, BoundSide::kUpper};
    }
  }
  return std::nullopt;
}

/// Distance to the nearest bound divided by the box width (infinite when a
/// side is unbounded).
inline double slack_fraction(double v, double lo, double hi) {
  const double width = hi - lo;
  if (!std::isfinite(width)) {
    if (std::isfinite(lo)) return (v - lo) > 0 ? kInf : 0.0;
    if (std::isfinite(hi)) return (hi - v) > 0 ? kInf : 0.0;
    return kInf;
  }
  return std::min(v - lo, hi - v) / width;
}

}  // namespace boxilqr

#endif  // BOX_ILQR_OBJECTIVE_HPP
