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

#ifndef BOX_ILQR_MODEL_HPP
#define BOX_ILQR_MODEL_HPP

#include "box_ilqr/types.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace boxilqr {

/**
 * @brief Time-invariant or time-varying dynamics x' = f(x, u, t).
 *
 * Depending on the integrator chosen by DiscreteDynamics, rhs() is either a
 * continuous-time derivative or the discrete map itself. Implementations must
 * be deterministic and free of mutable state.
 */
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  virtual std::string name() const = 0;
  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;

  virtual Vector rhs(const Vector& x, const Vector& u, double t) const = 0;

  /// Analytic partials of rhs(). Returns false when the model does not
  /// provide them, in which case callers fall back to finite differences.
  virtual bool rhs_jacobians(const Vector& /*x*/, const Vector& /*u*/, double /*t*/,
                             Matrix& /*fx*/, Matrix& /*fu*/) const {
    return false;
  }

  virtual std::map<std::string, double> physical_params() const { return {}; }
};

/// Fixed-step scheme applied over each interval with the control held.
enum class Integrator {
  kRk4,          ///< classical 4th-order Runge-Kutta on a continuous rhs
  kDiscreteMap,  ///< rhs already is x_{t+1}; no integration
};

/// Partials of the discrete step with respect to state and control.
struct Jacobians {
  Matrix fx;  ///< n x n
  Matrix fu;  ///< n x m
};

/**
 * @brief Zero-order-hold discretization of a DynamicsModel on a uniform grid.
 *
 * The horizon T and interval dt satisfy T * dt = t_f. Copies share the
 * underlying (immutable) model.
 */
class DiscreteDynamics {
 public:
  DiscreteDynamics(std::shared_ptr<const DynamicsModel> model, double dt, int horizon,
                   Integrator integrator = Integrator::kRk4)
      : model_(std::move(model)), dt_(dt), horizon_(horizon), integrator_(integrator) {
    if (!model_) throw std::invalid_argument("DiscreteDynamics: null model");
    if (!(dt_ > 0.0)) throw std::invalid_argument("DiscreteDynamics: dt must be positive");
    if (horizon_ <= 0) throw std::invalid_argument("DiscreteDynamics: horizon must be positive");
  }

  /// Builds the grid from a final time; the horizon is t_f / dt rounded.
  static DiscreteDynamics from_final_time(std::shared_ptr<const DynamicsModel> model,
                                          double t_final, double dt,
                                          Integrator integrator = Integrator::kRk4) {
    if (!(dt > 0.0) || !(t_final > 0.0)) {
      throw std::invalid_argument("DiscreteDynamics: t_final and dt must be positive");
    }
    const auto horizon = static_cast<int>(std::lround(t_final / dt));
    if (horizon <= 0 || std::abs(horizon * dt - t_final) > 1e-9 * t_final) {
      throw std::invalid_argument("DiscreteDynamics: t_final is not a multiple of dt");
    }
    return DiscreteDynamics(std::move(model), dt, horizon, integrator);
  }

  const DynamicsModel& model() const { return *model_; }
  std::shared_ptr<const DynamicsModel> model_ptr() const { return model_; }
  int state_dim() const { return model_->state_dim(); }
  int control_dim() const { return model_->control_dim(); }
  double dt() const { return dt_; }
  int horizon() const { return horizon_; }
  double final_time() const { return dt_ * horizon_; }
  Integrator integrator() const { return integrator_; }

  /// x_{t+1} from x_t under control u held over [t dt, (t+1) dt).
  Vector step(const Vector& x, const Vector& u, int t) const {
    Vector next = raw_step(x, u, t);
    if (!next.allFinite()) throw StepFailure(t);
    return next;
  }

  /// Partials of step(). Analytic when the model supplies rhs partials,
  /// otherwise central differences with h = 1e-6 (1 + |component|).
  Jacobians jacobians(const Vector& x, const Vector& u, int t) const {
    const int n = state_dim();
    const int m = control_dim();
    Matrix a(n, n), b(n, m);
    if (integrator_ == Integrator::kDiscreteMap) {
      if (model_->rhs_jacobians(x, u, t * dt_, a, b)) return {std::move(a), std::move(b)};
      return finite_difference_jacobians(x, u, t);
    }
    if (!model_->rhs_jacobians(x, u, t * dt_, a, b)) return finite_difference_jacobians(x, u, t);

    // Differentiate the RK4 stages through the chain rule.
    const double h = dt_;
    const double t0 = t * dt_;
    const Vector k1 = model_->rhs(x, u, t0);
    const Matrix k1x = a;
    const Matrix k1u = b;

    const Vector x2 = x + 0.5 * h * k1;
    model_->rhs_jacobians(x2, u, t0 + 0.5 * h, a, b);
    const Vector k2 = model_->rhs(x2, u, t0 + 0.5 * h);
    const Matrix k2x = a + 0.5 * h * a * k1x;
    const Matrix k2u = a * (0.5 * h * k1u) + b;

    const Vector x3 = x + 0.5 * h * k2;
    model_->rhs_jacobians(x3, u, t0 + 0.5 * h, a, b);
    const Matrix k3x = a + 0.5 * h * a * k2x;
    const Matrix k3u = a * (0.5 * h * k2u) + b;

    const Vector x4 = x + h * model_->rhs(x3, u, t0 + 0.5 * h);  // x + h k3
    model_->rhs_jacobians(x4, u, t0 + h, a, b);
    const Matrix k4x = a + h * a * k3x;
    const Matrix k4u = a * (h * k3u) + b;

    Jacobians jac;
    jac.fx = Matrix::Identity(n, n) + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    jac.fu = (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    return jac;
  }

  Jacobians finite_difference_jacobians(const Vector& x, const Vector& u, int t) const {
    const int n = state_dim();
    const int m = control_dim();
    Jacobians jac{Matrix(n, n), Matrix(n, m)};
    Vector xp = x, xm = x;
    for (int i = 0; i < n; ++i) {
      const double h = 1e-6 * (1.0 + std::abs(x(i)));
      xp(i) = x(i) + h;
      xm(i) = x(i) - h;
      jac.fx.col(i) = (raw_step(xp, u, t) - raw_step(xm, u, t)) / (2.0 * h);
      xp(i) = xm(i) = x(i);
    }
    Vector up = u, um = u;
    for (int j = 0; j < m; ++j) {
      const double h = 1e-6 * (1.0 + std::abs(u(j)));
      up(j) = u(j) + h;
      um(j) = u(j) - h;
      jac.fu.col(j) = (raw_step(x, up, t) - raw_step(x, um, t)) / (2.0 * h);
      up(j) = um(j) = u(j);
    }
    return jac;
  }

 private:
  Vector raw_step(const Vector& x, const Vector& u, int t) const {
    const double t0 = t * dt_;
    if (integrator_ == Integrator::kDiscreteMap) return model_->rhs(x, u, t0);
    const double h = dt_;
    const Vector k1 = model_->rhs(x, u, t0);
    const Vector k2 = model_->rhs(x + 0.5 * h * k1, u, t0 + 0.5 * h);
    const Vector k3 = model_->rhs(x + 0.5 * h * k2, u, t0 + 0.5 * h);
    const Vector k4 = model_->rhs(x + h * k3, u, t0 + h);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  std::shared_ptr<const DynamicsModel> model_;
  double dt_;
  int horizon_;
  Integrator integrator_;
};

// ---------------------------------------------------------------------------
// Benchmark systems. Angles are measured from the hanging-down position and
// are not wrapped.
// ---------------------------------------------------------------------------

/// Damped point-mass pendulum, state [theta, theta_dot], torque input.
class Pendulum final : public DynamicsModel {
 public:
  struct Params {
    double mass = 0.5;      // kg
    double length = 0.5;    // m
    double gravity = 9.81;  // m/s^2
    double damping = 0.01;  // N m s
  };

  Pendulum() = default;
  explicit Pendulum(Params p) : p_(p) {}

  std::string name() const override { return "pendulum"; }
  int state_dim() const override { return 2; }
  int control_dim() const override { return 1; }

  Vector rhs(const Vector& x, const Vector& u, double) const override {
    const double inertia = p_.mass * p_.length * p_.length;
    Vector dx(2);
    dx << x(1), (u(0) - p_.damping * x(1) - p_.mass * p_.gravity * p_.length * std::sin(x(0))) /
                    inertia;
    return dx;
  }

  bool rhs_jacobians(const Vector& x, const Vector&, double, Matrix& fx,
                     Matrix& fu) const override {
    const double inertia = p_.mass * p_.length * p_.length;
    fx.resize(2, 2);
    fu.resize(2, 1);
    fx << 0.0, 1.0, -p_.gravity / p_.length * std::cos(x(0)), -p_.damping / inertia;
    fu << 0.0, 1.0 / inertia;
    return true;
  }

  std::map<std::string, double> physical_params() const override {
    return {{"mass", p_.mass}, {"length", p_.length}, {"gravity", p_.gravity},
            {"damping", p_.damping}};
  }

 private:
  Params p_;
};

/// Cart with a point-mass pole, state [x, x_dot, theta, theta_dot], force on
/// the cart. Frictionless.
class CartPole final : public DynamicsModel {
 public:
  struct Params {
    double cart_mass = 1.0;
    double pole_mass = 0.1;
    double pole_length = 0.5;
    double gravity = 9.81;
  };

  CartPole() = default;
  explicit CartPole(Params p) : p_(p) {}

  std::string name() const override { return "cartpole"; }
  int state_dim() const override { return 4; }
  int control_dim() const override { return 1; }

  Vector rhs(const Vector& x, const Vector& u, double) const override {
    const double mc = p_.cart_mass, mp = p_.pole_mass, l = p_.pole_length, g = p_.gravity;
    const double s = std::sin(x(2)), c = std::cos(x(2)), w = x(3);
    const double d = mc + mp * s * s;
    Vector dx(4);
    dx(0) = x(1);
    dx(1) = (u(0) + mp * s * (l * w * w + g * c)) / d;
    dx(2) = w;
    dx(3) = (-u(0) * c - mp * l * w * w * c * s - (mc + mp) * g * s) / (l * d);
    return dx;
  }

  bool rhs_jacobians(const Vector& x, const Vector& u, double, Matrix& fx,
                     Matrix& fu) const override {
    const double mc = p_.cart_mass, mp = p_.pole_mass, l = p_.pole_length, g = p_.gravity;
    const double s = std::sin(x(2)), c = std::cos(x(2)), w = x(3);
    const double d = mc + mp * s * s;
    const double dd = 2.0 * mp * s * c;

    const double n1 = u(0) + mp * s * (l * w * w + g * c);
    const double n1_th = mp * (c * l * w * w + g * (c * c - s * s));
    const double n2 = -u(0) * c - mp * l * w * w * c * s - (mc + mp) * g * s;
    const double n2_th = u(0) * s - mp * l * w * w * (c * c - s * s) - (mc + mp) * g * c;

    fx = Matrix::Zero(4, 4);
    fu = Matrix::Zero(4, 1);
    fx(0, 1) = 1.0;
    fx(1, 2) = (n1_th * d - n1 * dd) / (d * d);
    fx(1, 3) = 2.0 * mp * s * l * w / d;
    fx(2, 3) = 1.0;
    fx(3, 2) = (n2_th * d - n2 * dd) / (l * d * d);
    fx(3, 3) = -2.0 * mp * w * c * s / d;
    fu(1, 0) = 1.0 / d;
    fu(3, 0) = -c / (l * d);
    return true;
  }

  std::map<std::string, double> physical_params() const override {
    return {{"cart_mass", p_.cart_mass}, {"pole_mass", p_.pole_mass},
            {"pole_length", p_.pole_length}, {"gravity", p_.gravity}};
  }

 private:
  Params p_;
};

/// Two-link acrobot actuated at the elbow. State [theta1, theta2, theta1_dot,
/// theta2_dot]; theta1 from the downward vertical, theta2 relative to link 1.
/// Uniform rods with centers of mass at mid-link.
class Acrobot final : public DynamicsModel {
 public:
  struct Params {
    double m1 = 1.0, m2 = 1.0;
    double l1 = 1.0, l2 = 1.0;
    double gravity = 9.81;
  };

  Acrobot() = default;
  explicit Acrobot(Params p) : p_(p) {}

  std::string name() const override { return "acrobot"; }
  int state_dim() const override { return 4; }
  int control_dim() const override { return 1; }

  Vector rhs(const Vector& x, const Vector& u, double) const override {
    const double m1 = p_.m1, m2 = p_.m2, l1 = p_.l1, g = p_.gravity;
    const double lc1 = 0.5 * p_.l1, lc2 = 0.5 * p_.l2;
    // Inertias about each link's own joint.
    const double i1 = m1 * p_.l1 * p_.l1 / 12.0 + m1 * lc1 * lc1;
    const double i2 = m2 * p_.l2 * p_.l2 / 12.0 + m2 * lc2 * lc2;
    const double s1 = std::sin(x(0)), s2 = std::sin(x(1)), c2 = std::cos(x(1));
    const double s12 = std::sin(x(0) + x(1));
    const double q1d = x(2), q2d = x(3);

    const double m11 = i1 + i2 + m2 * l1 * l1 + 2.0 * m2 * l1 * lc2 * c2;
    const double m12 = i2 + m2 * l1 * lc2 * c2;
    const double m22 = i2;
    const double h = m2 * l1 * lc2 * s2;

    // M qdd = tau_g + B u - C qd
    const double r1 = -m1 * g * lc1 * s1 - m2 * g * (l1 * s1 + lc2 * s12) +
                      2.0 * h * q1d * q2d + h * q2d * q2d;
    const double r2 = -m2 * g * lc2 * s12 - h * q1d * q1d + u(0);

    const double det = m11 * m22 - m12 * m12;
    Vector dx(4);
    dx(0) = q1d;
    dx(1) = q2d;
    dx(2) = (m22 * r1 - m12 * r2) / det;
    dx(3) = (-m12 * r1 + m11 * r2) / det;
    return dx;
  }

  bool rhs_jacobians(const Vector& x, const Vector& u, double, Matrix& fx, Matrix& fu) const override {
    const double m1 = p_.m1, m2 = p_.m2, l1 = p_.l1, g = p_.gravity;
    const double lc1 = 0.5 * p_.l1, lc2 = 0.5 * p_.l2;
    const double i1 = m1 * p_.l1 * p_.l1 / 12.0 + m1 * lc1 * lc1;
    const double i2 = m2 * p_.l2 * p_.l2 / 12.0 + m2 * lc2 * lc2;
    const double s1 = std::sin(x(0)), c1 = std::cos(x(0));
    const double s2 = std::sin(x(1)), c2 = std::cos(x(1));
    const double s12 = std::sin(x(0) + x(1)), c12 = std::cos(x(0) + x(1));
    const double q1d = x(2), q2d = x(3);

    const double m11 = i1 + i2 + m2 * l1 * l1 + 2.0 * m2 * l1 * lc2 * c2;
    const double m12 = i2 + m2 * l1 * lc2 * c2;
    const double m22 = i2;
    const double h = m2 * l1 * lc2 * s2;
    const double dh = m2 * l1 * lc2 * c2;  // dh/dq2; dm11/dq2 = -2h, dm12/dq2 = -h

    const double r1 = -m1 * g * lc1 * s1 - m2 * g * (l1 * s1 + lc2 * s12) +
                      2.0 * h * q1d * q2d + h * q2d * q2d;
    const double r2 = -m2 * g * lc2 * s12 - h * q1d * q1d + u(0);
    const double det = m11 * m22 - m12 * m12;
    const double na = m22 * r1 - m12 * r2;  // det * q1dd
    const double nb = m11 * r2 - m12 * r1;  // det * q2dd

    // Partials of r1 and r2 in (q1, q2, q1d, q2d).
    const double r1v[4] = {-m1 * g * lc1 * c1 - m2 * g * (l1 * c1 + lc2 * c12),
                           -m2 * g * lc2 * c12 + dh * (2.0 * q1d * q2d + q2d * q2d), 2.0 * h * q2d,
                           2.0 * h * (q1d + q2d)};
    const double r2v[4] = {-m2 * g * lc2 * c12, -m2 * g * lc2 * c12 - dh * q1d * q1d, -2.0 * h * q1d, 0.0};

    fx = Matrix::Zero(4, 4);
    fx(0, 2) = 1.0;
    fx(1, 3) = 1.0;
    for (int v = 0; v < 4; ++v) {
      fx(2, v) = (m22 * r1v[v] - m12 * r2v[v]) / det;
      fx(3, v) = (m11 * r2v[v] - m12 * r1v[v]) / det;
    }
    // The mass matrix depends on q2 only.
    const double dm11 = -2.0 * h, dm12 = -h;
    const double ddet = dm11 * m22 - 2.0 * m12 * dm12;
    fx(2, 1) += (-dm12 * r2) / det - na * ddet / (det * det);
    fx(3, 1) += (dm11 * r2 - dm12 * r1) / det - nb * ddet / (det * det);

    fu = Matrix::Zero(4, 1);
    fu(2, 0) = -m12 / det;
    fu(3, 0) = m11 / det;
    return true;
  }

  std::map<std::string, double> physical_params() const override {
    return {{"m1", p_.m1}, {"m2", p_.m2}, {"l1", p_.l1}, {"l2", p_.l2}, {"gravity", p_.gravity}};
  }

 private:
  Params p_;
};

/// x' = A x + B u. Used for custom problems and as the LQR test bed; with
/// Integrator::kDiscreteMap the matrices are the discrete transition itself.
class LinearModel final : public DynamicsModel {
 public:
  LinearModel(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() != a_.cols() || b_.rows() != a_.rows() || b_.cols() < 1) {
      throw std::invalid_argument("LinearModel: A must be n x n and B n x m");
    }
  }

  std::string name() const override { return "linear"; }
  int state_dim() const override { return static_cast<int>(a_.rows()); }
  int control_dim() const override { return static_cast<int>(b_.cols()); }

  Vector rhs(const Vector& x, const Vector& u, double) const override { return a_ * x + b_ * u; }

  bool rhs_jacobians(const Vector&, const Vector&, double, Matrix& fx,
                     Matrix& fu) const override {
    fx = a_;
    fu = b_;
    return true;
  }

  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }

 private:
  Matrix a_;
  Matrix b_;
};

enum class Benchmark { kPendulum, kCartPole, kAcrobot };

inline Benchmark parse_benchmark(std::string_view name) {
  if (name == "pendulum") return Benchmark::kPendulum;
  if (name == "cartpole" || name == "cart-pole") return Benchmark::kCartPole;
  if (name == "acrobot") return Benchmark::kAcrobot;
  throw std::invalid_argument("unknown benchmark '" + std::string(name) + "'");
}

inline const char* to_string(Benchmark b) {
  switch (b) {
    case Benchmark::kPendulum: return "pendulum";
    case Benchmark::kCartPole: return "cartpole";
    case Benchmark::kAcrobot: return "acrobot";
  }
  return "unknown";
}

/// Benchmark dynamics on the standard grids (t_f = 5, 10, 10 s; dt = 0.01 s).
inline DiscreteDynamics make_benchmark(Benchmark which) {
  switch (which) {
    case Benchmark::kPendulum:
      return DiscreteDynamics::from_final_time(std::make_shared<Pendulum>(), 5.0, 0.01);
    case Benchmark::kCartPole:
      return DiscreteDynamics::from_final_time(std::make_shared<CartPole>(), 10.0, 0.01);
    case Benchmark::kAcrobot:
      return DiscreteDynamics::from_final_time(std::make_shared<Acrobot>(), 10.0, 0.01);
  }
  throw std::invalid_argument("unknown benchmark");
}

inline DiscreteDynamics make_benchmark(std::string_view name) {
  return make_benchmark(parse_benchmark(name));
}

}  // namespace boxilqr

#endif  // BOX_ILQR_MODEL_HPP
