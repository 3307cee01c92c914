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

#ifndef BOX_ILQR_CONFIG_HPP
#define BOX_ILQR_CONFIG_HPP

// Run configuration documents (JSON, `"schema": 1`).
//
//   {
//     "schema": 1,
//     "system": "pendulum" | "cartpole" | "acrobot" | "custom",
//     "emit_gains": false,
//     "seed": 0,
//     "output_dir": "out/pendulum",          (optional)
//     "model": {"A": [[..]], "B": [[..]], "horizon": T},   (custom only)
//     "overrides": {
//       "weights": {"Q": 3 | [diag] | [[full]], "R": .., "Qf": .., "stage_scale": 0.01},
//       "goal": [..], "x0": [..],
//       "t_final": 5, "dt": 0.01,             (benchmarks only)
//       "bounds": null | {"x_lower": [..], "x_upper": [..], "u_lower": [..], "u_upper": [..]},
//       "solver": {"mu0": .., "sigma0": .., "r_mu": .., "r_sigma": .., "beta_r": ..,
//                  "eps_barrier": .., "inner_max_iters": .., "inner_grad_tol": ..,
//                  "inner_rel_tol": .., "outer_max_iters": .., "failure_slack_frac": ..,
//                  "c1": .., "alpha_min": .., "backtrack_factor": ..}
//     }
//   }
//
// Bound entries may be null for an unbounded side; "bounds": null drops all
// bounds. Unknown keys are rejected so that typos fail before any solve.

#include "box_ilqr/solver.hpp"

#include "json.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

namespace boxilqr {

using json = nlohmann::json;

/// Parse or validation failure; `what()` names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string system;
  std::optional<std::string> output_dir;
  std::int64_t seed = 0;  ///< reserved; the solver is deterministic
  bool emit_gains = false;
  Problem problem;
  SolverConfig solver;
  json source;  ///< the document as read, echoed into report.json
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(path + key + ": unknown field");
  }
}

inline const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  return j;
}

inline double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

inline int get_positive_int(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() <= 0) {
    throw ConfigError(path + ": expected a positive integer");
  }
  return j.get<int>();
}

inline Vector get_vector(const json& j, const std::string& path, Eigen::Index size) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size) {
    throw ConfigError(path + ": expected an array of " + std::to_string(size) + " numbers");
  }
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = get_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

inline Matrix get_matrix(const json& j, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw ConfigError(path + ": expected " + std::to_string(rows) + " rows");
  }
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    a.row(i) = get_vector(j[i], path + "[" + std::to_string(i) + "]", cols).transpose();
  }
  return a;
}

// Scalar s -> s I, flat array -> diagonal, nested array -> full matrix.
inline Matrix get_weight(const json& j, const std::string& path, Eigen::Index n) {
  if (j.is_number()) return get_number(j, path) * Matrix::Identity(n, n);
  if (j.is_array() && !j.empty() && j[0].is_array()) {
    Matrix w = get_matrix(j, path, n, n);
    if (w != w.transpose()) throw ConfigError(path + ": matrix must be symmetric");
    return w;
  }
  return get_vector(j, path, n).asDiagonal();
}

// Bound array with null for an absent side.
inline Vector get_bounds(const json& j, const std::string& path, Eigen::Index size, double absent) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size) {
    throw ConfigError(path + ": expected an array of " + std::to_string(size) + " numbers or nulls");
  }
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    v(i) = j[i].is_null() ? absent : get_number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

inline void check_box(const Vector& lo, const Vector& hi, const std::string& lo_path,
                      const std::string& hi_path) {
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (std::isinf(lo(i)) && std::isinf(hi(i))) continue;
    if (!(lo(i) < hi(i))) {
      const std::string k = "[" + std::to_string(i) + "]";
      throw ConfigError(lo_path + k + " must be < " + hi_path + k);
    }
  }
}

inline void apply_solver_overrides(const json& j, SolverConfig& cfg) {
  const std::string p = "overrides.solver.";
  require_object(j, "overrides.solver");
  reject_unknown(j, p,
                 {"mu0", "sigma0", "r_mu", "r_sigma", "beta_r", "eps_barrier", "inner_max_iters",
                  "inner_grad_tol", "inner_rel_tol", "outer_max_iters", "failure_slack_frac", "c1",
                  "alpha_min", "backtrack_factor"});
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = get_number(j[key], p + key);
  };
  auto count = [&](const char* key, int& dst) {
    if (j.contains(key)) dst = get_positive_int(j[key], p + key);
  };
  num("mu0", cfg.mu0);
  num("sigma0", cfg.sigma0);
  num("r_mu", cfg.r_mu0);
  num("r_sigma", cfg.r_sigma0);
  num("beta_r", cfg.beta_r);
  num("eps_barrier", cfg.eps_barrier);
  count("inner_max_iters", cfg.inner_max_iters);
  num("inner_grad_tol", cfg.inner_grad_tol);
  num("inner_rel_tol", cfg.inner_rel_tol);
  count("outer_max_iters", cfg.outer_max_iters);
  num("failure_slack_frac", cfg.failure_slack_frac);
  num("c1", cfg.line_search.c1);
  num("alpha_min", cfg.line_search.alpha_min);
  num("backtrack_factor", cfg.line_search.backtrack_factor);
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("overrides.solver: ") + e.what());
  }
}

}  // namespace detail

/// Builds a RunConfig from a parsed document; throws ConfigError.
inline RunConfig parse_run_config(const json& doc) {
  using namespace detail;
  require_object(doc, "<root>");
  reject_unknown(doc, "", {"schema", "system", "emit_gains", "seed", "output_dir", "model", "overrides"});
  if (!doc.contains("schema")) throw ConfigError("schema: missing (expected 1)");
  if (!doc["schema"].is_number_integer() || doc["schema"].get<int>() != 1) {
    throw ConfigError("schema: unsupported version (expected 1)");
  }
  if (!doc.contains("system") || !doc["system"].is_string()) {
    throw ConfigError("system: expected a benchmark name or \"custom\"");
  }
  const std::string system = doc["system"].get<std::string>();

  bool emit_gains = false;
  if (doc.contains("emit_gains")) {
    if (!doc["emit_gains"].is_boolean()) throw ConfigError("emit_gains: expected true or false");
    emit_gains = doc["emit_gains"].get<bool>();
  }
  std::int64_t seed = 0;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) throw ConfigError("seed: expected an integer");
    seed = doc["seed"].get<std::int64_t>();
  }
  std::optional<std::string> output_dir;
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw ConfigError("output_dir: expected a string");
    output_dir = doc["output_dir"].get<std::string>();
  }

  const json empty = json::object();
  const json& ov = doc.contains("overrides") ? require_object(doc["overrides"], "overrides") : empty;
  reject_unknown(ov, "overrides.", {"weights", "goal", "x0", "t_final", "dt", "bounds", "solver"});

  // Base problem: a benchmark with its standard values, or a linear map.
  std::optional<Problem> base;
  if (system == "custom") {
    if (!doc.contains("model")) throw ConfigError("model: required when system is \"custom\"");
    const json& mj = require_object(doc["model"], "model");
    reject_unknown(mj, "model.", {"A", "B", "horizon"});
    for (const char* key : {"A", "B", "horizon"}) {
      if (!mj.contains(key)) throw ConfigError(std::string("model.") + key + ": missing");
    }
    if (!mj["A"].is_array() || mj["A"].empty()) throw ConfigError("model.A: expected a square matrix");
    const auto n = static_cast<Eigen::Index>(mj["A"].size());
    if (!mj["B"].is_array() || mj["B"].empty() || !mj["B"][0].is_array() || mj["B"][0].empty()) {
      throw ConfigError("model.B: expected an n x m matrix");
    }
    const auto m = static_cast<Eigen::Index>(mj["B"][0].size());
    const Matrix A = get_matrix(mj["A"], "model.A", n, n);
    const Matrix B = get_matrix(mj["B"], "model.B", n, m);
    const int T = get_positive_int(mj["horizon"], "model.horizon");
    if (ov.contains("t_final") || ov.contains("dt")) {
      throw ConfigError("overrides.t_final: not used by custom systems (set model.horizon)");
    }
    auto model = std::make_shared<LinearModel>(A, B);
    base = Problem{DiscreteDynamics(model, 1.0, T, Integrator::kDiscreteMap),
                   {Matrix::Identity(n, n), Matrix::Identity(m, m), Matrix::Identity(n, n),
                    Vector::Zero(n), 1.0},
                   BoxSpec::unbounded(static_cast<int>(n), static_cast<int>(m)),
                   Vector::Zero(n)};
  } else {
    if (doc.contains("model")) throw ConfigError("model: only allowed when system is \"custom\"");
    Benchmark which;
    try {
      which = parse_benchmark(system);
    } catch (const std::invalid_argument&) {
      throw ConfigError("system: unknown system \"" + system + "\"");
    }
    base = make_benchmark_problem(which);
    if (ov.contains("t_final") || ov.contains("dt")) {
      const double tf = ov.contains("t_final") ? get_number(ov["t_final"], "overrides.t_final")
                                               : base->dynamics.final_time();
      const double dt = ov.contains("dt") ? get_number(ov["dt"], "overrides.dt") : base->dynamics.dt();
      if (!(tf > 0.0) || !(dt > 0.0)) throw ConfigError("overrides.t_final/dt: must be positive");
      try {
        base->dynamics = DiscreteDynamics::from_final_time(base->dynamics.model_ptr(), tf, dt);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("overrides.t_final/dt: ") + e.what());
      }
      base->cost.stage_scale = dt;
    }
  }
  Problem& p = *base;
  const Eigen::Index n = p.state_dim();
  const Eigen::Index m = p.control_dim();

  if (ov.contains("weights")) {
    const json& w = require_object(ov["weights"], "overrides.weights");
    reject_unknown(w, "overrides.weights.", {"Q", "R", "Qf", "stage_scale"});
    if (w.contains("Q")) p.cost.Q = get_weight(w["Q"], "overrides.weights.Q", n);
    if (w.contains("R")) p.cost.R = get_weight(w["R"], "overrides.weights.R", m);
    if (w.contains("Qf")) p.cost.Qf = get_weight(w["Qf"], "overrides.weights.Qf", n);
    if (w.contains("stage_scale")) {
      p.cost.stage_scale = get_number(w["stage_scale"], "overrides.weights.stage_scale");
    }
  }
  if (ov.contains("goal")) p.cost.goal = get_vector(ov["goal"], "overrides.goal", n);
  if (ov.contains("x0")) p.initial_state = get_vector(ov["x0"], "overrides.x0", n);
  try {
    validate(p.cost);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("overrides.weights: ") + e.what());
  }

  if (ov.contains("bounds")) {
    const json& b = ov["bounds"];
    if (b.is_null()) {
      p.box = BoxSpec::unbounded(static_cast<int>(n), static_cast<int>(m));
    } else {
      require_object(b, "overrides.bounds");
      reject_unknown(b, "overrides.bounds.", {"x_lower", "x_upper", "u_lower", "u_upper"});
      Vector xl = p.box.x_lower(), xu = p.box.x_upper(), ul = p.box.u_lower(), uu = p.box.u_upper();
      if (b.contains("x_lower")) xl = get_bounds(b["x_lower"], "overrides.bounds.x_lower", n, -kInf);
      if (b.contains("x_upper")) xu = get_bounds(b["x_upper"], "overrides.bounds.x_upper", n, kInf);
      if (b.contains("u_lower")) ul = get_bounds(b["u_lower"], "overrides.bounds.u_lower", m, -kInf);
      if (b.contains("u_upper")) uu = get_bounds(b["u_upper"], "overrides.bounds.u_upper", m, kInf);
      check_box(xl, xu, "overrides.bounds.x_lower", "overrides.bounds.x_upper");
      check_box(ul, uu, "overrides.bounds.u_lower", "overrides.bounds.u_upper");
      p.box = BoxSpec(xl, xu, ul, uu);
    }
  }

  SolverConfig solver;
  if (ov.contains("solver")) apply_solver_overrides(ov["solver"], solver);

  return RunConfig{system, output_dir, seed, emit_gains, std::move(p), solver, doc};
}

/// Reads and parses a config file. Syntax errors carry the line and column.
inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line:column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": syntax error");
  }
  try {
    return parse_run_config(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace boxilqr

#endif  // BOX_ILQR_CONFIG_HPP
