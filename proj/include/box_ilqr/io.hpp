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

#ifndef BOX_ILQR_IO_HPP
#define BOX_ILQR_IO_HPP

// Output formats read by the plotting scripts.
//
//   trajectory.csv  t,x1..xn,u1..um      one row per knot, controls blank on the last
//   gains.csv       t,k1..km,K_1_1..K_m_n  one row per control step, K row-major
//   report.json     solve history, status, saturation report, config echo
//
// Floats are written with 17 significant digits; nothing time- or
// path-dependent is recorded, so identical configs give identical bytes.

#include "box_ilqr/analysis.hpp"
#include "box_ilqr/config.hpp"

#include <cstdio>
#include <fstream>
#include <string>

namespace boxilqr {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string join_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

inline void trajectory_header(std::vector<std::string>& h, int n, int m, const std::string& suffix) {
  for (int i = 1; i <= n; ++i) h.push_back("x" + std::to_string(i) + suffix);
  for (int j = 1; j <= m; ++j) h.push_back("u" + std::to_string(j) + suffix);
}

inline void trajectory_cells(std::vector<std::string>& row, const Trajectory& traj, int t, int m) {
  for (Eigen::Index i = 0; i < traj.states[t].size(); ++i) row.push_back(format_double(traj.states[t](i)));
  for (int j = 0; j < m; ++j) {
    row.push_back(t < traj.horizon() ? format_double(traj.controls[t](j)) : std::string());
  }
}

inline json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path + ": cannot write");
  out << text;
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace detail

inline std::string trajectory_csv(const Problem& p, const Trajectory& traj) {
  const int n = p.state_dim(), m = p.control_dim();
  std::vector<std::string> header{"t"};
  detail::trajectory_header(header, n, m, "");
  std::string out = detail::join_row(header);
  for (int t = 0; t <= traj.horizon(); ++t) {
    std::vector<std::string> row{format_double(t * p.dynamics.dt())};
    detail::trajectory_cells(row, traj, t, m);
    out += detail::join_row(row);
  }
  return out;
}

inline std::string gains_csv(const Problem& p, const GainSchedule& gs) {
  const int n = p.state_dim(), m = p.control_dim();
  std::vector<std::string> header{"t"};
  for (int j = 1; j <= m; ++j) header.push_back("k" + std::to_string(j));
  for (int j = 1; j <= m; ++j) {
    for (int i = 1; i <= n; ++i) header.push_back("K_" + std::to_string(j) + "_" + std::to_string(i));
  }
  std::string out = detail::join_row(header);
  for (int t = 0; t < gs.horizon(); ++t) {
    std::vector<std::string> row{format_double(t * p.dynamics.dt())};
    for (int j = 0; j < m; ++j) row.push_back(format_double(gs.k[t](j)));
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < n; ++i) row.push_back(format_double(gs.K[t](j, i)));
    }
    out += detail::join_row(row);
  }
  return out;
}

/// Two runs on the same grid side by side; columns suffixed _a and _b.
inline std::string comparison_csv(const Problem& p, const Trajectory& a, const Trajectory& b) {
  if (a.horizon() != b.horizon()) throw std::invalid_argument("comparison_csv: horizons differ");
  const int n = p.state_dim(), m = p.control_dim();
  std::vector<std::string> header{"t"};
  detail::trajectory_header(header, n, m, "_a");
  detail::trajectory_header(header, n, m, "_b");
  std::string out = detail::join_row(header);
  for (int t = 0; t <= a.horizon(); ++t) {
    std::vector<std::string> row{format_double(t * p.dynamics.dt())};
    detail::trajectory_cells(row, a, t, m);
    detail::trajectory_cells(row, b, t, m);
    out += detail::join_row(row);
  }
  return out;
}

inline int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged:
      return 0;
    case SolveStatus::kInnerFailure:
      return 2;
    case SolveStatus::kIterationCap:
      return 3;
  }
  return 2;
}

inline json to_json(const SaturationReport& rep) {
  json channels = json::array();
  for (const auto& ch : rep.channels) {
    json intervals = json::array();
    for (auto [a, b] : saturated_intervals(ch.saturated_steps)) intervals.push_back({a, b});
    channels.push_back({{"channel", ch.channel + 1},
                        {"saturated_steps", ch.saturated_steps},
                        {"saturated_intervals", intervals},
                        {"peak_row_norm", ch.peak_row_norm},
                        {"saturated_max_norm", ch.saturated_max_norm}});
  }
  return {{"threshold_frac", rep.threshold_frac}, {"channels", channels}};
}

/// Everything a run produced, minus the bulky per-step arrays kept in CSVs.
inline json report_json(const RunConfig& cfg, const SolveReport& rep) {
  const Problem& p = cfg.problem;
  json outer = json::array();
  for (const auto& r : rep.outer_iterations) {
    json failed = json::array();
    for (const auto& c : r.failed_indices) {
      failed.push_back({{"kind", to_string(c.kind)}, {"index", c.index + 1}});
    }
    outer.push_back({{"mu", detail::to_json(r.mu)},
                     {"sigma", detail::to_json(r.sigma)},
                     {"r_mu", detail::to_json(r.r_mu)},
                     {"r_sigma", detail::to_json(r.r_sigma)},
                     {"inner_iterations", r.inner_iters},
                     {"costs", r.costs},
                     {"alphas", r.accepted_alphas},
                     {"failed", r.failed},
                     {"hit_iteration_cap", r.hit_iteration_cap},
                     {"failed_indices", failed},
                     {"failure_reason", r.failure_reason},
                     {"min_slack", {{"lower", r.slack.lower}, {"upper", r.slack.upper}}}});
  }

  const Trajectory& traj = rep.final_trajectory;
  Vector max_abs_u = Vector::Zero(p.control_dim());
  Vector x_min = traj.states[0], x_max = traj.states[0];
  for (const auto& u : traj.controls) max_abs_u = max_abs_u.cwiseMax(u.cwiseAbs());
  for (const auto& x : traj.states) {
    x_min = x_min.cwiseMin(x);
    x_max = x_max.cwiseMax(x);
  }

  json doc;
  doc["schema"] = 1;
  doc["system"] = cfg.system;
  doc["status"] = to_string(rep.status);
  doc["exit_code"] = exit_code(rep.status);
  doc["reductions"] = rep.reductions;
  doc["horizon"] = p.horizon();
  doc["dt"] = p.dynamics.dt();
  doc["final_barrier"] = {{"mu", detail::to_json(rep.final_barrier.mu)},
                          {"sigma", detail::to_json(rep.final_barrier.sigma)}};
  doc["final_cost"] = {{"augmented", total_augmented_cost(p, traj, rep.final_barrier)},
                       {"task", total_augmented_cost(p, traj, rep.final_barrier.zeroed())}};
  doc["final_state"] = detail::to_json(traj.states.back());
  doc["extremes"] = {{"max_abs_u", detail::to_json(max_abs_u)},
                     {"x_min", detail::to_json(x_min)},
                     {"x_max", detail::to_json(x_max)}};
  doc["outer_iterations"] = outer;
  if (rep.final_gains.horizon() == p.horizon()) {
    doc["saturation"] = to_json(saturation_report(traj, rep.final_gains, p.box));
  } else {
    doc["saturation"] = nullptr;
  }
  doc["config"] = cfg.source;
  return doc;
}

inline std::string dump_report(const json& doc) { return doc.dump(2) + "\n"; }

inline void write_text(const std::string& path, const std::string& text) { detail::write_file(path, text); }

}  // namespace boxilqr

#endif  // BOX_ILQR_IO_HPP
