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

#include "box_ilqr/io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace boxilqr;

namespace {

std::string error_of(const json& doc) {
  try {
    parse_run_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(RunConfig, BenchmarkDefaults) {
  const RunConfig cfg = parse_run_config(json::parse(R"({"schema": 1, "system": "pendulum"})"));
  EXPECT_EQ(cfg.system, "pendulum");
  EXPECT_EQ(cfg.problem.horizon(), 500);
  EXPECT_EQ(cfg.problem.box.u_upper()(0), 1.0);
  EXPECT_EQ(cfg.problem.cost.R(0, 0), 3.0);
  EXPECT_EQ(cfg.solver.mu0, 1e8);
  EXPECT_FALSE(cfg.emit_gains);
  EXPECT_FALSE(cfg.output_dir.has_value());
}

TEST(RunConfig, OverridesApply) {
  const RunConfig cfg = parse_run_config(json::parse(R"({
    "schema": 1, "system": "cartpole", "emit_gains": true, "seed": 9, "output_dir": "x",
    "overrides": {
      "weights": {"Q": [1, 2, 3, 4], "R": 0.5},
      "t_final": 2, "dt": 0.02,
      "bounds": {"x_lower": [-1, null, null, null], "u_upper": [3]},
      "solver": {"r_sigma": 0.25, "inner_max_iters": 7}
    }})"));
  EXPECT_EQ(cfg.problem.horizon(), 100);
  EXPECT_DOUBLE_EQ(cfg.problem.cost.stage_scale, 0.02);
  EXPECT_EQ(cfg.problem.cost.Q(2, 2), 3.0);
  EXPECT_EQ(cfg.problem.cost.Q(0, 1), 0.0);
  EXPECT_EQ(cfg.problem.box.x_lower()(0), -1.0);
  EXPECT_EQ(cfg.problem.box.x_upper()(0), 0.2);
  EXPECT_EQ(cfg.problem.box.u_upper()(0), 3.0);
  EXPECT_EQ(cfg.problem.box.u_lower()(0), -2.0);
  EXPECT_EQ(cfg.solver.r_sigma0, 0.25);
  EXPECT_EQ(cfg.solver.inner_max_iters, 7);
  EXPECT_TRUE(cfg.emit_gains);
  EXPECT_EQ(cfg.seed, 9);
  EXPECT_EQ(*cfg.output_dir, "x");
}

TEST(RunConfig, NullBoundsRemoveEveryConstraint) {
  const RunConfig cfg =
      parse_run_config(json::parse(R"({"schema": 1, "system": "cartpole", "overrides": {"bounds": null}})"));
  EXPECT_TRUE(cfg.problem.box.empty());
}

TEST(RunConfig, CustomLinearSystem) {
  const RunConfig cfg = parse_run_config(json::parse(R"({
    "schema": 1, "system": "custom",
    "model": {"A": [[1, 0.1], [0, 1]], "B": [[0], [0.1]], "horizon": 30},
    "overrides": {"x0": [1, 0], "weights": {"R": 0.1}}})"));
  EXPECT_EQ(cfg.problem.horizon(), 30);
  EXPECT_EQ(cfg.problem.control_dim(), 1);
  EXPECT_EQ(cfg.problem.initial_state(0), 1.0);
  EXPECT_DOUBLE_EQ(cfg.problem.cost.R(0, 0), 0.1);
}

TEST(RunConfig, InvertedControlBoundsNameTheField) {
  const std::string err = error_of(json::parse(
      R"({"schema": 1, "system": "pendulum", "overrides": {"bounds": {"u_lower": [1], "u_upper": [1]}}})"));
  EXPECT_NE(err.find("overrides.bounds.u_lower[0]"), std::string::npos) << err;
}

TEST(RunConfig, RejectsMalformedDocuments) {
  EXPECT_NE(error_of(json::parse(R"({"system": "pendulum"})")).find("schema"), std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"schema": 2, "system": "pendulum"})")).find("schema"), std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"schema": 1, "system": "quadrotor"})")).find("system"), std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"schema": 1, "system": "pendulum", "colour": 1})")).find("colour"),
            std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"schema": 1, "system": "pendulum", "overrides": {"weights": {"Q": "big"}}})"))
                .find("overrides.weights.Q"),
            std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"schema": 1, "system": "pendulum", "overrides": {"x0": [0]}})"))
                .find("overrides.x0"),
            std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"schema": 1, "system": "pendulum", "overrides": {"solver": {"r_mu": 1.5}}})"))
                .find("overrides.solver"),
            std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"schema": 1, "system": "pendulum", "overrides": {"t_final": 5.005}})"))
                .find("t_final"),
            std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"schema": 1, "system": "custom"})")).find("model"), std::string::npos);
}

TEST(Formats, TrajectoryCsvLayout) {
  Problem p = make_benchmark_problem(Benchmark::kPendulum);
  p.dynamics = DiscreteDynamics(p.dynamics.model_ptr(), p.dynamics.dt(), 3);
  const Trajectory traj = simulate(p, std::vector<Vector>(3, Vector::Constant(1, 0.1)));
  const auto rows = lines(trajectory_csv(p, traj));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "t,x1,x2,u1");
  EXPECT_EQ(rows[1], "0,0,0,0.10000000000000001");
  EXPECT_EQ(rows[4].back(), ',');  // no control on the final knot
  EXPECT_EQ(rows[2].substr(0, 5), "0.01,");
}

TEST(Formats, GainsCsvLayout) {
  Problem p = make_benchmark_problem(Benchmark::kCartPole);
  p.dynamics = DiscreteDynamics(p.dynamics.model_ptr(), p.dynamics.dt(), 2);
  GainSchedule gs;
  gs.k.assign(2, Vector::Constant(1, -1.5));
  Matrix K(1, 4);
  K << 1, 2, 3, 4;
  gs.K.assign(2, K);
  const auto rows = lines(gains_csv(p, gs));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "t,k1,K_1_1,K_1_2,K_1_3,K_1_4");
  EXPECT_EQ(rows[1], "0,-1.5,1,2,3,4");
}

TEST(Formats, ComparisonCsvSuffixes) {
  Problem p = make_benchmark_problem(Benchmark::kPendulum);
  p.dynamics = DiscreteDynamics(p.dynamics.model_ptr(), p.dynamics.dt(), 2);
  const Trajectory traj = simulate(p, std::vector<Vector>(2, Vector::Zero(1)));
  const auto rows = lines(comparison_csv(p, traj, traj));
  EXPECT_EQ(rows[0], "t,x1_a,x2_a,u1_a,x1_b,x2_b,u1_b");
  EXPECT_EQ(rows[1], "0,0,0,0,0,0,0");
  Problem q = p;
  q.dynamics = DiscreteDynamics(p.dynamics.model_ptr(), p.dynamics.dt(), 3);
  EXPECT_THROW(comparison_csv(p, traj, simulate(q, std::vector<Vector>(3, Vector::Zero(1)))), std::invalid_argument);
}

TEST(Formats, ReportRoundTripsAndCarriesHistory) {
  RunConfig cfg = parse_run_config(json::parse(
      R"({"schema": 1, "system": "pendulum", "overrides": {"t_final": 0.5, "solver": {"eps_barrier": 1e6}}})"));
  const SolveReport rep = box_ilqr(cfg.problem, cfg.solver);
  const json doc = report_json(cfg, rep);
  const std::string text = dump_report(doc);
  EXPECT_EQ(dump_report(json::parse(text)), text);
  EXPECT_EQ(doc["status"], "Converged");
  EXPECT_EQ(doc["reductions"], rep.reductions);
  EXPECT_EQ(doc["outer_iterations"].size(), rep.outer_iterations.size());
  EXPECT_TRUE(doc["outer_iterations"][0].contains("costs"));
  EXPECT_TRUE(doc["outer_iterations"][0].contains("alphas"));
  EXPECT_EQ(doc["config"]["system"], "pendulum");
  EXPECT_EQ(doc["saturation"]["channels"].size(), 1u);
}

TEST(Formats, ExitCodes) {
  EXPECT_EQ(exit_code(SolveStatus::kConverged), 0);
  EXPECT_EQ(exit_code(SolveStatus::kInnerFailure), 2);
  EXPECT_EQ(exit_code(SolveStatus::kIterationCap), 3);
}
