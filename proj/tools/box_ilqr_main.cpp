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

// box_ilqr: run benchmark configs and write trajectories, gains and reports.
//
//   box_ilqr solve <config.json>... [--out DIR] [--emit-gains] [--jobs N] [--quiet]
//   box_ilqr compare <a.json> <b.json> [--out DIR] [--quiet]
//   box_ilqr check
//
// Exit codes: 0 converged, 1 config error, 2 inner failure, 3 iteration cap.

#include "box_ilqr/io.hpp"
#include "selfcheck.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace boxilqr;

namespace {

constexpr int kConfigError = 1;

struct Options {
  std::string out;
  bool emit_gains = false;
  bool quiet = false;
};

// --out wins, then the config's output_dir, then $BOX_ILQR_OUT/<stem>, then
// out/<stem>. With several configs --out names a parent directory.
fs::path output_dir(const Options& opt, const RunConfig& cfg, const std::string& config_path,
                    bool several) {
  const std::string stem = fs::path(config_path).stem().string();
  if (!opt.out.empty()) return several ? fs::path(opt.out) / stem : fs::path(opt.out);
  if (cfg.output_dir) return *cfg.output_dir;
  if (const char* env = std::getenv("BOX_ILQR_OUT"); env && *env) return fs::path(env) / stem;
  return fs::path("out") / stem;
}

struct Outcome {
  int code = kConfigError;
  std::string message;  // one summary line, or the error
  std::optional<RunConfig> config;
  std::optional<SolveReport> report;
};

// Loads and solves one config without touching the filesystem.
Outcome solve_config(const std::string& path) {
  Outcome o;
  try {
    o.config = load_run_config(path);
  } catch (const ConfigError& e) {
    o.message = std::string("error: ") + e.what();
    return o;
  }
  const RunConfig& cfg = *o.config;
  Trajectory start;
  try {
    start = initial_trajectory(cfg.problem, cfg.solver);
  } catch (const std::exception& e) {
    o.message = "error: " + path + ": initial trajectory: " + e.what();
    return o;
  }
  try {
    o.report = box_ilqr(cfg.problem, cfg.solver, start);
  } catch (const std::exception& e) {
    o.code = 2;
    o.message = "error: " + path + ": " + e.what();
    return o;
  }
  const SolveReport& rep = *o.report;
  o.code = exit_code(rep.status);
  double max_u = 0.0;
  for (const auto& u : rep.final_trajectory.controls) max_u = std::max(max_u, u.cwiseAbs().maxCoeff());
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: %s, %d reductions, %zu outer iterations, max|u| %.6g", path.c_str(),
                to_string(rep.status), rep.reductions, rep.outer_iterations.size(), max_u);
  o.message = buf;
  return o;
}

void write_outputs(const fs::path& dir, const RunConfig& cfg, const SolveReport& rep, bool gains) {
  fs::create_directories(dir);
  write_text((dir / "trajectory.csv").string(), trajectory_csv(cfg.problem, rep.final_trajectory));
  if (gains && rep.final_gains.horizon() == cfg.problem.horizon()) {
    write_text((dir / "gains.csv").string(), gains_csv(cfg.problem, rep.final_gains));
  }
  write_text((dir / "report.json").string(), dump_report(report_json(cfg, rep)));
}

int severity(int code) {
  // Config errors dominate, then inner failures, then iteration caps.
  switch (code) {
    case 1: return 3;
    case 2: return 2;
    case 3: return 1;
    default: return 0;
  }
}

int cmd_solve(const std::vector<std::string>& configs, const Options& opt, int jobs) {
  const bool several = configs.size() > 1;
  std::vector<Outcome> results(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      Outcome o = solve_config(configs[i]);
      if (o.report) {
        try {
          write_outputs(output_dir(opt, *o.config, configs[i], several), *o.config, *o.report,
                        opt.emit_gains || o.config->emit_gains);
        } catch (const std::exception& e) {
          o.code = kConfigError;
          o.message = std::string("error: ") + e.what();
        }
      }
      results[i] = std::move(o);
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n_threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  int worst = 0;
  for (const auto& o : results) {
    if (o.code == kConfigError || o.message.rfind("error:", 0) == 0) {
      std::cerr << o.message << '\n';
    } else if (!opt.quiet) {
      std::cout << o.message << '\n';
    }
    if (severity(o.code) > severity(worst)) worst = o.code;
  }
  return worst;
}

int cmd_compare(const std::string& a, const std::string& b, const Options& opt) {
  RunConfig ca = load_run_config(a);
  RunConfig cb = load_run_config(b);
  if (ca.system != cb.system || ca.problem.horizon() != cb.problem.horizon() ||
      ca.problem.state_dim() != cb.problem.state_dim() ||
      ca.problem.control_dim() != cb.problem.control_dim() ||
      ca.problem.dynamics.dt() != cb.problem.dynamics.dt()) {
    std::cerr << "error: compare needs configs with the same system and time grid\n";
    return kConfigError;
  }
  Outcome oa = solve_config(a);
  Outcome ob = solve_config(b);
  for (const Outcome* o : {&oa, &ob}) {
    if (!o->report) {
      std::cerr << o->message << '\n';
      return o->code;
    }
  }
  fs::path dir = !opt.out.empty() ? fs::path(opt.out)
                 : (std::getenv("BOX_ILQR_OUT") && *std::getenv("BOX_ILQR_OUT"))
                     ? fs::path(std::getenv("BOX_ILQR_OUT")) / "compare"
                     : fs::path("out") / "compare";
  write_outputs(dir / "a", *oa.config, *oa.report, opt.emit_gains || oa.config->emit_gains);
  write_outputs(dir / "b", *ob.config, *ob.report, opt.emit_gains || ob.config->emit_gains);
  write_text((dir / "comparison.csv").string(),
             comparison_csv(oa.config->problem, oa.report->final_trajectory, ob.report->final_trajectory));
  if (!opt.quiet) std::cout << oa.message << '\n' << ob.message << '\n';
  return severity(oa.code) >= severity(ob.code) ? oa.code : ob.code;
}

int cmd_check(const Options& opt) {
  bool all = true;
  for (const auto& line : tools::run_selfcheck()) {
    all = all && line.pass;
    if (!opt.quiet || !line.pass) {
      std::cout << (line.pass ? "PASS " : "FAIL ") << line.name << " (" << line.detail << ")\n";
    }
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Box-constrained iLQR benchmarks"};
  app.require_subcommand(1);
  Options opt;
  int jobs = 1;
  std::vector<std::string> configs;
  std::string cmp_a, cmp_b;

  auto* solve = app.add_subcommand("solve", "Solve one or more config files");
  solve->add_option("configs", configs, "Config files (JSON)")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", opt.out, "Output directory");
  solve->add_flag("--emit-gains", opt.emit_gains, "Also write gains.csv");
  solve->add_option("--jobs", jobs, "Configs solved concurrently")->check(CLI::PositiveNumber);
  solve->add_flag("--quiet", opt.quiet, "Print errors only");

  auto* compare = app.add_subcommand("compare", "Solve two configs and join their trajectories");
  compare->add_option("a", cmp_a, "First config")->required()->check(CLI::ExistingFile);
  compare->add_option("b", cmp_b, "Second config")->required()->check(CLI::ExistingFile);
  compare->add_option("--out", opt.out, "Output directory");
  compare->add_flag("--emit-gains", opt.emit_gains, "Also write gains.csv for each run");
  compare->add_flag("--quiet", opt.quiet, "Print errors only");

  auto* check = app.add_subcommand("check", "Run the oracle and invariant self-check");
  check->add_flag("--quiet", opt.quiet, "Print failures only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*solve) return cmd_solve(configs, opt, jobs);
    if (*compare) return cmd_compare(cmp_a, cmp_b, opt);
    if (*check) return cmd_check(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
