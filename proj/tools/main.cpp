// Copyright 2026 The qsm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "output.hpp"
#include "qsm/volterra.hpp"
#include "qsm/version.hpp"
#include "validation.hpp"

namespace {

using namespace qsm::tool;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  Overrides overrides;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config = true) {
  if (needs_config)
    cmd->add_option("--config", args.config_path, "JSON kernel configuration")->required();
  cmd->add_option("--out", args.out_path, "output file path")->required();
  cmd->add_option("--grid-h", args.overrides.grid_step, "override the grid step");
  cmd->add_option("--horizon", args.overrides.horizon, "override the grid horizon");
  cmd->add_option("--seed", args.overrides.seed, "override the RNG seed");
  cmd->add_option("--threads", args.threads, "worker threads for sweeps and sampling");
}

KernelConfig load(const CommonArgs& args) {
  KernelConfig config = load_config(args.config_path);
  apply_overrides(config, args.overrides);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-Markov and quantum memory-kernel dynamics toolkit"};
  app.set_version_flag("--version", std::string(qsm::version));
  app.require_subcommand(1);

  CommonArgs evolve_args, check_args, simulate_args;
  auto* evolve = app.add_subcommand("evolve", "integrate the configured evolution to CSV");
  add_common(evolve, evolve_args);
  auto* check = app.add_subcommand("check-cp", "complete-positivity report (JSON)");
  add_common(check, check_args);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo occupation estimates");
  add_common(simulate, simulate_args);

  CommonArgs scan_args;
  double scan_tau = 0.01;
  int scan_resolution = 200;
  bool scan_sufficiency = false;
  auto* scan = app.add_subcommand("scan", "sign map of the two-level short-time CP gap");
  scan->add_option("--out", scan_args.out_path, "output CSV path")->required();
  scan->add_option("--tau", scan_tau, "rescaled time of the map")->capture_default_str();
  scan->add_option("--resolution", scan_resolution, "grid points per axis")
      ->capture_default_str();
  scan->add_option("--threads", scan_args.threads, "worker threads");
  scan->add_flag("--sufficiency-sweep", scan_sufficiency,
                 "also sweep the wedge between the critical ratios over times up to 50 "
                 "and report the outcome");

  std::string validate_out, inject_failure;
  int validate_threads = 1;
  auto* validate = app.add_subcommand("validate", "run the full oracle and invariant battery");
  validate->add_option("--out", validate_out, "write the deterministic report JSON here");
  validate->add_option("--threads", validate_threads, "worker threads for sampling");
  validate->add_option("--inject-failure", inject_failure,
                       "force the named check to fail (testing aid)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (evolve->parsed()) {
      cmd_evolve(load(evolve_args), evolve_args.out_path);
    } else if (check->parsed()) {
      cmd_check_cp(load(check_args), check_args.out_path);
    } else if (simulate->parsed()) {
      cmd_simulate(load(simulate_args), simulate_args.threads, simulate_args.out_path);
    } else if (scan->parsed()) {
      if (scan_tau <= 0.0 || scan_resolution < 2) {
        std::cerr << "scan: --tau must be positive and --resolution at least 2\n";
        return kExitConfig;
      }
      cmd_scan(scan_tau, scan_resolution, scan_args.threads, scan_sufficiency,
               scan_args.out_path);
    } else if (validate->parsed()) {
      std::vector<CheckResult> results;
      try {
        results = run_acceptance(validate_threads, inject_failure);
      } catch (const std::invalid_argument& e) {
        std::cerr << "validate: " << e.what() << "\n";
        return kExitConfig;
      }
      bool all = true;
      for (const auto& r : results) {
        std::cout << format_line(r) << "\n";
        all = all && r.pass;
      }
      if (!validate_out.empty()) write_json_atomic(validate_out, report_json(results));
      std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";
      return all ? kExitOk : kExitAcceptance;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qsm::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
