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

#include "commands.hpp"

#include <algorithm>
#include <chrono>

#include "output.hpp"
#include "qsm/two_level.hpp"
#include "qsm/volterra.hpp"
#include "qsm/version.hpp"

namespace qsm::tool {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string level_label(int index, int dimension) {
  if (dimension == 2) return index == 0 ? "p" : "m";
  return std::to_string(index);
}

// Markov rate matrices translate into a jump chain plus point-mass memory
// functions; states with vanishing exit rate become absorbing self-loops.
std::pair<Eigen::MatrixXd, std::vector<MemoryFunction>> markov_kernel(const MarkovSpec& spec) {
  const int s = spec.states();
  const Eigen::VectorXd exit = spec.exit_rates();
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(s, s);
  std::vector<MemoryFunction> memory;
  for (int n = 0; n < s; ++n) {
    if (exit(n) > 0.0) {
      pi.col(n) = spec.rates.col(n) / exit(n);
      memory.push_back(MemoryFunction::delta(exit(n)));
    } else {
      pi(n, n) = 1.0;
      memory.push_back(MemoryFunction::zero());
    }
  }
  return {pi, std::move(memory)};
}

nlohmann::json slice_to_json(const CPSlice& slice, const TimeGrid& grid) {
  nlohmann::json doc = {
      {"verdict", slice.holds ? "holds" : "violated"},
      {"hypothesis_ok", slice.hypothesis_ok},
      {"min_eigenvalue", slice.min_eigenvalue},
  };
  if (slice.first_violation)
    doc["first_violation_time"] = grid.time(*slice.first_violation);
  else
    doc["first_violation_time"] = nullptr;
  return doc;
}

}  // namespace

void cmd_evolve(const KernelConfig& config, const std::filesystem::path& out) {
  const auto start = Clock::now();
  RunManifest manifest;
  manifest.command = "evolve";
  manifest.config_hash = config_hash(config.raw);
  manifest.config = config.raw;
  manifest.grid = config.grid;
  manifest.seed = config.seed;

  if (config.model == KernelConfig::Model::quantum) {
    const auto& spec = *config.quantum;
    const int d = spec.dimension();
    const auto prop = build_propagator(spec, config.grid);
    Eigen::MatrixXcd rho0 = config.initial_density.value_or(
        [&] {
          Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(d, d);
          r(0, 0) = 1.0;
          return r;
        }());
    (void)DensityMatrix(rho0);  // validates the initial state

    std::vector<std::string> columns = {"t"};
    for (int n = 0; n < d; ++n)
      for (int m = 0; m < d; ++m) {
        const std::string label = "rho_" + level_label(n, d) + level_label(m, d);
        columns.push_back(label);
        columns.push_back(label + "_im");
      }
    CsvWriter csv(columns);
    std::vector<double> row(columns.size());
    for (std::size_t i = 0; i < config.grid.size(); ++i) {
      const Eigen::MatrixXcd rho = prop.apply(i, rho0);
      row[0] = config.grid.time(i);
      std::size_t c = 1;
      for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m) {
          row[c++] = rho(n, m).real();
          row[c++] = rho(n, m).imag();
        }
      csv.add_row(row);
    }
    csv.write(out);
    if (!(prop.trace_drift <= 1e-6 && prop.hermiticity_drift <= 1e-6))  // NaN-safe
      throw NumericError("evolve: propagator drift exceeded 1e-6");
  } else {
    PropagationResult result = [&] {
      if (config.model == KernelConfig::Model::markov) {
        const auto [pi, memory] = markov_kernel(*config.markov);
        return solve_gme(pi, memory, config.grid);
      }
      return solve_gme(*config.classical, config.grid);
    }();
    const int s = static_cast<int>(result.transition.front().rows());

    std::vector<std::string> columns = {"t"};
    for (int m = 0; m < s; ++m)
      for (int n = 0; n < s; ++n)
        columns.push_back("T_" + std::to_string(m) + std::to_string(n));
    const bool with_occupation = config.initial_occupation.has_value();
    if (with_occupation)
      for (int n = 0; n < s; ++n) columns.push_back("P_" + std::to_string(n));

    CsvWriter csv(columns);
    std::vector<double> row(columns.size());
    for (std::size_t i = 0; i < config.grid.size(); ++i) {
      row[0] = config.grid.time(i);
      std::size_t c = 1;
      for (int m = 0; m < s; ++m)
        for (int n = 0; n < s; ++n) row[c++] = result.transition[i](m, n);
      if (with_occupation) {
        const Eigen::VectorXd p = result.transition[i] * *config.initial_occupation;
        for (int n = 0; n < s; ++n) row[c++] = p(n);
      }
      csv.add_row(row);
    }
    csv.write(out);
  }

  manifest.outputs = {out.filename().string()};
  manifest.wall_clock_seconds = seconds_since(start);
  manifest.write(out.string() + ".manifest.json");
}

void cmd_check_cp(const KernelConfig& config, const std::filesystem::path& out) {
  if (config.model != KernelConfig::Model::quantum)
    throw ConfigError("check-cp requires a quantum config");
  const auto start = Clock::now();
  const auto& spec = *config.quantum;
  const auto report = check_complete_positivity(spec, config.grid);

  nlohmann::json doc = {
      {"grid",
       {{"step", config.grid.step},
        {"count", config.grid.count},
        {"horizon", config.grid.horizon()}}},
      {"semigroup", report.semigroup},
  };
  nlohmann::json conditions;
  if (report.factor_condition)
    conditions["factor_matrix"] = slice_to_json(*report.factor_condition, config.grid);
  nlohmann::json gain = nlohmann::json::array();
  for (const auto& slice : report.gain_conditions)
    gain.push_back(slice_to_json(slice, config.grid));
  conditions["gain"] = gain;
  if (report.lattice_condition)
    conditions["lattice"] = slice_to_json(*report.lattice_condition, config.grid);
  else
    conditions["lattice"] = nullptr;
  doc["conditions"] = conditions;

  // The two sufficient conditions are reported separately and combined only
  // as "both hold => completely positive"; the lattice condition, when
  // available, is decisive on its own.
  bool gains_hold = true;
  for (const auto& slice : report.gain_conditions) gains_hold = gains_hold && slice.holds;
  doc["summary"] = {
      {"sufficient_conditions_hold",
       report.factor_condition && report.factor_condition->holds && gains_hold},
      {"verdict", report.lattice_condition
                      ? (report.lattice_condition->holds ? "cp" : "violated")
                      : (report.factor_condition->holds && gains_hold ? "cp" : "undecided")},
  };

  write_json_atomic(out, doc);

  RunManifest manifest;
  manifest.command = "check-cp";
  manifest.config_hash = config_hash(config.raw);
  manifest.config = config.raw;
  manifest.grid = config.grid;
  manifest.seed = config.seed;
  manifest.outputs = {out.filename().string()};
  manifest.wall_clock_seconds = seconds_since(start);
  manifest.write(out.string() + ".manifest.json");
}

void cmd_scan(double tau, int resolution, int threads, bool sufficiency_sweep,
              const std::filesystem::path& out) {
  const auto start = Clock::now();
  const auto scan = scan_region(tau, resolution, threads);

  CsvWriter csv({"r_minus", "r_plus", "tau", "delta", "sign"});
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j)
      csv.add_row({scan.r_minus[static_cast<std::size_t>(i)],
                   scan.r_plus[static_cast<std::size_t>(j)], tau, scan.gap(i, j),
                   static_cast<double>(scan.sign(i, j))});
  csv.write(out);

  // Per-row crossing of the upper sign boundary; the median ratio estimates
  // the critical r_plus/r_minus.
  std::vector<double> ratios;
  for (int i = 0; i < resolution; ++i) {
    const double rm = scan.r_minus[static_cast<std::size_t>(i)];
    if (rm < 0.05 || cp_boundary_ratio() * rm > 0.95) continue;
    for (int j = resolution - 1; j > 0; --j) {
      if (scan.sign(i, j) < 0 && scan.sign(i, j - 1) > 0) {
        const double crossing =
            0.5 * (scan.r_plus[static_cast<std::size_t>(j)] +
                   scan.r_plus[static_cast<std::size_t>(j - 1)]);
        ratios.push_back(crossing / rm);
        break;
      }
    }
  }
  nlohmann::json summary = {
      {"tau", tau},
      {"resolution", resolution},
      {"negative_cells", (scan.sign.array() < 0).count()},
      {"zero_cells", (scan.sign.array() == 0).count()},
  };
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    const double estimate = ratios[ratios.size() / 2];
    summary["boundary_ratio_estimate"] = estimate;
    summary["boundary_ratio_theory"] = cp_boundary_ratio();
    summary["boundary_ratio_deviation"] = std::abs(estimate - cp_boundary_ratio());
  } else {
    summary["boundary_ratio_estimate"] = nullptr;
  }

  if (sufficiency_sweep) {
    // Observed status of the conjecture that the wedge between the critical
    // ratios stays completely positive at all times: reported, not asserted.
    const std::vector<double> taus = {0.01, 0.05, 0.1, 0.25, 0.5, 1.0,  2.0,  3.0,
                                      5.0,  7.5,  10.0, 15.0, 20.0, 30.0, 40.0, 50.0};
    const auto wedge = sweep_cp_wedge(resolution, taus, threads);
    nlohmann::json sweep = {
        {"resolution", wedge.resolution},
        {"tau_max", taus.back()},
        {"points_checked", wedge.points_checked},
        {"min_gap", wedge.min_gap},
    };
    if (wedge.counterexample) {
      sweep["counterexample"] = {{"r_minus", wedge.counterexample->r_minus},
                                 {"r_plus", wedge.counterexample->r_plus},
                                 {"tau", wedge.counterexample->tau},
                                 {"gap", wedge.counterexample->gap}};
    } else {
      sweep["counterexample"] = nullptr;
    }
    summary["sufficiency_sweep"] = sweep;
  }

  const auto summary_path = out.string() + ".summary.json";
  write_json_atomic(summary_path, summary);

  RunManifest manifest;
  manifest.command = "scan";
  manifest.config_hash = config_hash(nlohmann::json{{"tau", tau}, {"resolution", resolution}});
  manifest.grid = TimeGrid(tau, 1);
  manifest.outputs = {out.filename().string(),
                      std::filesystem::path(summary_path).filename().string()};
  manifest.wall_clock_seconds = seconds_since(start);
  manifest.write(out.string() + ".manifest.json");
}

void cmd_simulate(const KernelConfig& config, int threads, const std::filesystem::path& out) {
  if (config.model != KernelConfig::Model::classical)
    throw ConfigError("simulate requires a classical config");
  const auto start = Clock::now();
  const auto& spec = *config.classical;

  KernelConfig::Simulation sim = config.simulation.value_or(KernelConfig::Simulation{});
  if (sim.sample_times.empty()) {
    for (int k = 1; k <= 10; ++k)
      sim.sample_times.push_back(config.grid.horizon() * k / 10.0);
  }
  if (sim.initial_state < 0 || sim.initial_state >= spec.states())
    throw ConfigError("simulation.initial_state out of range");

  const auto estimate = simulate_trajectories(spec, sim.initial_state, sim.sample_times,
                                              sim.trajectories, config.seed, threads);

  std::vector<std::string> columns = {"t"};
  for (int n = 0; n < spec.states(); ++n) {
    columns.push_back("P_" + std::to_string(n));
    columns.push_back("se_" + std::to_string(n));
  }
  CsvWriter csv(columns);
  std::vector<double> row(columns.size());
  for (std::size_t k = 0; k < estimate.sample_times.size(); ++k) {
    row[0] = estimate.sample_times[k];
    std::size_t c = 1;
    for (int n = 0; n < spec.states(); ++n) {
      row[c++] = estimate.occupation(n, static_cast<Eigen::Index>(k));
      row[c++] = estimate.std_error(n, static_cast<Eigen::Index>(k));
    }
    csv.add_row(row);
  }
  csv.write(out);

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.config_hash = config_hash(config.raw);
  manifest.config = config.raw;
  manifest.grid = config.grid;
  manifest.seed = config.seed;
  manifest.rng = estimate.rng;
  manifest.outputs = {out.filename().string()};
  manifest.wall_clock_seconds = seconds_since(start);
  manifest.write(out.string() + ".manifest.json");
}

}  // namespace qsm::tool
