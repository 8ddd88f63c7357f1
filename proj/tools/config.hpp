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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsm/classical.hpp"
#include "qsm/quantum.hpp"

namespace qsm::tool {

/// Configuration problems carry the offending field in the message and map to
/// exit code 2.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parsed experiment description: exactly one of the three model specs is
/// engaged.
struct KernelConfig {
  enum class Model { quantum, classical, markov };

  Model model = Model::classical;
  std::optional<QuantumKernelSpec> quantum;
  std::optional<SemiMarkovSpec> classical;
  std::optional<MarkovSpec> markov;

  TimeGrid grid{1e-3, 1000};
  std::uint64_t seed = 0;

  std::optional<Eigen::MatrixXcd> initial_density;  // quantum runs
  std::optional<Eigen::VectorXd> initial_occupation;

  struct Simulation {
    std::size_t trajectories = 10000;
    int initial_state = 0;
    std::vector<double> sample_times;  // defaults to ten even times over the horizon
  };
  std::optional<Simulation> simulation;

  nlohmann::json raw;  // canonical echo, used for hashing and reproduction
};

KernelConfig parse_config(const nlohmann::json& doc);
KernelConfig load_config(const std::filesystem::path& path);

/// Stable 64-bit FNV-1a hash of the canonical serialization.
std::string config_hash(const nlohmann::json& doc);

/// Grid/seed overrides from the command line (applied after parsing).
struct Overrides {
  std::optional<double> grid_step;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
};
void apply_overrides(KernelConfig& config, const Overrides& overrides);

}  // namespace qsm::tool
