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

#include <filesystem>

#include "config.hpp"

namespace qsm::tool {

// Exit-code contract: 0 success, 2 configuration error, 3 numeric failure,
// 4 acceptance failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitAcceptance = 4;

/// Time evolution: transition-probability CSV for classical/markov configs,
/// density-matrix component CSV for quantum configs, plus a manifest.
void cmd_evolve(const KernelConfig& config, const std::filesystem::path& out);

/// Complete-positivity report (JSON) for a quantum config.
void cmd_check_cp(const KernelConfig& config, const std::filesystem::path& out);

/// Sign map of the two-level short-time CP gap over (r_minus, r_plus), with a
/// boundary-ratio summary.  With `sufficiency_sweep` the wedge between the
/// critical ratios is additionally swept over times up to 50 and the outcome
/// reported (never asserted) in the summary.
void cmd_scan(double tau, int resolution, int threads, bool sufficiency_sweep,
              const std::filesystem::path& out);

/// Monte Carlo occupation estimates for a classical config.
void cmd_simulate(const KernelConfig& config, int threads, const std::filesystem::path& out);

}  // namespace qsm::tool
