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

#include <string>
#include <vector>

#include <json.hpp>

namespace qsm::tool {

/// One acceptance check with its pinned threshold.
struct CheckResult {
  std::string name;
  std::string detail;
  double measured = 0.0;
  double threshold = 0.0;
  /// Most checks bound an error from above; ratio checks bound from below.
  bool larger_is_better = false;
  bool pass = false;
  /// Marks the one check whose stated target contradicts the exact short-time
  /// expansion of the gap (the cubic term vanishes identically); it is run
  /// and reported faithfully, and the corrected quartic law is checked by a
  /// separate entry.
  bool known_defect = false;
  double seconds = 0.0;
};

/// Runs the full oracle battery.  `inject_failure` forces the named check to
/// fail (testing aid for the nonzero-exit path); throws std::invalid_argument
/// for an unknown name.
std::vector<CheckResult> run_acceptance(int threads = 1, const std::string& inject_failure = {});

/// Deterministic report (no timings), suitable for byte-identical reruns.
nlohmann::json report_json(const std::vector<CheckResult>& results);

/// One "name: PASS/FAIL measured=... threshold=..." line per check.
std::string format_line(const CheckResult& result);

}  // namespace qsm::tool
