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
#include <string>
#include <vector>

#include <json.hpp>

#include "qsm/grid.hpp"

namespace qsm::tool {

/// Numbers are emitted with 17 significant digits so round-trips are exact
/// and reruns are byte-identical.
std::string format_number(double value);

/// CSV table accumulated in memory and written atomically (temp + rename).
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<double>& values);
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::string body_;
  std::size_t rows_ = 0;
};

void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& doc);

/// Provenance record written next to every command output.
struct RunManifest {
  std::string command;
  std::string config_hash;
  TimeGrid grid;
  std::uint64_t seed = 0;
  double wall_clock_seconds = 0.0;
  std::vector<std::string> outputs;
  std::string rng;          // set by the Monte Carlo driver
  nlohmann::json config;    // canonical config echo; re-parses to the same spec

  nlohmann::json to_json() const;
  void write(const std::filesystem::path& path) const;
};

}  // namespace qsm::tool
