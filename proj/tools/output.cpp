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

#include "output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "qsm/version.hpp"

namespace qsm::tool {

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return {buf};
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size())
    throw std::logic_error("csv: row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) body_ += ',';
    body_ += format_number(values[i]);
  }
  body_ += '\n';
  ++rows_;
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::string content;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) content += ',';
    content += columns_[i];
  }
  content += '\n';
  content += body_;
  write_text_atomic(path, content);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text_atomic(path, doc.dump(2) + "\n");
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json doc = {
      {"command", command},
      {"config_hash", config_hash},
      {"version", qsm::version},
      {"grid", {{"step", grid.step}, {"count", grid.count}, {"horizon", grid.horizon()}}},
      {"seed", seed},
      {"wall_clock_seconds", wall_clock_seconds},
      {"outputs", outputs},
  };
  if (!rng.empty()) doc["rng"] = rng;
  if (!config.is_null()) doc["config"] = config;
  return doc;
}

void RunManifest::write(const std::filesystem::path& path) const {
  write_json_atomic(path, to_json());
}

}  // namespace qsm::tool
