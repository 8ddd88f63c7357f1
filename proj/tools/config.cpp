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

#include "config.hpp"

#include <fstream>

namespace qsm::tool {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

const json& require(const json& doc, const std::string& field) {
  if (!doc.contains(field)) fail(field, "missing");
  return doc.at(field);
}

double require_number(const json& doc, const std::string& field) {
  const json& v = require(doc, field);
  if (!v.is_number()) fail(field, "must be a number");
  return v.get<double>();
}

int require_int(const json& doc, const std::string& field) {
  const json& v = require(doc, field);
  if (!v.is_number_integer()) fail(field, "must be an integer");
  return v.get<int>();
}

std::vector<double> number_list(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) fail(field, "must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Eigen::MatrixXd parse_matrix(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) fail(field, "must be a non-empty array of rows");
  const auto rows = v.size();
  Eigen::MatrixXd m;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = number_list(v.at(i), field);
    if (i == 0) m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(row.size()));
    if (static_cast<Eigen::Index>(row.size()) != m.cols()) fail(field, "rows differ in length");
    for (std::size_t j = 0; j < row.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
  }
  return m;
}

WaitingTime parse_waiting_time(const json& v, const std::string& field) {
  const std::string kind = require(v, "kind").get<std::string>();
  try {
    if (kind == "exponential") return WaitingTime::exponential(require_number(v, "rate"));
    if (kind == "special_erlang")
      return WaitingTime::special_erlang(require_number(v, "rate"), require_int(v, "stages"));
    if (kind == "generalized_erlang")
      return WaitingTime::generalized_erlang(number_list(require(v, "rates"), field + ".rates"));
    if (kind == "multi_exponential")
      return WaitingTime::multi_exponential(number_list(require(v, "weights"), field + ".weights"),
                                            number_list(require(v, "rates"), field + ".rates"));
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  }
  fail(field + ".kind", "unknown waiting-time kind '" + kind + "'");
}

MemoryFunction parse_memory(const json& v, const std::string& field) {
  const std::string kind = require(v, "kind").get<std::string>();
  try {
    if (kind == "zero") return MemoryFunction::zero();
    if (kind == "delta") return MemoryFunction::delta(require_number(v, "weight"));
    if (kind == "exponential")
      return MemoryFunction::exponential_decay(require_number(v, "kappa"),
                                               require_number(v, "gamma"));
    if (kind == "exponential_sum") {
      std::vector<ExpProfile> terms;
      for (const auto& t : require(v, "terms"))
        terms.push_back({require_number(t, "amplitude"), require_number(t, "rate")});
      const double weight = v.value("delta_weight", 0.0);
      return MemoryFunction::exponential_sum(weight, std::move(terms));
    }
    if (kind == "from_waiting_time")
      return parse_waiting_time(require(v, "waiting_time"), field + ".waiting_time")
          .memory_function();
  } catch (const std::domain_error& e) {
    fail(field, e.what());
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  }
  fail(field + ".kind", "unknown memory-function kind '" + kind + "'");
}

TimeGrid parse_grid(const json& doc) {
  if (!doc.contains("grid")) fail("grid", "missing");
  const json& g = doc.at("grid");
  const double step = require_number(g, "step");
  const double horizon = require_number(g, "horizon");
  try {
    return TimeGrid::from_horizon(step, horizon);
  } catch (const std::invalid_argument& e) {
    fail("grid", e.what());
  }
}

Eigen::MatrixXcd parse_density(const json& v, int dimension) {
  if (v.contains("level")) {
    const int level = require_int(v, "level");
    if (level < 0 || level >= dimension) fail("initial_state.level", "out of range");
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dimension, dimension);
    rho(level, level) = 1.0;
    return rho;
  }
  if (v.contains("populations")) {
    const auto p = number_list(v.at("populations"), "initial_state.populations");
    if (static_cast<int>(p.size()) != dimension) fail("initial_state.populations", "size mismatch");
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dimension, dimension);
    for (int n = 0; n < dimension; ++n) rho(n, n) = p[static_cast<std::size_t>(n)];
    return rho;
  }
  if (v.contains("matrix")) {
    const json& m = v.at("matrix");
    if (!m.is_array() || static_cast<int>(m.size()) != dimension)
      fail("initial_state.matrix", "must have one row per level");
    Eigen::MatrixXcd rho(dimension, dimension);
    for (int a = 0; a < dimension; ++a) {
      const json& row = m.at(static_cast<std::size_t>(a));
      if (!row.is_array() || static_cast<int>(row.size()) != dimension)
        fail("initial_state.matrix", "rows must have one [re, im] entry per level");
      for (int b = 0; b < dimension; ++b) {
        const json& cell = row.at(static_cast<std::size_t>(b));
        if (!cell.is_array() || cell.size() != 2) fail("initial_state.matrix", "entries are [re, im]");
        rho(a, b) = std::complex<double>(cell.at(0).get<double>(), cell.at(1).get<double>());
      }
    }
    return rho;
  }
  fail("initial_state", "expected 'level', 'populations' or 'matrix'");
}

}  // namespace

KernelConfig parse_config(const nlohmann::json& doc) {
  KernelConfig config;
  config.raw = doc;
  const std::string model = require(doc, "model").get<std::string>();
  config.grid = parse_grid(doc);
  config.seed = doc.value("seed", std::uint64_t{0});

  if (model == "quantum") {
    config.model = KernelConfig::Model::quantum;
    const int levels = require_int(doc, "levels");
    if (levels < 1) fail("levels", "must be positive");
    std::vector<MemoryFunction> memory;
    const json& mem = require(doc, "memory_functions");
    for (std::size_t n = 0; n < mem.size(); ++n)
      memory.push_back(parse_memory(mem.at(n), "memory_functions[" + std::to_string(n) + "]"));
    std::vector<MemoryFunction> hamiltonian;
    if (doc.contains("hamiltonian_eigenvalues")) {
      const json& ham = doc.at("hamiltonian_eigenvalues");
      for (std::size_t n = 0; n < ham.size(); ++n)
        hamiltonian.push_back(
            parse_memory(ham.at(n), "hamiltonian_eigenvalues[" + std::to_string(n) + "]"));
    }
    const auto pi = parse_matrix(require(doc, "jump_probabilities"), "jump_probabilities");
    if (pi.rows() != levels) fail("jump_probabilities", "size must match 'levels'");
    try {
      config.quantum =
          QuantumKernelSpec::lattice(pi, std::move(memory), std::move(hamiltonian));
    } catch (const std::invalid_argument& e) {
      fail("jump_probabilities/memory_functions", e.what());
    }
    if (doc.contains("initial_state"))
      config.initial_density = parse_density(doc.at("initial_state"), levels);
  } else if (model == "classical") {
    config.model = KernelConfig::Model::classical;
    const int states = require_int(doc, "states");
    const auto pi = parse_matrix(require(doc, "jump_probabilities"), "jump_probabilities");
    if (pi.rows() != states) fail("jump_probabilities", "size must match 'states'");
    std::vector<WaitingTime> waiting;
    const json& wt = require(doc, "waiting_times");
    for (std::size_t n = 0; n < wt.size(); ++n)
      waiting.push_back(parse_waiting_time(wt.at(n), "waiting_times[" + std::to_string(n) + "]"));
    try {
      config.classical = SemiMarkovSpec(pi, std::move(waiting));
    } catch (const std::invalid_argument& e) {
      fail("jump_probabilities/waiting_times", e.what());
    }
  } else if (model == "markov") {
    config.model = KernelConfig::Model::markov;
    const int states = require_int(doc, "states");
    const auto rates = parse_matrix(require(doc, "rates"), "rates");
    if (rates.rows() != states) fail("rates", "size must match 'states'");
    try {
      config.markov = MarkovSpec(rates);
    } catch (const std::invalid_argument& e) {
      fail("rates", e.what());
    }
  } else {
    fail("model", "must be 'quantum', 'classical' or 'markov'");
  }

  if (doc.contains("initial_occupation")) {
    const auto p = number_list(doc.at("initial_occupation"), "initial_occupation");
    config.initial_occupation = Eigen::Map<const Eigen::VectorXd>(
        p.data(), static_cast<Eigen::Index>(p.size()));
  }

  if (doc.contains("simulation")) {
    const json& sim = doc.at("simulation");
    KernelConfig::Simulation s;
    s.trajectories = sim.value("trajectories", std::uint64_t{10000});
    s.initial_state = sim.value("initial_state", 0);
    if (sim.contains("sample_times"))
      s.sample_times = number_list(sim.at("sample_times"), "simulation.sample_times");
    config.simulation = s;
  }
  return config;
}

KernelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

std::string config_hash(const nlohmann::json& doc) {
  const std::string canonical = doc.dump();
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return {buf};
}

void apply_overrides(KernelConfig& config, const Overrides& overrides) {
  if (overrides.grid_step || overrides.horizon) {
    const double step = overrides.grid_step.value_or(config.grid.step);
    const double horizon = overrides.horizon.value_or(config.grid.horizon());
    try {
      config.grid = TimeGrid::from_horizon(step, horizon);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("grid override: ") + e.what());
    }
    config.raw["grid"] = {{"step", step}, {"horizon", horizon}};
  }
  if (overrides.seed) {
    config.seed = *overrides.seed;
    config.raw["seed"] = *overrides.seed;
  }
}

}  // namespace qsm::tool
