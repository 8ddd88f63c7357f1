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

#include "qsm/classical.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "qsm/volterra.hpp"

namespace qsm {

namespace {

void require_column_stochastic(const Eigen::MatrixXd& pi) {
  if (pi.rows() != pi.cols()) throw std::invalid_argument("jump probabilities must be square");
  for (Eigen::Index n = 0; n < pi.cols(); ++n) {
    double sum = 0.0;
    for (Eigen::Index m = 0; m < pi.rows(); ++m) {
      if (pi(m, n) < 0.0) throw std::invalid_argument("jump probabilities must be non-negative");
      sum += pi(m, n);
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("jump probability columns must sum to one");
  }
}

double max_column_drift(const Eigen::MatrixXd& t) {
  return (t.colwise().sum().array() - 1.0).abs().maxCoeff();
}

// Assembles the GME kernel (pi - I) * diag(k_n) for the Volterra solver.
VolterraKernel<Eigen::MatrixXd> gme_kernel(const Eigen::MatrixXd& pi,
                                           std::span<const MemoryFunction> memory,
                                           const TimeGrid& grid) {
  const auto s = pi.cols();
  if (static_cast<Eigen::Index>(memory.size()) != s)
    throw std::invalid_argument("solve_gme: one memory function per state required");

  VolterraKernel<Eigen::MatrixXd> kernel;
  kernel.grid = grid;
  kernel.local = Eigen::MatrixXd::Zero(s, s);
  const Eigen::MatrixXd flow = pi - Eigen::MatrixXd::Identity(s, s);

  std::vector<Eigen::MatrixXd> columns;  // gain-minus-loss matrix of state n
  columns.reserve(memory.size());
  for (Eigen::Index n = 0; n < s; ++n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(s, s);
    m.col(n) = flow.col(n);
    columns.push_back(std::move(m));
    kernel.local += memory[n].delta_weight() * columns.back();
  }

  const bool all_exponential =
      std::all_of(memory.begin(), memory.end(),
                  [](const MemoryFunction& k) { return k.is_exponential_sum(); });
  if (all_exponential) {
    for (Eigen::Index n = 0; n < s; ++n)
      for (const auto& term : memory[n].exponential_terms())
        kernel.exp_terms.push_back({term, columns[static_cast<std::size_t>(n)]});
  } else {
    kernel.samples.assign(grid.size(), Eigen::MatrixXd::Zero(s, s));
    for (Eigen::Index n = 0; n < s; ++n)
      for (std::size_t i = 0; i < grid.size(); ++i)
        kernel.samples[i] += memory[n].regular(grid.time(i)) * columns[static_cast<std::size_t>(n)];
  }
  return kernel;
}

}  // namespace

// ---------------------------------------------------------------------------
// Specs

SemiMarkovSpec::SemiMarkovSpec(Eigen::MatrixXd jump_prob, std::vector<WaitingTime> waiting)
    : jump_prob_(std::move(jump_prob)), waiting_(std::move(waiting)) {
  require_column_stochastic(jump_prob_);
  if (static_cast<Eigen::Index>(waiting_.size()) != jump_prob_.cols())
    throw std::invalid_argument("semi-Markov spec: one waiting time per state required");
}

double SemiMarkovSpec::semi_markov_density(int m, int n, double tau) const {
  return jump_prob_(m, n) * waiting(n).density(tau);
}

std::vector<MemoryFunction> SemiMarkovSpec::memory_functions(const TimeGrid& grid) const {
  std::vector<MemoryFunction> out;
  out.reserve(waiting_.size());
  for (const auto& w : waiting_) {
    if (w.has_closed_form_memory()) {
      out.push_back(w.memory_function());
      continue;
    }
    const auto f = SampledReal::tabulate(grid, [&w](double t) { return w.density(t); });
    const auto g = SampledReal::tabulate(grid, [&w](double t) { return w.survival(t); });
    auto k = invert_memory(f, g);
    out.push_back(MemoryFunction::from_callable(
        k.delta_weight, [k = std::move(k)](double t) {
          // Nearest-sample lookup; the solvers only evaluate on the grid.
          const auto i = static_cast<std::size_t>(std::llround(t / k.grid.step));
          return k.values[std::min(i, k.grid.count)];
        }));
  }
  return out;
}

MarkovSpec::MarkovSpec(Eigen::MatrixXd rates_) : rates(std::move(rates_)) {
  if (rates.rows() != rates.cols()) throw std::invalid_argument("rate matrix must be square");
  if ((rates.array() < 0.0).any()) throw std::invalid_argument("rates must be non-negative");
}

Eigen::MatrixXd MarkovSpec::generator() const {
  Eigen::MatrixXd g = rates;
  g -= Eigen::MatrixXd(exit_rates().asDiagonal());
  return g;
}

// ---------------------------------------------------------------------------
// Solvers

PropagationResult solve_gme(const Eigen::MatrixXd& jump_prob,
                            std::span<const MemoryFunction> memory, const TimeGrid& grid) {
  require_column_stochastic(jump_prob);
  const auto kernel = gme_kernel(jump_prob, memory, grid);
  const auto s = jump_prob.cols();

  PropagationResult result;
  result.grid = grid;
  result.semigroup = kernel.pure_delta();
  result.transition =
      solve_volterra_ide(kernel, Eigen::MatrixXd(Eigen::MatrixXd::Identity(s, s)));
  for (const auto& t : result.transition)
    result.conservation_drift = std::max(result.conservation_drift, max_column_drift(t));
  if (!(result.conservation_drift <= 1e-6))  // NaN-safe
    throw NumericError("solve_gme: probability conservation drifted beyond 1e-6");
  return result;
}

PropagationResult solve_gme(const SemiMarkovSpec& spec, const TimeGrid& grid) {
  const auto memory = spec.memory_functions(grid);
  return solve_gme(spec.jump_prob(), memory, grid);
}

PropagationResult pauli_evolve(const MarkovSpec& spec, const Eigen::VectorXd& p0,
                               const TimeGrid& grid) {
  if (p0.size() != spec.states()) throw std::invalid_argument("pauli_evolve: size mismatch");
  if ((p0.array() < 0.0).any() || std::abs(p0.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("pauli_evolve: p0 must be a probability vector");

  // Time-local rate equation integrated with the usual predictor-corrector
  // (not the exact exponential): this is the reference the memory solvers are
  // compared against at matching step size.
  const Eigen::MatrixXd gen = spec.generator();
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(spec.states(), spec.states());
  auto no_memory = [&](std::size_t, const std::vector<Eigen::VectorXd>&) {
    return Eigen::VectorXd(Eigen::VectorXd::Zero(spec.states()));
  };
  PropagationResult result;
  result.grid = grid;
  result.occupation = detail::volterra_march(grid, gen, zero, Eigen::VectorXd(p0), no_memory);
  for (const auto& p : result.occupation)
    result.conservation_drift = std::max(result.conservation_drift, std::abs(p.sum() - 1.0));
  return result;
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace {

constexpr std::size_t kTrajectoryBlock = 4096;

struct BlockCounts {
  std::vector<std::uint64_t> counts;  // states x sample_times, row-major
};

void run_block(const SemiMarkovSpec& spec, int n0, std::span<const double> times,
               std::size_t n_traj, std::uint64_t seed, std::uint64_t block, BlockCounts& out) {
  const auto s = static_cast<std::size_t>(spec.states());
  out.counts.assign(s * times.size(), 0);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block)};
  std::mt19937_64 rng(seq);
  const double t_max = times.empty() ? 0.0 : times.back();
  for (std::size_t traj = 0; traj < n_traj; ++traj) {
    int state = n0;
    double t = 0.0;
    std::size_t next_sample = 0;
    while (next_sample < times.size()) {
      const double sojourn = spec.waiting(state).sample(rng);
      const double t_jump = t + sojourn;
      while (next_sample < times.size() && times[next_sample] < t_jump) {
        ++out.counts[static_cast<std::size_t>(state) * times.size() + next_sample];
        ++next_sample;
      }
      if (t_jump > t_max) break;
      t = t_jump;
      // Next state from the pi column of the current state.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      double acc = 0.0;
      int next = spec.states() - 1;
      for (int m = 0; m < spec.states(); ++m) {
        acc += spec.jump_prob()(m, state);
        if (u < acc) {
          next = m;
          break;
        }
      }
      state = next;
    }
  }
}

}  // namespace

TrajectoryEstimate simulate_trajectories(const SemiMarkovSpec& spec, int initial_state,
                                         std::span<const double> sample_times,
                                         std::size_t n_trajectories, std::uint64_t seed,
                                         int threads) {
  if (n_trajectories == 0)
    throw std::invalid_argument("simulate_trajectories: need at least one trajectory");
  if (initial_state < 0 || initial_state >= spec.states())
    throw std::invalid_argument("simulate_trajectories: initial state out of range");
  std::vector<double> times(sample_times.begin(), sample_times.end());
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("simulate_trajectories: sample times must be sorted");

  const std::size_t n_blocks = (n_trajectories + kTrajectoryBlock - 1) / kTrajectoryBlock;
  std::vector<BlockCounts> blocks(n_blocks);
  auto block_size = [&](std::size_t b) {
    return std::min(kTrajectoryBlock, n_trajectories - b * kTrajectoryBlock);
  };

  const int n_threads = std::max(1, threads);
  if (n_threads == 1 || n_blocks == 1) {
    for (std::size_t b = 0; b < n_blocks; ++b)
      run_block(spec, initial_state, times, block_size(b), seed, b, blocks[b]);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> cursor{0};
    for (int w = 0; w < n_threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t b = cursor.fetch_add(1); b < n_blocks; b = cursor.fetch_add(1))
          run_block(spec, initial_state, times, block_size(b), seed, b, blocks[b]);
      });
    for (auto& th : pool) th.join();
  }

  const auto s = static_cast<std::size_t>(spec.states());
  TrajectoryEstimate est;
  est.sample_times = times;
  est.trajectories = n_trajectories;
  est.rng = "mt19937_64/seed_seq{seed,block}/block=" + std::to_string(kTrajectoryBlock);
  est.occupation = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s),
                                         static_cast<Eigen::Index>(times.size()));
  for (const auto& b : blocks)  // block order fixed: results independent of threading
    for (std::size_t n = 0; n < s; ++n)
      for (std::size_t k = 0; k < times.size(); ++k)
        est.occupation(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) +=
            static_cast<double>(b.counts[n * times.size() + k]);
  est.occupation /= static_cast<double>(n_trajectories);
  est.std_error = (est.occupation.array() * (1.0 - est.occupation.array()) /
                   static_cast<double>(n_trajectories))
                      .sqrt()
                      .matrix();
  return est;
}

// ---------------------------------------------------------------------------
// Laplace-domain consistency

double laplace_consistency(const SemiMarkovSpec& spec, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("laplace_consistency: u must be positive");
  double horizon = -std::log(1e-12) / u;
  for (int n = 0; n < spec.states(); ++n)
    horizon = std::max(horizon, spec.waiting(n).horizon_for(1e-10));
  const auto grid = TimeGrid::from_horizon(1e-3, horizon);
  const auto memory = spec.memory_functions(grid);

  double residual = 0.0;
  for (int n = 0; n < spec.states(); ++n) {
    const auto& w = spec.waiting(n);
    const auto f_hat =
        laplace_probe(SampledReal::tabulate(grid, [&](double t) { return w.density(t); }), u);
    const auto g_hat =
        laplace_probe(SampledReal::tabulate(grid, [&](double t) { return w.survival(t); }), u);
    const auto k_hat = laplace_probe(memory[static_cast<std::size_t>(n)].sample(grid), u);
    for (int m = 0; m < spec.states(); ++m) {
      const double pi = spec.jump_prob()(m, n);
      residual = std::max(residual, std::abs(pi * (k_hat.value * g_hat.value - f_hat.value)));
    }
  }
  return residual;
}

}  // namespace qsm
