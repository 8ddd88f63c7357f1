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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsm/grid.hpp"
#include "qsm/waiting_time.hpp"

namespace qsm {

/// Classical semi-Markov process in factorized form: the chain jumps from
/// state n to m with probability pi_mn after a sojourn drawn from the
/// per-state waiting time f_n, so the semi-Markov density is
/// q_mn(tau) = pi_mn f_n(tau).
class SemiMarkovSpec {
 public:
  /// `jump_prob` must be column-stochastic with non-negative entries and one
  /// waiting time per state.
  SemiMarkovSpec(Eigen::MatrixXd jump_prob, std::vector<WaitingTime> waiting);

  int states() const { return static_cast<int>(jump_prob_.cols()); }
  const Eigen::MatrixXd& jump_prob() const { return jump_prob_; }
  const WaitingTime& waiting(int n) const { return waiting_.at(static_cast<std::size_t>(n)); }

  /// q_mn(tau) = pi_mn f_n(tau).
  double semi_markov_density(int m, int n, double tau) const;

  /// Per-state memory functions, closed form when available, otherwise
  /// deconvolved numerically on the given grid.
  std::vector<MemoryFunction> memory_functions(const TimeGrid& grid) const;

 private:
  Eigen::MatrixXd jump_prob_;
  std::vector<WaitingTime> waiting_;
};

/// Memoryless limit: non-negative transition rates Gamma_mn with exit rates
/// lambda_n given by the column sums.
struct MarkovSpec {
  Eigen::MatrixXd rates;

  explicit MarkovSpec(Eigen::MatrixXd rates_);
  int states() const { return static_cast<int>(rates.cols()); }
  Eigen::VectorXd exit_rates() const { return rates.colwise().sum(); }
  /// Pauli generator Gamma - diag(lambda); columns sum to zero.
  Eigen::MatrixXd generator() const;
};

/// Solution of a classical evolution on a grid.
struct PropagationResult {
  TimeGrid grid;
  /// Conditional transition probabilities T(t_i); T(0) is the identity.
  std::vector<Eigen::MatrixXd> transition;
  /// Occupation probabilities P(t_i); filled by pauli_evolve and by the
  /// transition solvers when an initial distribution is supplied.
  std::vector<Eigen::VectorXd> occupation;
  /// Largest deviation of any column sum of T (or of sum P) from one.
  double conservation_drift = 0.0;
  /// Set when the kernel was purely instantaneous and the evolution was
  /// propagated exactly as a semigroup.
  bool semigroup = false;
};

/// Solves the generalized master equation
///   d/dt T_mn(t) = integral_0^t sum_k [W_mk(tau) T_kn(t-tau) - W_km(tau) T_mn(t-tau)] dtau
/// with W_mn = pi_mn k_n.  Throws NumericError if probability conservation
/// drifts by more than 1e-6.
PropagationResult solve_gme(const SemiMarkovSpec& spec, const TimeGrid& grid);

/// Kernel-level entry point taking the memory functions directly; states with
/// an identically vanishing memory function never jump (absorbing states).
PropagationResult solve_gme(const Eigen::MatrixXd& jump_prob,
                            std::span<const MemoryFunction> memory, const TimeGrid& grid);

/// Integrates the Pauli master equation dP/dt = (Gamma - diag(lambda)) P with
/// the same predictor-corrector stepping as the memory solvers; serves as the
/// memoryless oracle.
PropagationResult pauli_evolve(const MarkovSpec& spec, const Eigen::VectorXd& p0,
                               const TimeGrid& grid);

/// Monte Carlo estimate of the occupation probabilities.
struct TrajectoryEstimate {
  std::vector<double> sample_times;
  Eigen::MatrixXd occupation;  ///< states x sample_times
  Eigen::MatrixXd std_error;   ///< binomial standard errors
  std::size_t trajectories = 0;
  std::string rng;  ///< generator identifier recorded in run manifests
};

/// Draws renewal-chain trajectories (sojourn from f_n, next state from the
/// pi column) and tallies the state at each sample time.  Deterministic for a
/// given seed independent of `threads`: trajectories are partitioned into
/// fixed blocks, each block runs its own generator seeded from (seed, block),
/// and block results are merged in order.
TrajectoryEstimate simulate_trajectories(const SemiMarkovSpec& spec, int initial_state,
                                         std::span<const double> sample_times,
                                         std::size_t n_trajectories, std::uint64_t seed,
                                         int threads = 1);

/// Largest residual |W^_mn(u) g^_n(u) - q^_mn(u)| over all matrix entries,
/// with the transforms evaluated numerically.  Exercises the Laplace-domain
/// identities tying kernel, survival probability and semi-Markov density; a
/// test-only operation.
double laplace_consistency(const SemiMarkovSpec& spec, double u);

}  // namespace qsm
