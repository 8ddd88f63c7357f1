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

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qsm/classical.hpp"
#include "qsm/grid.hpp"
#include "qsm/waiting_time.hpp"

namespace qsm {

/// Validated density matrix: Hermitian, unit trace, positive semidefinite
/// (within tight tolerances).
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd rho);
  static DensityMatrix pure(int dimension, int level);
  static DensityMatrix from_populations(const Eigen::VectorXd& populations);

  const Eigen::MatrixXcd& matrix() const { return rho_; }
  int dimension() const { return static_cast<int>(rho_.rows()); }

 private:
  Eigen::MatrixXcd rho_;
};

/// Completely positive map in Kraus form, B(rho) = sum_a W_a rho W_a^dag.
struct KrausMap {
  std::vector<Eigen::MatrixXcd> operators;
};

/// Memory-kernel master equation with loss part diagonal in a fixed basis:
///
///   K(tau) rho = -i[H(tau), rho]
///              + sum_n k_n(tau) * (B_n rho - 1/2 {|n><n|, rho})
///
/// with H(tau) = sum_n eps_n(tau) |n><n|.  The gain maps B_n are either the
/// lattice form sum_m pi_mn |m><n| rho |n><m| or general completely positive
/// time-independent maps; in both cases sum_a W_a^dag W_a = |n><n| so the
/// kernel annihilates the trace.  The memory functions k_n may take negative
/// values; the Hamiltonian profiles eps_n must have no point mass.
class QuantumKernelSpec {
 public:
  static QuantumKernelSpec lattice(Eigen::MatrixXd jump_prob, std::vector<MemoryFunction> memory,
                                   std::vector<MemoryFunction> hamiltonian = {});
  static QuantumKernelSpec kraus(std::vector<KrausMap> gain_maps,
                                 std::vector<MemoryFunction> memory,
                                 std::vector<MemoryFunction> hamiltonian = {});

  int dimension() const { return dimension_; }
  bool is_lattice() const { return jump_prob_.has_value(); }
  const Eigen::MatrixXd& jump_prob() const;
  const MemoryFunction& memory(int n) const { return memory_.at(static_cast<std::size_t>(n)); }
  const std::vector<MemoryFunction>& memory() const { return memory_; }
  /// eps_n profile; identically zero when none was supplied.
  const MemoryFunction& hamiltonian(int n) const;
  bool has_hamiltonian() const { return !hamiltonian_.empty(); }

  /// Vectorized gain map B_n in the row-major matrix-unit basis (d^2 x d^2).
  Eigen::MatrixXcd gain_superoperator(int n) const;
  /// True when every memory function is a pure point mass and there is no
  /// Hamiltonian: the dynamics is an exact semigroup.
  bool is_markovian() const;

 private:
  QuantumKernelSpec() = default;
  int dimension_ = 0;
  std::optional<Eigen::MatrixXd> jump_prob_;
  std::vector<KrausMap> gain_maps_;
  std::vector<MemoryFunction> memory_;
  std::vector<MemoryFunction> hamiltonian_;
};

/// Pairwise decay factors G(t_i): Hermitian d x d matrices whose entry (n,m)
/// solves the scalar memory equation with kernel -(z_n + z_m^*),
/// z_n = k_n/2 + i*eps_n.  The diagonal coincides with the survival
/// probabilities of the associated sojourn process.
struct FactorGrid {
  TimeGrid grid;
  std::vector<Eigen::MatrixXcd> values;
};

FactorGrid decoherence_factors(const QuantumKernelSpec& spec, const TimeGrid& grid);

/// Time-sampled quantum dynamical map V(t_i) as d^2 x d^2 superoperators in
/// the row-major matrix-unit basis.
struct PropagatorGrid {
  TimeGrid grid;
  int dimension = 0;
  std::vector<Eigen::MatrixXcd> maps;
  double trace_drift = 0.0;
  double hermiticity_drift = 0.0;
  bool semigroup = false;

  /// V(t_i) applied to a state.
  Eigen::MatrixXcd apply(std::size_t i, const Eigen::MatrixXcd& rho) const;
};

/// Integrates dV/dt = integral_0^t K(tau) V(t-tau) dtau, V(0) = I, on the
/// full vectorized kernel.  A purely instantaneous kernel is propagated
/// exactly as the semigroup exp(L t).
PropagatorGrid build_propagator(const QuantumKernelSpec& spec, const TimeGrid& grid);

/// Resums the propagator as V0 + V0*B*V0 + V0*B*V0*B*V0 + ... around the loss
/// part; an independent cross-check of build_propagator.  Truncates once the
/// next term's sup norm drops below tail_tol; throws NumericError if that
/// does not happen within max_order convolution powers.
PropagatorGrid dyson_propagator(const QuantumKernelSpec& spec, const TimeGrid& grid,
                                double tail_tol = 1e-8, int max_order = 12);

/// Verdict slice of one complete-positivity condition.
struct CPSlice {
  std::vector<double> min_eigenvalue;  ///< CP margin at each grid point
  std::optional<std::size_t> first_violation;
  bool holds = true;
  /// Whether the condition's hypothesis was met (e.g. non-negative memory
  /// functions for the factor-matrix condition).
  bool hypothesis_ok = true;
};

struct CPReport {
  TimeGrid grid;
  /// G(t) >= 0: sufficient for complete positivity when every k_n >= 0.
  std::optional<CPSlice> factor_condition;
  /// F^l(t) = (k_l * g_nm)(t) >= 0 for each l; together with the factor
  /// condition, sufficient also for sign-changing memory functions.
  std::vector<CPSlice> gain_conditions;
  /// Lattice kernels only: G~(t) >= 0 (diagonal replaced by the return
  /// probabilities T_nn) plus T_nm >= 0 -- necessary and sufficient.
  std::optional<CPSlice> lattice_condition;
  bool semigroup = false;
};

/// G(t) >= 0 scan.  Reports hypothesis_ok = false when some memory function
/// turns negative on the grid (the verdict is then only informative).
CPSlice check_factor_positivity(const QuantumKernelSpec& spec, const TimeGrid& grid);
CPSlice check_factor_positivity(const QuantumKernelSpec& spec, const FactorGrid& factors);

/// F^l(t) >= 0 scan for every level l.
std::vector<CPSlice> check_gain_positivity(const QuantumKernelSpec& spec, const TimeGrid& grid);
std::vector<CPSlice> check_gain_positivity(const QuantumKernelSpec& spec,
                                           const FactorGrid& factors);

/// Necessary-and-sufficient check for lattice kernels: eigenvalues of G~(t)
/// and positivity of the off-diagonal transition probabilities.  The reported
/// margin at each time is min(lambda_min(G~), min_{n != m} T_nm).
CPSlice check_lattice_cp(const QuantumKernelSpec& spec, const TimeGrid& grid);
CPSlice check_lattice_cp(const QuantumKernelSpec& spec, const FactorGrid& factors,
                         const PropagationResult& populations);

/// Runs every applicable condition once, sharing the solved factors.
CPReport check_complete_positivity(const QuantumKernelSpec& spec, const TimeGrid& grid);

/// Choi matrix of a vectorized map: C[(n,a),(m,b)] = <n| V(|a><b|) |m>.
/// Positive semidefinite iff the map is completely positive.
Eigen::MatrixXcd choi_matrix(const Eigen::MatrixXcd& superop);

/// Exact lattice-map superoperator assembled from transition probabilities
/// and decay factors: coherences scale by g_nm, populations mix by T_nm.
Eigen::MatrixXcd lattice_map_superoperator(const Eigen::MatrixXd& transition,
                                           const Eigen::MatrixXcd& factors);

/// Scale-aware positive-semidefiniteness margin threshold.
inline double psd_tolerance(double max_norm) { return 1e-8 * max_norm; }

}  // namespace qsm
