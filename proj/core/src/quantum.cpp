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

#include "qsm/quantum.hpp"

#include <algorithm>
#include <cmath>

#include "qsm/volterra.hpp"

namespace qsm {

namespace {

using complexd = std::complex<double>;
constexpr complexd kI{0.0, 1.0};
constexpr int kMaxDimension = 32;

// Row-major matrix-unit index of |a><b|.
inline Eigen::Index pair_index(int a, int b, int d) {
  return static_cast<Eigen::Index>(a) * d + b;
}

bool profile_is_exponential(const MemoryFunction& k) { return k.is_exponential_sum(); }

// Minimum of delta weight and sampled regular part; used for hypothesis
// checks on the sign of the memory functions.
double min_on_grid(const MemoryFunction& k, const TimeGrid& grid) {
  double lo = k.delta_weight();
  for (std::size_t i = 0; i < grid.size(); ++i) lo = std::min(lo, k.regular(grid.time(i)));
  return lo;
}

CPSlice margin_scan(const std::vector<Eigen::MatrixXcd>& matrices,
                    const std::vector<double>* extra_margin = nullptr) {
  CPSlice slice;
  slice.min_eigenvalue.reserve(matrices.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    const Eigen::MatrixXcd herm = 0.5 * (matrices[i] + matrices[i].adjoint());
    eig.compute(herm, Eigen::EigenvaluesOnly);
    double margin = eig.eigenvalues().minCoeff();
    if (extra_margin) margin = std::min(margin, (*extra_margin)[i]);
    slice.min_eigenvalue.push_back(margin);
    const double tol = psd_tolerance(herm.cwiseAbs().maxCoeff());
    if (margin < -tol && !slice.first_violation) {
      slice.first_violation = i;
      slice.holds = false;
    }
  }
  return slice;
}

}  // namespace

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols()) throw std::invalid_argument("density matrix must be square");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("density matrix must be Hermitian");
  if (std::abs(rho_.trace() - 1.0) > 1e-12)
    throw std::invalid_argument("density matrix must have unit trace");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (rho_ + rho_.adjoint()),
                                                      Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("density matrix must be positive semidefinite");
}

DensityMatrix DensityMatrix::pure(int dimension, int level) {
  if (level < 0 || level >= dimension)
    throw std::invalid_argument("density matrix: level out of range");
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dimension, dimension);
  rho(level, level) = 1.0;
  return DensityMatrix(std::move(rho));
}

DensityMatrix DensityMatrix::from_populations(const Eigen::VectorXd& populations) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(populations.size(), populations.size());
  for (Eigen::Index n = 0; n < populations.size(); ++n) rho(n, n) = populations(n);
  return DensityMatrix(std::move(rho));
}

// ---------------------------------------------------------------------------
// QuantumKernelSpec

namespace {

void validate_profiles(int d, const std::vector<MemoryFunction>& memory,
                       const std::vector<MemoryFunction>& hamiltonian) {
  if (d < 1 || d > kMaxDimension)
    throw std::invalid_argument("quantum kernel: dimension out of range");
  if (static_cast<int>(memory.size()) != d)
    throw std::invalid_argument("quantum kernel: one memory function per level required");
  if (!hamiltonian.empty()) {
    if (static_cast<int>(hamiltonian.size()) != d)
      throw std::invalid_argument("quantum kernel: one Hamiltonian profile per level required");
    for (const auto& eps : hamiltonian)
      if (eps.delta_weight() != 0.0)
        throw std::invalid_argument("quantum kernel: Hamiltonian profiles must have no point mass");
  }
}

}  // namespace

QuantumKernelSpec QuantumKernelSpec::lattice(Eigen::MatrixXd jump_prob,
                                             std::vector<MemoryFunction> memory,
                                             std::vector<MemoryFunction> hamiltonian) {
  if (jump_prob.rows() != jump_prob.cols())
    throw std::invalid_argument("quantum kernel: jump probabilities must be square");
  for (Eigen::Index n = 0; n < jump_prob.cols(); ++n) {
    double sum = 0.0;
    for (Eigen::Index m = 0; m < jump_prob.rows(); ++m) {
      if (jump_prob(m, n) < 0.0)
        throw std::invalid_argument("quantum kernel: jump probabilities must be non-negative");
      sum += jump_prob(m, n);
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("quantum kernel: jump probability columns must sum to one");
  }
  QuantumKernelSpec spec;
  spec.dimension_ = static_cast<int>(jump_prob.cols());
  validate_profiles(spec.dimension_, memory, hamiltonian);
  spec.jump_prob_ = std::move(jump_prob);
  spec.memory_ = std::move(memory);
  spec.hamiltonian_ = std::move(hamiltonian);
  return spec;
}

QuantumKernelSpec QuantumKernelSpec::kraus(std::vector<KrausMap> gain_maps,
                                           std::vector<MemoryFunction> memory,
                                           std::vector<MemoryFunction> hamiltonian) {
  if (gain_maps.empty() || gain_maps[0].operators.empty())
    throw std::invalid_argument("quantum kernel: gain maps must be non-empty");
  const auto d = gain_maps[0].operators[0].rows();
  for (std::size_t n = 0; n < gain_maps.size(); ++n) {
    Eigen::MatrixXcd normalization = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& op : gain_maps[n].operators) {
      if (op.rows() != d || op.cols() != d)
        throw std::invalid_argument("quantum kernel: Kraus operators must share one dimension");
      normalization += op.adjoint() * op;
    }
    // sum_a W_a^dag W_a = |n><n| makes the gain exactly balance the loss term,
    // so the kernel annihilates the trace for every state.
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(d, d);
    expected(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = 1.0;
    if ((normalization - expected).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument(
          "quantum kernel: gain map normalization sum W^dag W = |n><n| violated");
  }
  QuantumKernelSpec spec;
  spec.dimension_ = static_cast<int>(d);
  if (static_cast<Eigen::Index>(gain_maps.size()) != d)
    throw std::invalid_argument("quantum kernel: one gain map per level required");
  validate_profiles(spec.dimension_, memory, hamiltonian);
  spec.gain_maps_ = std::move(gain_maps);
  spec.memory_ = std::move(memory);
  spec.hamiltonian_ = std::move(hamiltonian);
  return spec;
}

const Eigen::MatrixXd& QuantumKernelSpec::jump_prob() const {
  if (!jump_prob_) throw std::logic_error("quantum kernel: not in lattice form");
  return *jump_prob_;
}

const MemoryFunction& QuantumKernelSpec::hamiltonian(int n) const {
  static const MemoryFunction zero = MemoryFunction::zero();
  if (hamiltonian_.empty()) return zero;
  return hamiltonian_.at(static_cast<std::size_t>(n));
}

Eigen::MatrixXcd QuantumKernelSpec::gain_superoperator(int n) const {
  const int d = dimension_;
  Eigen::MatrixXcd gain = Eigen::MatrixXcd::Zero(d * d, d * d);
  if (is_lattice()) {
    for (int m = 0; m < d; ++m)
      gain(pair_index(m, m, d), pair_index(n, n, d)) = (*jump_prob_)(m, n);
    return gain;
  }
  // Vectorized W rho W^dag = (W kron W^*) vec(rho) in row-major ordering.
  for (const auto& op : gain_maps_.at(static_cast<std::size_t>(n)).operators)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e)
            gain(pair_index(a, c, d), pair_index(b, e, d)) += op(a, b) * std::conj(op(c, e));
  return gain;
}

bool QuantumKernelSpec::is_markovian() const {
  for (const auto& k : memory_)
    if (!k.is_exponential_sum() || !k.exponential_terms().empty()) return false;
  for (const auto& eps : hamiltonian_)
    if (!eps.is_exponential_sum() || !eps.exponential_terms().empty()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Pair decay factors

FactorGrid decoherence_factors(const QuantumKernelSpec& spec, const TimeGrid& grid) {
  const int d = spec.dimension();
  FactorGrid out;
  out.grid = grid;
  out.values.assign(grid.size(), Eigen::MatrixXcd::Zero(d, d));

  for (int n = 0; n < d; ++n) {
    for (int m = n; m < d; ++m) {
      const auto& kn = spec.memory(n);
      const auto& km = spec.memory(m);
      const auto& en = spec.hamiltonian(n);
      const auto& em = spec.hamiltonian(m);

      VolterraKernel<complexd> kernel;
      kernel.grid = grid;
      kernel.local = -0.5 * (kn.delta_weight() + km.delta_weight());
      if (profile_is_exponential(kn) && profile_is_exponential(km) &&
          profile_is_exponential(en) && profile_is_exponential(em)) {
        for (const auto& term : kn.exponential_terms())
          kernel.exp_terms.push_back({term, complexd{-0.5, 0.0}});
        for (const auto& term : km.exponential_terms())
          kernel.exp_terms.push_back({term, complexd{-0.5, 0.0}});
        for (const auto& term : en.exponential_terms()) kernel.exp_terms.push_back({term, -kI});
        for (const auto& term : em.exponential_terms()) kernel.exp_terms.push_back({term, kI});
      } else {
        kernel.samples.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const double t = grid.time(i);
          kernel.samples[i] = -0.5 * (kn.regular(t) + km.regular(t)) -
                              kI * (en.regular(t) - em.regular(t));
        }
      }

      const auto path = solve_volterra_ide(kernel, complexd{1.0, 0.0});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        out.values[i](n, m) = path[i];
        out.values[i](m, n) = std::conj(path[i]);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Propagator

namespace {

// Constant superoperator pieces of one level: loss -1/2 {|n><n|, .} and the
// Hamiltonian commutator -i [|n><n|, .], both diagonal in the matrix-unit
// basis.
Eigen::MatrixXcd loss_superoperator(int n, int d) {
  Eigen::MatrixXcd loss = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const double w = (a == n ? 0.5 : 0.0) + (b == n ? 0.5 : 0.0);
      loss(pair_index(a, b, d), pair_index(a, b, d)) = -w;
    }
  return loss;
}

Eigen::MatrixXcd commutator_superoperator(int n, int d) {
  Eigen::MatrixXcd ham = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const double w = (a == n ? 1.0 : 0.0) - (b == n ? 1.0 : 0.0);
      ham(pair_index(a, b, d), pair_index(a, b, d)) = -kI * w;
    }
  return ham;
}

void fill_drift_metadata(PropagatorGrid& grid_out) {
  const int d = grid_out.dimension;
  double trace_drift = 0.0, herm_drift = 0.0;
  for (const auto& v : grid_out.maps) {
    for (int col_n = 0; col_n < d; ++col_n)
      for (int col_m = 0; col_m < d; ++col_m) {
        complexd trace_row{0.0, 0.0};
        for (int n = 0; n < d; ++n) trace_row += v(pair_index(n, n, d), pair_index(col_n, col_m, d));
        const double expected = col_n == col_m ? 1.0 : 0.0;
        trace_drift = std::max(trace_drift, std::abs(trace_row - expected));
      }
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e)
            herm_drift = std::max(
                herm_drift, std::abs(v(pair_index(a, b, d), pair_index(c, e, d)) -
                                     std::conj(v(pair_index(b, a, d), pair_index(e, c, d)))));
  }
  grid_out.trace_drift = trace_drift;
  grid_out.hermiticity_drift = herm_drift;
}

}  // namespace

Eigen::MatrixXcd PropagatorGrid::apply(std::size_t i, const Eigen::MatrixXcd& rho) const {
  const int d = dimension;
  Eigen::VectorXcd vec(d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) vec(pair_index(a, b, d)) = rho(a, b);
  const Eigen::VectorXcd out = maps.at(i) * vec;
  Eigen::MatrixXcd res(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) res(a, b) = out(pair_index(a, b, d));
  return res;
}

PropagatorGrid build_propagator(const QuantumKernelSpec& spec, const TimeGrid& grid) {
  const int d = spec.dimension();
  const int dd = d * d;

  std::vector<Eigen::MatrixXcd> level_matrix;  // gain minus loss per level
  level_matrix.reserve(static_cast<std::size_t>(d));
  for (int n = 0; n < d; ++n)
    level_matrix.push_back(spec.gain_superoperator(n) + loss_superoperator(n, d));

  VolterraKernel<Eigen::MatrixXcd> kernel;
  kernel.grid = grid;
  kernel.local = Eigen::MatrixXcd::Zero(dd, dd);
  bool all_exponential = true;
  for (int n = 0; n < d; ++n) {
    kernel.local += spec.memory(n).delta_weight() * level_matrix[static_cast<std::size_t>(n)];
    all_exponential = all_exponential && profile_is_exponential(spec.memory(n)) &&
                      profile_is_exponential(spec.hamiltonian(n));
  }
  if (all_exponential) {
    for (int n = 0; n < d; ++n) {
      for (const auto& term : spec.memory(n).exponential_terms())
        kernel.exp_terms.push_back({term, level_matrix[static_cast<std::size_t>(n)]});
      for (const auto& term : spec.hamiltonian(n).exponential_terms())
        kernel.exp_terms.push_back({term, commutator_superoperator(n, d)});
    }
  } else {
    kernel.samples.assign(grid.size(), Eigen::MatrixXcd::Zero(dd, dd));
    for (int n = 0; n < d; ++n) {
      const Eigen::MatrixXcd ham = commutator_superoperator(n, d);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.time(i);
        kernel.samples[i] += spec.memory(n).regular(t) * level_matrix[static_cast<std::size_t>(n)];
        const double eps = spec.hamiltonian(n).regular(t);
        if (eps != 0.0) kernel.samples[i] += eps * ham;
      }
    }
  }

  PropagatorGrid out;
  out.grid = grid;
  out.dimension = d;
  out.semigroup = kernel.pure_delta();
  out.maps = solve_volterra_ide(kernel, Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(dd, dd)));
  fill_drift_metadata(out);
  return out;
}

PropagatorGrid dyson_propagator(const QuantumKernelSpec& spec, const TimeGrid& grid,
                                double tail_tol, int max_order) {
  const int d = spec.dimension();
  const int dd = d * d;
  const FactorGrid factors = decoherence_factors(spec, grid);

  // Loss-part propagator V0: diagonal in the matrix-unit basis with the pair
  // decay factors as entries.
  Sampled<Eigen::MatrixXcd> v0(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    v0.values[i] = Eigen::MatrixXcd::Zero(dd, dd);
    for (int n = 0; n < d; ++n)
      for (int m = 0; m < d; ++m)
        v0.values[i](pair_index(n, m, d), pair_index(n, m, d)) = factors.values[i](n, m);
  }
  v0.delta_weight = Eigen::MatrixXcd::Zero(dd, dd);

  Sampled<Eigen::MatrixXcd> gain(grid);
  gain.delta_weight = Eigen::MatrixXcd::Zero(dd, dd);
  {
    std::vector<Eigen::MatrixXcd> gains;
    for (int n = 0; n < d; ++n) gains.push_back(spec.gain_superoperator(n));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      gain.values[i] = Eigen::MatrixXcd::Zero(dd, dd);
      for (int n = 0; n < d; ++n)
        gain.values[i] += spec.memory(n).regular(grid.time(i)) * gains[static_cast<std::size_t>(n)];
    }
    for (int n = 0; n < d; ++n)
      gain.delta_weight += spec.memory(n).delta_weight() * gains[static_cast<std::size_t>(n)];
  }

  const auto weighted = convolve(v0, gain);  // V0 * B, reused at every order
  auto term = v0;
  auto sum = v0;
  double tail = 0.0;
  for (int order = 1; order <= max_order; ++order) {
    term = convolve(weighted, term);
    tail = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      sum.values[i] += term.values[i];
      tail = std::max(tail, term.values[i].cwiseAbs().maxCoeff());
    }
    if (tail < tail_tol) break;
  }
  if (tail >= tail_tol)
    throw NumericError("dyson_propagator: series did not converge within the order cap");

  PropagatorGrid out;
  out.grid = grid;
  out.dimension = d;
  out.maps = std::move(sum.values);
  fill_drift_metadata(out);
  return out;
}

// ---------------------------------------------------------------------------
// Complete-positivity conditions

CPSlice check_factor_positivity(const QuantumKernelSpec& spec, const FactorGrid& factors) {
  CPSlice slice = margin_scan(factors.values);
  for (int n = 0; n < spec.dimension(); ++n)
    if (min_on_grid(spec.memory(n), factors.grid) < -1e-12) slice.hypothesis_ok = false;
  return slice;
}

CPSlice check_factor_positivity(const QuantumKernelSpec& spec, const TimeGrid& grid) {
  return check_factor_positivity(spec, decoherence_factors(spec, grid));
}

std::vector<CPSlice> check_gain_positivity(const QuantumKernelSpec& spec,
                                           const FactorGrid& factors) {
  const int d = spec.dimension();
  const TimeGrid& grid = factors.grid;
  std::vector<CPSlice> slices;
  slices.reserve(static_cast<std::size_t>(d));

  for (int l = 0; l < d; ++l) {
    Sampled<complexd> kl(grid);
    kl.delta_weight = spec.memory(l).delta_weight();
    for (std::size_t i = 0; i < grid.size(); ++i) kl.values[i] = spec.memory(l).regular(grid.time(i));

    std::vector<Eigen::MatrixXcd> f(grid.size(), Eigen::MatrixXcd::Zero(d, d));
    for (int n = 0; n < d; ++n) {
      for (int m = n; m < d; ++m) {
        Sampled<complexd> g(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) g.values[i] = factors.values[i](n, m);
        const auto conv = convolve(kl, g);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          f[i](n, m) = conv.values[i];
          f[i](m, n) = std::conj(conv.values[i]);
        }
      }
    }
    slices.push_back(margin_scan(f));
  }
  return slices;
}

std::vector<CPSlice> check_gain_positivity(const QuantumKernelSpec& spec, const TimeGrid& grid) {
  return check_gain_positivity(spec, decoherence_factors(spec, grid));
}

CPSlice check_lattice_cp(const QuantumKernelSpec& spec, const FactorGrid& factors,
                         const PropagationResult& populations) {
  const int d = spec.dimension();
  std::vector<Eigen::MatrixXcd> g_tilde(factors.values.size());
  std::vector<double> off_diag_margin(factors.values.size());
  for (std::size_t i = 0; i < factors.values.size(); ++i) {
    Eigen::MatrixXcd m = factors.values[i];
    double lo = 1.0;
    for (int n = 0; n < d; ++n) {
      m(n, n) = populations.transition[i](n, n);
      for (int k = 0; k < d; ++k)
        if (k != n) lo = std::min(lo, populations.transition[i](k, n));
    }
    g_tilde[i] = std::move(m);
    off_diag_margin[i] = lo;
  }
  return margin_scan(g_tilde, &off_diag_margin);
}

CPSlice check_lattice_cp(const QuantumKernelSpec& spec, const TimeGrid& grid) {
  if (!spec.is_lattice())
    throw std::invalid_argument("check_lattice_cp: spec is not in lattice form");
  const auto factors = decoherence_factors(spec, grid);
  const auto populations = solve_gme(spec.jump_prob(), spec.memory(), grid);
  return check_lattice_cp(spec, factors, populations);
}

CPReport check_complete_positivity(const QuantumKernelSpec& spec, const TimeGrid& grid) {
  CPReport report;
  report.grid = grid;
  report.semigroup = spec.is_markovian();
  const auto factors = decoherence_factors(spec, grid);
  report.factor_condition = check_factor_positivity(spec, factors);
  report.gain_conditions = check_gain_positivity(spec, factors);
  if (spec.is_lattice()) {
    const auto populations = solve_gme(spec.jump_prob(), spec.memory(), grid);
    report.lattice_condition = check_lattice_cp(spec, factors, populations);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Choi matrix and the exact lattice map

Eigen::MatrixXcd choi_matrix(const Eigen::MatrixXcd& superop) {
  const int dd = static_cast<int>(superop.rows());
  const int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(dd))));
  if (d * d != dd || superop.cols() != dd)
    throw std::invalid_argument("choi_matrix: superoperator must be d^2 x d^2");
  Eigen::MatrixXcd choi(dd, dd);
  for (int n = 0; n < d; ++n)
    for (int a = 0; a < d; ++a)
      for (int m = 0; m < d; ++m)
        for (int b = 0; b < d; ++b)
          choi(pair_index(n, a, d), pair_index(m, b, d)) =
              superop(pair_index(n, m, d), pair_index(a, b, d));
  return choi;
}

Eigen::MatrixXcd lattice_map_superoperator(const Eigen::MatrixXd& transition,
                                           const Eigen::MatrixXcd& factors) {
  const int d = static_cast<int>(transition.rows());
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (int n = 0; n < d; ++n)
    for (int m = 0; m < d; ++m) {
      if (n != m) v(pair_index(n, m, d), pair_index(n, m, d)) = factors(n, m);
      v(pair_index(n, n, d), pair_index(m, m, d)) = transition(n, m);
    }
  return v;
}

}  // namespace qsm
