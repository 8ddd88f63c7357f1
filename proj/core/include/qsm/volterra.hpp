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

#include <cmath>
#include <complex>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qsm/grid.hpp"

namespace qsm {

/// Thrown when a solver detects an ill-conditioned or inconsistent problem.
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
inline constexpr bool is_eigen_v = std::is_base_of_v<Eigen::MatrixBase<T>, T>;

inline double zero_like(const double&) { return 0.0; }
inline std::complex<double> zero_like(const std::complex<double>&) { return {}; }
template <class Derived, class = std::enable_if_t<is_eigen_v<Derived>>>
Derived zero_like(const Derived& m) {
  return Derived::Zero(m.rows(), m.cols());
}

inline double exp_like(const double& x) { return std::exp(x); }
inline std::complex<double> exp_like(const std::complex<double>& x) { return std::exp(x); }
template <class Derived, class = std::enable_if_t<is_eigen_v<Derived>>>
Derived exp_like(const Derived& m) {
  return m.exp();
}

template <class Acc, class A, class B>
void fma_into(Acc& acc, const A& a, const B& b) {
  if constexpr (is_eigen_v<Acc>)
    acc.noalias() += a * b;
  else
    acc += a * b;
}

// Point-mass weights of matrix-valued sampled functions may be left at their
// default (empty) state; substitute a correctly shaped zero.
template <class T>
T weight_or_zero(const T& w, const T& shape_hint) {
  if constexpr (is_eigen_v<T>) {
    if (w.size() == 0) return T::Zero(shape_hint.rows(), shape_hint.cols());
  }
  return w;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Discrete convolution

/// Trapezoidal discrete convolution (a*b)(t_i) = h * sum'_{j=0..i} a_j b_{i-j}
/// with half weights at both ends.  Point masses contribute w_a*b(t) and
/// a(t)*w_b (operator order is preserved for matrix-valued samples); the
/// convolution of the two point masses is again a point mass of weight
/// w_a*w_b.  Second-order accurate for smooth factors.
template <class T>
Sampled<T> convolve(const Sampled<T>& a, const Sampled<T>& b) {
  if (a.grid != b.grid) throw std::invalid_argument("convolve: grid mismatch");
  if (a.values.empty() || b.values.empty())
    throw std::invalid_argument("convolve: empty samples");
  const double h = a.grid.step;
  const T wa = detail::weight_or_zero(a.delta_weight, a.values[0]);
  const T wb = detail::weight_or_zero(b.delta_weight, b.values[0]);
  Sampled<T> out(a.grid);
  out.delta_weight = wa * wb;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    T acc = wa * b.values[i];
    detail::fma_into(acc, a.values[i], wb);
    if (i > 0) {
      T trap = a.values[0] * b.values[i];
      detail::fma_into(trap, a.values[i], b.values[0]);
      trap *= 0.5;
      for (std::size_t j = 1; j < i; ++j) detail::fma_into(trap, a.values[j], b.values[i - j]);
      detail::fma_into(acc, h, trap);
    }
    out.values[i] = std::move(acc);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Laplace probe

template <class T>
struct LaplaceProbe {
  T value{};
  bool horizon_ok = true;  // cleared when exp(-u*T) >= 1e-10 at the grid end
};

/// Truncated Laplace transform by the trapezoid rule, plus the point-mass
/// contribution.  Intended for verifying Laplace-domain identities in tests;
/// requires u > 0 and a horizon long enough that the truncated tail is
/// negligible (flagged otherwise).
template <class T>
LaplaceProbe<T> laplace_probe(const Sampled<T>& x, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("laplace_probe: u must be positive");
  const double h = x.grid.step;
  T acc = detail::zero_like(x.delta_weight);
  const std::size_t n = x.grid.count;
  for (std::size_t i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    detail::fma_into(acc, x.values[i], w * std::exp(-u * x.grid.time(i)));
  }
  acc *= h;
  acc += x.delta_weight;
  return {acc, std::exp(-u * x.grid.horizon()) < 1e-10};
}

// ---------------------------------------------------------------------------
// Volterra integro-differential solver

/// Convolution kernel K(tau) = local*2*delta(tau) + regular(tau) of the
/// equation dx/dt = integral_0^t K(tau) x(t-tau) dtau.  The regular part is
/// either a sum of separable exponential terms profile_r(tau)*matrix_r or
/// dense samples on the grid; when both are present the exponential terms are
/// folded into the samples before solving.
template <class Mat>
struct VolterraKernel {
  struct ExpTerm {
    ExpProfile profile;
    Mat matrix;
  };

  TimeGrid grid;
  Mat local{};
  std::vector<ExpTerm> exp_terms;
  std::vector<Mat> samples;

  bool pure_delta() const { return exp_terms.empty() && samples.empty(); }
};

namespace detail {

// One predictor-corrector march shared by the dense and the separable paths:
// explicit Euler predictor, one trapezoidal corrector pass.  `partial(i1)`
// must return h*(0.5*K(t_i1)*x(0) + sum_{j=1..i1-1} K(t_j)*x(t_{i1-j})), i.e.
// every memory term not involving the unknown x(t_i1).
template <class Mat, class State, class Partial>
std::vector<State> volterra_march(const TimeGrid& grid, const Mat& local, const Mat& k0,
                                  const State& x0, Partial&& partial) {
  const double h = grid.step;
  std::vector<State> path;
  path.reserve(grid.size());
  path.push_back(x0);
  State rhs = zero_like(x0);
  fma_into(rhs, local, x0);  // memory integral vanishes at t = 0
  for (std::size_t i = 0; i + 1 <= grid.count; ++i) {
    const State mem = partial(i + 1, path);
    State predicted = path[i];
    fma_into(predicted, h, rhs);
    State rhs_new = mem;
    fma_into(rhs_new, local, predicted);
    fma_into(rhs_new, 0.5 * h, k0 * predicted);
    State next = path[i];
    fma_into(next, 0.5 * h, rhs);
    fma_into(next, 0.5 * h, rhs_new);
    // Re-evaluate the cheap local pieces at the corrected value so the next
    // step starts from a consistent right-hand side.
    rhs = mem;
    fma_into(rhs, local, next);
    fma_into(rhs, 0.5 * h, k0 * next);
    path.push_back(std::move(next));
  }
  return path;
}

}  // namespace detail

/// Solves dx/dt = integral_0^t K(tau) x(t-tau) dtau with x(0) = x0 by a
/// second-order predictor-corrector with trapezoidal memory quadrature.
/// Point masses in K act as instantaneous terms local*x(t).  A kernel with no
/// regular part is propagated exactly as the semigroup exp(local*t).  For a
/// purely exponential regular part the trapezoidal sums are evaluated by an
/// O(1)-per-step recurrence; the discrete scheme is identical to the dense
/// path.
template <class Mat, class State>
std::vector<State> solve_volterra_ide(const VolterraKernel<Mat>& kernel, const State& x0) {
  const TimeGrid& grid = kernel.grid;
  if (!kernel.samples.empty() && kernel.samples.size() != grid.size())
    throw std::invalid_argument("solve_volterra_ide: kernel samples do not match the grid");
  if constexpr (detail::is_eigen_v<Mat>) {
    if (kernel.local.rows() != kernel.local.cols())
      throw std::invalid_argument("solve_volterra_ide: kernel must be square");
    for (const auto& t : kernel.exp_terms)
      if (t.matrix.rows() != kernel.local.rows() || t.matrix.cols() != kernel.local.cols())
        throw std::invalid_argument("solve_volterra_ide: kernel term size mismatch");
    for (const auto& k : kernel.samples)
      if (k.rows() != kernel.local.rows() || k.cols() != kernel.local.cols())
        throw std::invalid_argument("solve_volterra_ide: kernel sample size mismatch");
  }

  if (kernel.pure_delta()) {
    Mat step = kernel.local;
    step *= grid.step;
    const Mat propagator = detail::exp_like(step);
    std::vector<State> path;
    path.reserve(grid.size());
    path.push_back(x0);
    for (std::size_t i = 0; i < grid.count; ++i) path.push_back(propagator * path[i]);
    return path;
  }

  const double h = grid.step;

  if (kernel.samples.empty()) {
    // Separable exponential kernel: maintain, per term, the running sum
    // A_r(i) = sum_{j=1..i-1} amp_r e^{-rate_r j h} x(t_{i-j}) through
    // A_r(i+1) = amp_r q_r x(t_i) + q_r A_r(i), q_r = e^{-rate_r h}.
    struct Running {
      Mat matrix;
      double amplitude, rate, q;
      State acc;
    };
    std::vector<Running> terms;
    terms.reserve(kernel.exp_terms.size());
    Mat k0 = detail::zero_like(kernel.local);
    for (const auto& t : kernel.exp_terms) {
      terms.push_back({t.matrix, t.profile.amplitude, t.profile.rate,
                       std::exp(-t.profile.rate * h), detail::zero_like(x0)});
      detail::fma_into(k0, t.profile.amplitude, t.matrix);
    }
    auto partial = [&](std::size_t i1, const std::vector<State>& path) -> State {
      if (i1 > 1) {
        for (auto& t : terms) {
          State acc = t.acc;
          acc *= t.q;
          detail::fma_into(acc, t.amplitude * t.q, path[i1 - 1]);
          t.acc = std::move(acc);
        }
      }
      State mem = detail::zero_like(x0);
      const double t_new = grid.time(i1);
      for (const auto& t : terms) {
        State inner = t.acc;
        detail::fma_into(inner, 0.5 * t.amplitude * std::exp(-t.rate * t_new), path[0]);
        detail::fma_into(mem, t.matrix, inner);
      }
      mem *= h;
      return mem;
    };
    return detail::volterra_march(grid, kernel.local, k0, x0, partial);
  }

  // Dense path; fold any exponential terms into the samples first.
  std::vector<Mat> k = kernel.samples;
  for (const auto& t : kernel.exp_terms)
    for (std::size_t i = 0; i < k.size(); ++i)
      detail::fma_into(k[i], t.profile(grid.time(i)), t.matrix);
  auto partial = [&](std::size_t i1, const std::vector<State>& path) -> State {
    State mem = detail::zero_like(x0);
    detail::fma_into(mem, 0.5, k[i1] * path[0]);
    for (std::size_t j = 1; j < i1; ++j) detail::fma_into(mem, k[j], path[i1 - j]);
    mem *= h;
    return mem;
  };
  return detail::volterra_march(grid, kernel.local, k[0], x0, partial);
}

// ---------------------------------------------------------------------------
// Deconvolution

/// Recovers the memory function k from f = k * g by forward substitution on
/// the trapezoidal triangular system.  A point mass is split off first: it
/// exists iff f(0) > 1e-8, with weight f(0)/g(0).  k(0) itself is seeded from
/// the one-sided second-order difference of the remaining smooth part.
/// Requires g(0) != 0; throws NumericError when the diagonal weight
/// h/2 * g(0) underflows.
SampledReal invert_memory(const SampledReal& f, const SampledReal& g);

}  // namespace qsm
