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
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "qsm/grid.hpp"

namespace qsm {

/// Memory function k(t) of a sojourn process: the kernel that reproduces the
/// waiting-time density from the survival probability via f = k * g.  It is
/// stored as a weight on 2*delta(t) plus a regular part; the regular part may
/// take negative values.
class MemoryFunction {
 public:
  MemoryFunction() = default;

  /// k(t) = weight * 2*delta(t) + sum_i amplitude_i * exp(-rate_i * t).
  static MemoryFunction exponential_sum(double delta_weight, std::vector<ExpProfile> terms);
  /// k(t) = kappa * exp(-gamma * t).
  static MemoryFunction exponential_decay(double kappa, double gamma);
  /// Pure instantaneous kernel k(t) = weight * 2*delta(t) (memoryless limit).
  static MemoryFunction delta(double weight);
  static MemoryFunction zero();
  /// General regular part given as a callable (closes the fast-path door).
  static MemoryFunction from_callable(double delta_weight, std::function<double(double)> regular);

  double delta_weight() const { return delta_weight_; }
  double regular(double t) const;

  /// Non-empty iff the regular part is exactly a sum of real exponentials,
  /// in which case solvers may use an O(1)-per-step recurrence.
  const std::vector<ExpProfile>& exponential_terms() const { return exp_terms_; }
  bool is_exponential_sum() const { return !callable_; }

  SampledReal sample(const TimeGrid& grid) const;

 private:
  double delta_weight_ = 0.0;
  std::vector<ExpProfile> exp_terms_;
  std::function<double(double)> callable_;  // used when set
};

// Waiting-time families.  All rates are in units of inverse time.

struct Exponential {
  double rate;
};

/// Sum of `stages` i.i.d. exponential stages with a common rate (stages in
/// series).
struct SpecialErlang {
  double rate;
  int stages;
};

/// Sum of independent exponential stages with pairwise distinct rates.
struct GeneralizedErlang {
  std::vector<double> rates;
};

/// Convex mixture of exponentials (stages in parallel): weights p_i >= 0
/// summing to one, each with its own rate.
struct MultiExponential {
  std::vector<double> weights;
  std::vector<double> rates;
};

/// A normalized waiting-time distribution f(tau) with its survival
/// probability g(tau) and memory function k(t).
class WaitingTime {
 public:
  using Kind = std::variant<Exponential, SpecialErlang, GeneralizedErlang, MultiExponential>;

  static WaitingTime exponential(double rate);
  static WaitingTime special_erlang(double rate, int stages);
  static WaitingTime generalized_erlang(std::vector<double> rates);
  static WaitingTime multi_exponential(std::vector<double> weights, std::vector<double> rates);

  /// Density f(tau).  Throws std::domain_error for negative tau.
  double density(double tau) const;
  /// Survival probability g(tau) = 1 - integral of f over [0, tau].
  double survival(double tau) const;

  /// Closed-form memory function.  Implemented for exponential, Erlang
  /// families up to three stages and two-component mixtures; otherwise throws
  /// std::domain_error ("no closed form; use volterra invert_memory").
  MemoryFunction memory_function() const;
  bool has_closed_form_memory() const;

  /// Exact sampling by composing exponential stages; deterministic given the
  /// generator state.
  double sample(std::mt19937_64& rng) const;

  /// Smallest grid horizon T with g(T) < survival_tol.
  double horizon_for(double survival_tol = 1e-8) const;

  /// Mean sojourn time.
  double mean() const;

  const Kind& kind() const { return kind_; }
  std::string kind_name() const;

 private:
  explicit WaitingTime(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

}  // namespace qsm
