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

#include "qsm/waiting_time.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qsm/hyperbolic.hpp"

namespace qsm {

namespace {

void require_positive_rate(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw std::invalid_argument("waiting time: rate must be positive and finite");
}

double uniform_unit(std::mt19937_64& rng) {
  // 53 random bits mapped to [0, 1); fully determined by the engine state.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sample_exponential(double rate, std::mt19937_64& rng) {
  return -std::log1p(-uniform_unit(rng)) / rate;
}

// Partial-fraction weights of a generalized Erlang: C_i = prod_{j!=i} r_j/(r_j - r_i).
std::vector<double> erlang_weights(const std::vector<double>& rates) {
  std::vector<double> c(rates.size(), 1.0);
  for (std::size_t i = 0; i < rates.size(); ++i)
    for (std::size_t j = 0; j < rates.size(); ++j)
      if (j != i) c[i] *= rates[j] / (rates[j] - rates[i]);
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// MemoryFunction

MemoryFunction MemoryFunction::exponential_sum(double delta_weight, std::vector<ExpProfile> terms) {
  MemoryFunction k;
  k.delta_weight_ = delta_weight;
  k.exp_terms_ = std::move(terms);
  return k;
}

MemoryFunction MemoryFunction::exponential_decay(double kappa, double gamma) {
  return exponential_sum(0.0, {ExpProfile{kappa, gamma}});
}

MemoryFunction MemoryFunction::delta(double weight) { return exponential_sum(weight, {}); }

MemoryFunction MemoryFunction::zero() { return MemoryFunction{}; }

MemoryFunction MemoryFunction::from_callable(double delta_weight, std::function<double(double)> regular) {
  MemoryFunction k;
  k.delta_weight_ = delta_weight;
  k.callable_ = std::move(regular);
  return k;
}

double MemoryFunction::regular(double t) const {
  if (callable_) return callable_(t);
  double v = 0.0;
  for (const auto& term : exp_terms_) v += term(t);
  return v;
}

SampledReal MemoryFunction::sample(const TimeGrid& grid) const {
  return SampledReal::tabulate(grid, [this](double t) { return regular(t); }, delta_weight_);
}

// ---------------------------------------------------------------------------
// WaitingTime factories

WaitingTime WaitingTime::exponential(double rate) {
  require_positive_rate(rate);
  return WaitingTime(Exponential{rate});
}

WaitingTime WaitingTime::special_erlang(double rate, int stages) {
  require_positive_rate(rate);
  if (stages < 1) throw std::invalid_argument("special Erlang: stages must be >= 1");
  return WaitingTime(SpecialErlang{rate, stages});
}

WaitingTime WaitingTime::generalized_erlang(std::vector<double> rates) {
  if (rates.empty()) throw std::invalid_argument("generalized Erlang: need at least one rate");
  double max_rate = 0.0;
  for (double r : rates) {
    require_positive_rate(r);
    max_rate = std::max(max_rate, r);
  }
  // The partial fractions divide by rate differences; coincident rates are
  // rejected instead of taking a confluent limit.
  for (std::size_t i = 0; i < rates.size(); ++i)
    for (std::size_t j = i + 1; j < rates.size(); ++j)
      if (std::abs(rates[i] - rates[j]) <= 1e-12 * max_rate)
        throw std::invalid_argument("generalized Erlang: rates must be pairwise distinct");
  return WaitingTime(GeneralizedErlang{std::move(rates)});
}

WaitingTime WaitingTime::multi_exponential(std::vector<double> weights, std::vector<double> rates) {
  if (weights.size() != rates.size() || weights.empty())
    throw std::invalid_argument("multi-exponential: weights and rates must match and be non-empty");
  double total = 0.0;
  for (double p : weights) {
    if (p < 0.0) throw std::invalid_argument("multi-exponential: weights must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("multi-exponential: weights must sum to one");
  for (double r : rates) require_positive_rate(r);
  return WaitingTime(MultiExponential{std::move(weights), std::move(rates)});
}

// ---------------------------------------------------------------------------
// Density and survival probability

double WaitingTime::density(double tau) const {
  if (tau < 0.0) throw std::domain_error("waiting time density: tau must be non-negative");
  return std::visit(
      [tau](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          return k.rate * std::exp(-k.rate * tau);
        } else if constexpr (std::is_same_v<K, SpecialErlang>) {
          double v = k.rate * std::exp(-k.rate * tau);
          for (int j = 1; j < k.stages; ++j) v *= k.rate * tau / j;
          return v;
        } else if constexpr (std::is_same_v<K, GeneralizedErlang>) {
          const auto c = erlang_weights(k.rates);
          double v = 0.0;
          for (std::size_t i = 0; i < k.rates.size(); ++i)
            v += c[i] * k.rates[i] * std::exp(-k.rates[i] * tau);
          return v;
        } else {
          double v = 0.0;
          for (std::size_t i = 0; i < k.rates.size(); ++i)
            v += k.weights[i] * k.rates[i] * std::exp(-k.rates[i] * tau);
          return v;
        }
      },
      kind_);
}

double WaitingTime::survival(double tau) const {
  if (tau < 0.0) throw std::domain_error("survival probability: tau must be non-negative");
  return std::visit(
      [tau](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          return std::exp(-k.rate * tau);
        } else if constexpr (std::is_same_v<K, SpecialErlang>) {
          // Poisson partial sum: g = exp(-rt) sum_{j<stages} (rt)^j/j!
          double term = 1.0, sum = 1.0;
          for (int j = 1; j < k.stages; ++j) {
            term *= k.rate * tau / j;
            sum += term;
          }
          return sum * std::exp(-k.rate * tau);
        } else if constexpr (std::is_same_v<K, GeneralizedErlang>) {
          const auto c = erlang_weights(k.rates);
          double v = 0.0;
          for (std::size_t i = 0; i < k.rates.size(); ++i)
            v += c[i] * std::exp(-k.rates[i] * tau);
          return v;
        } else {
          double v = 0.0;
          for (std::size_t i = 0; i < k.rates.size(); ++i)
            v += k.weights[i] * std::exp(-k.rates[i] * tau);
          return v;
        }
      },
      kind_);
}

// ---------------------------------------------------------------------------
// Closed-form memory functions

namespace {

[[noreturn]] void no_closed_form() {
  throw std::domain_error("memory function: no closed form; use volterra invert_memory");
}

MemoryFunction erlang3_memory(double r1, double r2, double r3) {
  // Deconvolving a three-stage waiting time gives a damped mode pair with
  // rates -(s/2) +- sqrt(D)/2, s = r1+r2+r3, D = (r1-r2-r3)^2 - 4 r2 r3.
  const double s = r1 + r2 + r3;
  const double d = (r1 - r2 - r3) * (r1 - r2 - r3) - 4.0 * r2 * r3;
  const double product = r1 * r2 * r3;
  if (d > 1e-9 * s * s) {
    const double w = std::sqrt(d);
    return MemoryFunction::exponential_sum(
        0.0, {ExpProfile{product / w, 0.5 * (s - w)}, ExpProfile{-product / w, 0.5 * (s + w)}});
  }
  // Oscillatory (or near-confluent) mode pair: keep the even closed form.
  return MemoryFunction::from_callable(0.0, [product, s, d](double t) {
    return product * t * std::exp(-0.5 * s * t) * sinhc_sqrt(0.25 * d, t);
  });
}

}  // namespace

bool WaitingTime::has_closed_form_memory() const {
  return std::visit(
      [](const auto& k) -> bool {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>)
          return true;
        else if constexpr (std::is_same_v<K, SpecialErlang>)
          return k.stages <= 3;
        else if constexpr (std::is_same_v<K, GeneralizedErlang>)
          return k.rates.size() <= 3;
        else
          return k.rates.size() <= 2;
      },
      kind_);
}

MemoryFunction WaitingTime::memory_function() const {
  return std::visit(
      [](const auto& k) -> MemoryFunction {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          return MemoryFunction::delta(k.rate);
        } else if constexpr (std::is_same_v<K, SpecialErlang>) {
          const double r = k.rate;
          switch (k.stages) {
            case 1:
              return MemoryFunction::delta(r);
            case 2:
              return MemoryFunction::exponential_sum(0.0, {ExpProfile{r * r, 2.0 * r}});
            case 3:
              // (2 r^2/sqrt(3)) sin(sqrt(3) r t / 2) exp(-3 r t / 2): the mode
              // pair of a three-stage chain is always oscillatory.
              return MemoryFunction::from_callable(0.0, [r](double t) {
                return 2.0 * r * r / std::sqrt(3.0) * std::sin(0.5 * std::sqrt(3.0) * r * t) *
                       std::exp(-1.5 * r * t);
              });
            default:
              no_closed_form();
          }
        } else if constexpr (std::is_same_v<K, GeneralizedErlang>) {
          switch (k.rates.size()) {
            case 1:
              return MemoryFunction::delta(k.rates[0]);
            case 2:
              return MemoryFunction::exponential_sum(
                  0.0, {ExpProfile{k.rates[0] * k.rates[1], k.rates[0] + k.rates[1]}});
            case 3:
              return erlang3_memory(k.rates[0], k.rates[1], k.rates[2]);
            default:
              no_closed_form();
          }
        } else {
          if (k.rates.size() == 1) return MemoryFunction::delta(k.rates[0]);
          if (k.rates.size() != 2) no_closed_form();
          // Two-component mixture: instantaneous part <rate> plus a negative
          // exponential of weight -Var(rate).
          const double mean = k.weights[0] * k.rates[0] + k.weights[1] * k.rates[1];
          const double second = k.weights[0] * k.rates[0] * k.rates[0] +
                                k.weights[1] * k.rates[1] * k.rates[1];
          const double variance = second - mean * mean;
          const double decay = k.rates[0] + k.rates[1] - mean;
          return MemoryFunction::exponential_sum(mean, {ExpProfile{-variance, decay}});
        }
      },
      kind_);
}

// ---------------------------------------------------------------------------
// Sampling and helpers

double WaitingTime::sample(std::mt19937_64& rng) const {
  return std::visit(
      [&rng](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          return sample_exponential(k.rate, rng);
        } else if constexpr (std::is_same_v<K, SpecialErlang>) {
          double t = 0.0;
          for (int j = 0; j < k.stages; ++j) t += sample_exponential(k.rate, rng);
          return t;
        } else if constexpr (std::is_same_v<K, GeneralizedErlang>) {
          double t = 0.0;
          for (double r : k.rates) t += sample_exponential(r, rng);
          return t;
        } else {
          const double u = uniform_unit(rng);
          double acc = 0.0;
          std::size_t pick = k.rates.size() - 1;
          for (std::size_t i = 0; i < k.weights.size(); ++i) {
            acc += k.weights[i];
            if (u < acc) {
              pick = i;
              break;
            }
          }
          return sample_exponential(k.rates[pick], rng);
        }
      },
      kind_);
}

double WaitingTime::mean() const {
  return std::visit(
      [](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          return 1.0 / k.rate;
        } else if constexpr (std::is_same_v<K, SpecialErlang>) {
          return k.stages / k.rate;
        } else if constexpr (std::is_same_v<K, GeneralizedErlang>) {
          double m = 0.0;
          for (double r : k.rates) m += 1.0 / r;
          return m;
        } else {
          double m = 0.0;
          for (std::size_t i = 0; i < k.rates.size(); ++i) m += k.weights[i] / k.rates[i];
          return m;
        }
      },
      kind_);
}

double WaitingTime::horizon_for(double survival_tol) const {
  double horizon = std::max(mean(), 1.0);
  for (int i = 0; i < 200 && survival(horizon) >= survival_tol; ++i) horizon *= 1.5;
  return horizon;
}

std::string WaitingTime::kind_name() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>)
          return "exponential";
        else if constexpr (std::is_same_v<K, SpecialErlang>)
          return "special_erlang";
        else if constexpr (std::is_same_v<K, GeneralizedErlang>)
          return "generalized_erlang";
        else
          return "multi_exponential";
      },
      kind_);
}

}  // namespace qsm
