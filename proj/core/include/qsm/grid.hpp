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
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qsm {

/// Uniform time grid with points t_i = i*step for i = 0..count.
struct TimeGrid {
  double step = 1e-3;
  std::size_t count = 1;

  TimeGrid() = default;
  TimeGrid(double step_, std::size_t count_) : step(step_), count(count_) {
    if (!(step > 0.0)) throw std::invalid_argument("TimeGrid: step must be positive");
    if (count < 1) throw std::invalid_argument("TimeGrid: count must be at least 1");
  }

  /// Grid reaching at least `horizon` with the given step.
  static TimeGrid from_horizon(double step, double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
    const auto n = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
    return TimeGrid(step, n < 1 ? 1 : n);
  }

  std::size_t size() const { return count + 1; }
  double time(std::size_t i) const { return step * static_cast<double>(i); }
  double horizon() const { return time(count); }

  bool operator==(const TimeGrid&) const = default;
};

/// One term of a closed-form kernel profile, amplitude * exp(-rate * t).
struct ExpProfile {
  double amplitude = 0.0;
  double rate = 0.0;

  double operator()(double t) const { return amplitude * std::exp(-rate * t); }
};

/// Function sampled on a TimeGrid, together with an optional point mass at the
/// origin.  The point mass follows the half-line convention used throughout:
/// a weight w stands for w*2*delta(t), so that convolving it against x gives
/// w*x(t) and its Laplace transform is w.
template <class T>
struct Sampled {
  TimeGrid grid;
  std::vector<T> values;
  T delta_weight{};

  Sampled() = default;
  explicit Sampled(const TimeGrid& g) : grid(g), values(g.size(), T{}) {}

  template <class F>
  static Sampled tabulate(const TimeGrid& g, F&& f, T delta = T{}) {
    Sampled out(g);
    for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = f(g.time(i));
    out.delta_weight = delta;
    return out;
  }

  T operator[](std::size_t i) const { return values[i]; }
};

using SampledReal = Sampled<double>;

}  // namespace qsm
