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

#include "qsm/volterra.hpp"

#include <cmath>
#include <limits>

namespace qsm {

SampledReal invert_memory(const SampledReal& f, const SampledReal& g) {
  if (f.grid != g.grid) throw std::invalid_argument("invert_memory: grid mismatch");
  if (g.values.empty() || g.values[0] == 0.0)
    throw std::invalid_argument("invert_memory: g(0) must be non-zero");
  const double h = f.grid.step;
  const double g0 = g.values[0];
  if (std::abs(0.5 * h * g0) < std::numeric_limits<double>::min())
    throw NumericError("invert_memory: diagonal weight h/2*g(0) underflows");
  if (f.grid.count < 2)
    throw std::invalid_argument("invert_memory: need at least two steps");

  // Split off the point mass: a smooth convolution k*g vanishes at 0+, so any
  // f(0) > 0 must come from a 2*delta component of weight f(0)/g(0).
  Sampled<double> k(f.grid);
  std::vector<double> smooth(f.values);
  if (f.values[0] > 1e-8) {
    k.delta_weight = f.values[0] / g0;
    for (std::size_t i = 0; i < smooth.size(); ++i) smooth[i] -= k.delta_weight * g.values[i];
  }

  // k(0) from the one-sided second-order derivative of the smooth part:
  // f'(0) = k(0) g(0) for the regular component.
  k.values[0] =
      (-3.0 * smooth[0] + 4.0 * smooth[1] - smooth[2]) / (2.0 * h) / g0;

  // Forward substitution on h*(k_0 g_i/2 + sum_{j=1..i-1} k_j g_{i-j} + k_i g_0/2) = smooth_i.
  for (std::size_t i = 1; i <= f.grid.count; ++i) {
    double acc = 0.5 * k.values[0] * g.values[i];
    for (std::size_t j = 1; j < i; ++j) acc += k.values[j] * g.values[i - j];
    k.values[i] = (smooth[i] / h - acc) / (0.5 * g0);
  }
  return k;
}

}  // namespace qsm
