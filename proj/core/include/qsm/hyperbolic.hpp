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

namespace qsm {

// Damped oscillator solutions keep appearing here as cosh(x*sqrt(a)) and
// sinh(x*sqrt(a))/sqrt(a) where a can have either sign.  Evaluating them as
// even functions of sqrt(a) keeps every result real without branching on
// complex intermediates.

/// cosh(x*sqrt(a)); for a < 0 this is cos(x*sqrt(-a)).
inline double cosh_sqrt(double a, double x) {
  const double s = a * x * x;
  return s >= 0.0 ? std::cosh(std::sqrt(s)) : std::cos(std::sqrt(-s));
}

/// sinh(x*sqrt(a)) / (x*sqrt(a)), continued through a = 0 where it equals 1.
inline double sinhc_sqrt(double a, double x) {
  const double s = a * x * x;  // (x*sqrt(a))^2
  if (std::abs(s) < 1e-4) {
    // sinh(y)/y = 1 + s/6 + s^2/120 + s^3/5040 + s^4/362880, s = y^2
    return 1.0 + s / 6.0 * (1.0 + s / 20.0 * (1.0 + s / 42.0 * (1.0 + s / 72.0)));
  }
  if (s > 0.0) {
    const double y = std::sqrt(s);
    return std::sinh(y) / y;
  }
  const double y = std::sqrt(-s);
  return std::sin(y) / y;
}

}  // namespace qsm
