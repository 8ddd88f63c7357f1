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

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qsm {

/// Two-level system with exponential memory functions
/// k_pm(tau) = kappa_pm * exp(-gamma * tau) and symmetric jumps.  All closed
/// forms below are evaluated through even functions of the mode-splitting
/// parameters, so they stay real when the splittings turn imaginary.
struct TwoLevelParams {
  double gamma;        ///< kernel decay rate (inverse time)
  double kappa_plus;   ///< decay constant of the upper level (inverse time squared)
  double kappa_minus;  ///< decay constant of the lower level

  TwoLevelParams(double gamma_, double kappa_plus_, double kappa_minus_);

  /// gamma^2/4 >= max(kappa_plus, kappa_minus): the associated waiting times
  /// are genuine (positive, normalized) distributions.
  bool classically_consistent() const;

  /// Rescaled decay constants r_pm = 4 kappa_pm / gamma^2, in [0,1] under the
  /// classical-consistency constraint.
  double r_plus() const { return 4.0 * kappa_plus / (gamma * gamma); }
  double r_minus() const { return 4.0 * kappa_minus / (gamma * gamma); }

  /// Squared mode splittings (kept squared: they may be negative).
  double d_plus_sq() const { return gamma * gamma - 4.0 * kappa_plus; }
  double d_minus_sq() const { return gamma * gamma - 4.0 * kappa_minus; }
  double d_sq() const { return gamma * gamma - 4.0 * (kappa_plus + kappa_minus); }
  double d_bar_sq() const { return gamma * gamma - 2.0 * (kappa_plus + kappa_minus); }

  /// Parameters with gamma = 1 and the given rescaled decay constants.
  static TwoLevelParams from_rescaled(double r_plus, double r_minus);
};

enum class Level { plus, minus };
enum class FactorPair { plus_plus, minus_minus, off_diagonal };

/// Waiting-time density f_pm(tau) of the associated sojourn process.
/// Non-negative and normalized exactly when the parameters are classically
/// consistent.
double waiting_density(const TwoLevelParams& p, Level level, double tau);

/// Stage rates (lambda_1, lambda_2) of the two-stage representation of
/// f_pm; requires classical consistency (real splitting).
std::pair<double, double> stage_rates(const TwoLevelParams& p, Level level);

/// Conditional probability T_pm,pm(t) of occupying the initial level at time
/// t (solution of the damped second-order population equation).  Tiny
/// negative excursions below 1e-12 are clamped to zero.
double diagonal_transition(const TwoLevelParams& p, Level level, double t);

/// Entries of the decay-factor matrix: the diagonals are the survival
/// probabilities, the off-diagonal governs the coherence.
double decay_factor(const TwoLevelParams& p, FactorPair pair, double t);

/// CP margin gap of the two-level lattice map in rescaled variables,
/// T_++ T_-- - g_+-^2, as a function of r_pm and tau = gamma*t.  Negative
/// values mean the map is not completely positive at that time.  The
/// degenerate corner r_plus = r_minus = 0 is defined by its limit (frozen
/// populations), which vanishes identically.
double cp_gap(double r_plus, double r_minus, double tau);
double cp_gap(const TwoLevelParams& p, double tau);

/// Leading short-time coefficient: cp_gap(tau) = c * tau^4 + O(tau^5) with
/// c = -(r_+^2 + r_-^2 - 4 r_+ r_-)/384.  (The cubic term of the expansion
/// vanishes identically.)  The sign boundary c = 0 sits at the ratios
/// r_+/r_- = 2 -+ sqrt(3).
double cp_gap_leading_coefficient(double r_plus, double r_minus);

/// Critical ratio r_+/r_- = 2 + sqrt(3) separating short-time CP violation
/// from preservation (the larger root of x^2 - 4x + 1).
double cp_boundary_ratio();
/// Both roots {2 - sqrt(3), 2 + sqrt(3)}.
std::pair<double, double> cp_boundary_ratios();

/// Thermal reading of the boundary: beta*hbar*omega threshold ln(2+sqrt(3)),
/// above which (colder reservoirs) complete positivity is lost at short
/// times.
double temperature_threshold();
/// k_B T / (hbar omega) at the threshold, 1/ln(2+sqrt(3)) (about 0.76).
double temperature_threshold_reciprocal();

/// Sign map of cp_gap over (r_minus, r_plus) in [0,1]^2 at fixed tau.
struct ScanResult {
  double tau = 0.0;
  std::vector<double> r_minus;  ///< row axis
  std::vector<double> r_plus;   ///< column axis
  Eigen::MatrixXd gap;          ///< gap(i,j) at (r_minus[i], r_plus[j])
  Eigen::MatrixXi sign;         ///< -1 / 0 / +1 with a 1e-15 zero band
};

/// Evaluates the gap on a resolution x resolution grid; rows may be computed
/// in parallel, the output layout is row-major and deterministic.
ScanResult scan_region(double tau, int resolution, int threads = 1);

/// Dense sweep of the wedge r_- <= r_+ <= (2+sqrt(3)) r_- over a list of
/// times, hunting for sign changes of the gap.  Whether the wedge is free of
/// violations at all times is an observed finding, reported but never
/// asserted; a counterexample, if one appears, is returned.
struct WedgeSweepReport {
  int resolution = 0;
  std::vector<double> taus;
  std::size_t points_checked = 0;
  double min_gap = 0.0;
  struct Counterexample {
    double r_minus, r_plus, tau, gap;
  };
  std::optional<Counterexample> counterexample;  ///< gap < -1e-12 if any
};

WedgeSweepReport sweep_cp_wedge(int resolution, const std::vector<double>& taus,
                                int threads = 1);

}  // namespace qsm
