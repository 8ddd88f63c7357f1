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

#include "qsm/two_level.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qsm/hyperbolic.hpp"

namespace qsm {

namespace {

// Common bracket cosh(x sqrt(a)) + c*x*sinhc(x sqrt(a)) of the damped-mode
// solutions, with x = t/2 and a the squared splitting.
double mode_bracket(double a_sq, double coeff, double t) {
  const double x = 0.5 * t;
  return cosh_sqrt(a_sq, x) + coeff * x * sinhc_sqrt(a_sq, x);
}

}  // namespace

TwoLevelParams::TwoLevelParams(double gamma_, double kappa_plus_, double kappa_minus_)
    : gamma(gamma_), kappa_plus(kappa_plus_), kappa_minus(kappa_minus_) {
  if (!(gamma > 0.0)) throw std::invalid_argument("two-level: gamma must be positive");
  if (kappa_plus < 0.0 || kappa_minus < 0.0)
    throw std::invalid_argument("two-level: decay constants must be non-negative");
}

bool TwoLevelParams::classically_consistent() const {
  return 0.25 * gamma * gamma >= std::max(kappa_plus, kappa_minus);
}

TwoLevelParams TwoLevelParams::from_rescaled(double r_plus, double r_minus) {
  return TwoLevelParams(1.0, 0.25 * r_plus, 0.25 * r_minus);
}

double waiting_density(const TwoLevelParams& p, Level level, double tau) {
  if (tau < 0.0) throw std::domain_error("waiting_density: tau must be non-negative");
  const double kappa = level == Level::plus ? p.kappa_plus : p.kappa_minus;
  const double d_sq = level == Level::plus ? p.d_plus_sq() : p.d_minus_sq();
  return kappa * tau * std::exp(-0.5 * p.gamma * tau) * sinhc_sqrt(d_sq, 0.5 * tau);
}

std::pair<double, double> stage_rates(const TwoLevelParams& p, Level level) {
  const double d_sq = level == Level::plus ? p.d_plus_sq() : p.d_minus_sq();
  if (d_sq < 0.0)
    throw std::domain_error("stage_rates: second stage requires gamma^2 >= 4 kappa");
  const double half_split = 0.5 * std::sqrt(d_sq);
  return {0.5 * p.gamma + half_split, 0.5 * p.gamma - half_split};
}

double diagonal_transition(const TwoLevelParams& p, Level level, double t) {
  if (t < 0.0) throw std::domain_error("diagonal_transition: t must be non-negative");
  const double total = p.kappa_plus + p.kappa_minus;
  if (total == 0.0) return 1.0;
  const double stationary =
      (level == Level::plus ? p.kappa_minus : p.kappa_plus) / total;
  const double weight = 1.0 - stationary;
  double value = stationary + weight * std::exp(-0.5 * p.gamma * t) *
                                  mode_bracket(p.d_sq(), p.gamma, t);
  if (value < 0.0 && value > -1e-12) value = 0.0;
  return value;
}

double decay_factor(const TwoLevelParams& p, FactorPair pair, double t) {
  if (t < 0.0) throw std::domain_error("decay_factor: t must be non-negative");
  double a_sq = 0.0;
  switch (pair) {
    case FactorPair::plus_plus: a_sq = p.d_plus_sq(); break;
    case FactorPair::minus_minus: a_sq = p.d_minus_sq(); break;
    case FactorPair::off_diagonal: a_sq = p.d_bar_sq(); break;
  }
  return std::exp(-0.5 * p.gamma * t) * mode_bracket(a_sq, p.gamma, t);
}

double cp_gap(double r_plus, double r_minus, double tau) {
  if (tau < 0.0) throw std::domain_error("cp_gap: tau must be non-negative");
  const double s = r_plus + r_minus;
  const double half = 0.5 * tau;
  const double h2 = cosh_sqrt(1.0 - 0.5 * s, half) + half * sinhc_sqrt(1.0 - 0.5 * s, half);
  const double decayed_h2_sq = std::exp(-tau) * h2 * h2;
  if (s == 0.0) return 1.0 - decayed_h2_sq;  // frozen-population limit
  const double h1 = cosh_sqrt(1.0 - s, half) + half * sinhc_sqrt(1.0 - s, half);
  const double eh1 = std::exp(-half) * h1;
  const double first = (r_minus + r_plus * eh1) / s;
  const double second = (r_plus + r_minus * eh1) / s;
  return first * second - decayed_h2_sq;
}

double cp_gap(const TwoLevelParams& p, double tau) {
  return cp_gap(p.r_plus(), p.r_minus(), tau);
}

double cp_gap_leading_coefficient(double r_plus, double r_minus) {
  return -(r_plus * r_plus + r_minus * r_minus - 4.0 * r_plus * r_minus) / 384.0;
}

double cp_boundary_ratio() { return 2.0 + std::sqrt(3.0); }

std::pair<double, double> cp_boundary_ratios() {
  return {2.0 - std::sqrt(3.0), 2.0 + std::sqrt(3.0)};
}

double temperature_threshold() { return std::log(2.0 + std::sqrt(3.0)); }

double temperature_threshold_reciprocal() { return 1.0 / temperature_threshold(); }

ScanResult scan_region(double tau, int resolution, int threads) {
  if (!(tau > 0.0)) throw std::invalid_argument("scan_region: tau must be positive");
  if (resolution < 2) throw std::invalid_argument("scan_region: resolution must be at least 2");

  ScanResult out;
  out.tau = tau;
  out.r_minus.resize(static_cast<std::size_t>(resolution));
  out.r_plus.resize(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) {
    const double v = static_cast<double>(i) / (resolution - 1);
    out.r_minus[static_cast<std::size_t>(i)] = v;
    out.r_plus[static_cast<std::size_t>(i)] = v;
  }
  out.gap.resize(resolution, resolution);
  out.sign.resize(resolution, resolution);

  auto fill_row = [&](int i) {
    const double rm = out.r_minus[static_cast<std::size_t>(i)];
    for (int j = 0; j < resolution; ++j) {
      const double gap = cp_gap(out.r_plus[static_cast<std::size_t>(j)], rm, tau);
      out.gap(i, j) = gap;
      out.sign(i, j) = std::abs(gap) <= 1e-15 ? 0 : (gap < 0.0 ? -1 : 1);
    }
  };

  const int n_threads = std::max(1, threads);
  if (n_threads == 1) {
    for (int i = 0; i < resolution; ++i) fill_row(i);
  } else {
    std::atomic<int> cursor{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < n_threads; ++w)
      pool.emplace_back([&] {
        for (int i = cursor.fetch_add(1); i < resolution; i = cursor.fetch_add(1)) fill_row(i);
      });
    for (auto& th : pool) th.join();
  }
  return out;
}

WedgeSweepReport sweep_cp_wedge(int resolution, const std::vector<double>& taus, int threads) {
  if (resolution < 2) throw std::invalid_argument("sweep_cp_wedge: resolution must be at least 2");
  for (double tau : taus)
    if (!(tau > 0.0)) throw std::invalid_argument("sweep_cp_wedge: times must be positive");

  WedgeSweepReport report;
  report.resolution = resolution;
  report.taus = taus;

  struct RowResult {
    std::size_t checked = 0;
    double min_gap = 1.0;
    std::optional<WedgeSweepReport::Counterexample> hit;
  };
  std::vector<RowResult> rows(static_cast<std::size_t>(resolution));
  const double upper = cp_boundary_ratio();

  auto fill_row = [&](int i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    const double rm = static_cast<double>(i) / (resolution - 1);
    for (int j = 0; j < resolution; ++j) {
      const double rp = static_cast<double>(j) / (resolution - 1);
      if (rp < rm || rp > upper * rm) continue;
      for (double tau : taus) {
        const double gap = cp_gap(rp, rm, tau);
        ++row.checked;
        if (gap < row.min_gap) row.min_gap = gap;
        if (gap < -1e-12 && !row.hit) row.hit = {rm, rp, tau, gap};
      }
    }
  };

  const int n_threads = std::max(1, threads);
  if (n_threads == 1) {
    for (int i = 0; i < resolution; ++i) fill_row(i);
  } else {
    std::atomic<int> cursor{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < n_threads; ++w)
      pool.emplace_back([&] {
        for (int i = cursor.fetch_add(1); i < resolution; i = cursor.fetch_add(1)) fill_row(i);
      });
    for (auto& th : pool) th.join();
  }

  report.min_gap = 1.0;
  for (const auto& row : rows) {  // first counterexample in row order: deterministic
    report.points_checked += row.checked;
    report.min_gap = std::min(report.min_gap, row.min_gap);
    if (row.hit && !report.counterexample) report.counterexample = row.hit;
  }
  return report;
}

}  // namespace qsm
