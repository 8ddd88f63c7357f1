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

#include "validation.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>

#include "qsm/classical.hpp"
#include "qsm/quantum.hpp"
#include "qsm/two_level.hpp"
#include "qsm/volterra.hpp"
#include "qsm/waiting_time.hpp"

namespace qsm::tool {

namespace {

using Clock = std::chrono::steady_clock;
using complexd = std::complex<double>;

// -- small local fitting helpers --------------------------------------------

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i)
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

double fit_two_term(const std::vector<double>& t, const std::vector<double>& y, int power) {
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double tp = std::pow(t[i], power);
    const double tq = tp * t[i];
    a11 += tp * tp;
    a12 += tp * tq;
    a22 += tq * tq;
    b1 += tp * y[i];
    b2 += tq * y[i];
  }
  return (b1 * a22 - b2 * a12) / (a11 * a22 - a12 * a12);
}

double fit_single_term(const std::vector<double>& t, const std::vector<double>& y, int power) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double tp = std::pow(t[i], power);
    num += tp * y[i];
    den += tp * tp;
  }
  return num / den;
}

// -- shared two-level machinery ----------------------------------------------

Eigen::MatrixXd symmetric_jumps() {
  Eigen::MatrixXd pi(2, 2);
  pi << 0.0, 1.0, 1.0, 0.0;
  return pi;
}

struct TwoLevelRun {
  TwoLevelParams params;
  TimeGrid grid;
  PropagationResult classical;
  FactorGrid factors;
  PropagatorGrid propagator;
};

TwoLevelRun run_two_level(double kappa_plus, double kappa_minus, double step, double horizon) {
  const TwoLevelParams params(1.0, kappa_plus, kappa_minus);
  const auto grid = TimeGrid::from_horizon(step, horizon);
  const std::vector<MemoryFunction> memory = {
      MemoryFunction::exponential_decay(kappa_plus, 1.0),
      MemoryFunction::exponential_decay(kappa_minus, 1.0)};
  const auto spec = QuantumKernelSpec::lattice(symmetric_jumps(), memory);
  return {params, grid, solve_gme(symmetric_jumps(), memory, grid),
          decoherence_factors(spec, grid), build_propagator(spec, grid)};
}

// Largest deviation of the solver outputs from the closed forms: transition
// probabilities, decay factors, coherence channel of the propagator, and the
// waiting densities reconstructed by convolving kernel against survival.
double two_level_error(const TwoLevelRun& run) {
  const auto& grid = run.grid;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i);
    const double t_up = diagonal_transition(run.params, Level::plus, t);
    const double t_down = diagonal_transition(run.params, Level::minus, t);
    worst = std::max(worst, std::abs(run.classical.transition[i](0, 0) - t_up));
    worst = std::max(worst, std::abs(run.classical.transition[i](1, 1) - t_down));
    worst = std::max(worst, std::abs(run.factors.values[i](0, 0).real() -
                                     decay_factor(run.params, FactorPair::plus_plus, t)));
    worst = std::max(worst, std::abs(run.factors.values[i](1, 1).real() -
                                     decay_factor(run.params, FactorPair::minus_minus, t)));
    worst = std::max(worst, std::abs(run.factors.values[i](0, 1).real() -
                                     decay_factor(run.params, FactorPair::off_diagonal, t)));
    // propagator entries: populations and the coherence channel
    worst = std::max(worst, std::abs(run.propagator.maps[i](0, 0) - complexd(t_up)));
    worst = std::max(worst, std::abs(run.propagator.maps[i](3, 3) - complexd(t_down)));
    worst = std::max(worst, std::abs(run.propagator.maps[i](1, 1) -
                                     complexd(decay_factor(run.params, FactorPair::off_diagonal, t))));
  }
  // waiting densities via the convolution identity f = k * g on the numeric
  // survival factors
  for (int level = 0; level < 2; ++level) {
    const double kappa = level == 0 ? run.params.kappa_plus : run.params.kappa_minus;
    if (kappa == 0.0) continue;
    const auto k = MemoryFunction::exponential_decay(kappa, 1.0).sample(grid);
    SampledReal g(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      g.values[i] = run.factors.values[i](level, level).real();
    const auto f = convolve(k, g);
    for (std::size_t i = 0; i < grid.size(); ++i)
      worst = std::max(worst, std::abs(f.values[i] - waiting_density(run.params,
                                                                     level == 0 ? Level::plus
                                                                                : Level::minus,
                                                                     grid.time(i))));
  }
  return worst;
}

constexpr double kCriterion3Params[3][2] = {{0.1875, 0.12}, {0.2, 0.2}, {0.24, 0.0}};

// -- check registry -----------------------------------------------------------

struct Recorder {
  std::vector<CheckResult> results;

  template <class F>
  void run(const std::string& name, double threshold, bool larger_is_better, F&& body,
           bool known_defect = false) {
    CheckResult r;
    r.name = name;
    r.threshold = threshold;
    r.larger_is_better = larger_is_better;
    r.known_defect = known_defect;
    const auto start = Clock::now();
    r.measured = body(r.detail);
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    r.pass = larger_is_better ? r.measured >= threshold : r.measured <= threshold;
    results.push_back(std::move(r));
  }
};

}  // namespace

std::vector<CheckResult> run_acceptance(int threads, const std::string& inject_failure) {
  static const char* kNames[] = {
      "1-memory-inversion",       "2-negative-kernel-witness", "3-two-level-closed-forms",
      "4-gap-taylor-cubic-law",   "4-gap-taylor-quartic-law",  "5-cp-boundary",
      "6-temperature-threshold",  "7-markovian-limit",         "8-choi-equivalence",
      "9-monte-carlo-vs-gme",     "10-classical-inequalities", "11-convergence-order"};
  if (!inject_failure.empty()) {
    bool known = false;
    for (const char* name : kNames) known = known || inject_failure == name;
    if (!known) throw std::invalid_argument("unknown check '" + inject_failure + "'");
  }

  Recorder rec;

  // 1. memory-function inversion of the three-stage chain
  rec.run("1-memory-inversion", 1e-5, false, [&](std::string& detail) {
    const auto start = Clock::now();
    const auto grid = TimeGrid::from_horizon(1e-3, 10.0);
    const auto w = WaitingTime::special_erlang(1.0, 3);
    const auto f = SampledReal::tabulate(grid, [&](double t) { return w.density(t); });
    const auto g = SampledReal::tabulate(grid, [&](double t) { return w.survival(t); });
    const auto k = invert_memory(f, g);
    double worst = 0.0;
    double min_in_window = 1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double t = grid.time(i);
      const double expect =
          2.0 / std::sqrt(3.0) * std::sin(0.5 * std::sqrt(3.0) * t) * std::exp(-1.5 * t);
      worst = std::max(worst, std::abs(k.values[i] - expect));
      if (t > 3.6 && t < 4.0) min_in_window = std::min(min_in_window, k.values[i]);
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "max err %.3g on [0,10] h=1e-3; min on (3.6,4.0) %.3g (<0 required); "
                  "runtime<5s %s",
                  worst, min_in_window, elapsed < 5.0 ? "ok" : "EXCEEDED");
    detail = buf;
    if (min_in_window >= 0.0 || elapsed >= 5.0) return 1.0;  // force failure
    return worst;
  });

  // 2. negative-kernel witness of the two-component mixture
  rec.run("2-negative-kernel-witness", 1e-5, false, [&](std::string& detail) {
    const auto w = WaitingTime::multi_exponential({0.5, 0.5}, {1.0, 3.0});
    const auto k_closed = w.memory_function();
    const double weight_err = std::abs(k_closed.delta_weight() - 2.0);
    const auto grid = TimeGrid::from_horizon(1e-3, 10.0);
    double closed_err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      closed_err = std::max(closed_err,
                            std::abs(k_closed.regular(grid.time(i)) + std::exp(-2.0 * grid.time(i))));
    const auto f = SampledReal::tabulate(grid, [&](double t) { return w.density(t); });
    const auto g = SampledReal::tabulate(grid, [&](double t) { return w.survival(t); });
    const auto k_num = invert_memory(f, g);
    double numeric_err = std::abs(k_num.delta_weight - 2.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
      numeric_err =
          std::max(numeric_err, std::abs(k_num.values[i] + std::exp(-2.0 * grid.time(i))));
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "closed form: weight err %.3g, regular err %.3g; numeric inversion err %.3g",
                  weight_err, closed_err, numeric_err);
    detail = buf;
    return std::max({weight_err, closed_err, numeric_err});
  });

  // 3. two-level closed forms against both solvers
  std::vector<TwoLevelRun> runs_fine;
  rec.run("3-two-level-closed-forms", 1e-6, false, [&](std::string& detail) {
    const auto start = Clock::now();
    double worst = 0.0;
    for (const auto& p : kCriterion3Params) {
      runs_fine.push_back(run_two_level(p[0], p[1], 1e-3, 20.0));
      worst = std::max(worst, two_level_error(runs_fine.back()));
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "max err %.3g over 3 parameter sets, t in [0,20], h=1e-3; runtime<30s %s",
                  worst, elapsed < 30.0 ? "ok" : "EXCEEDED");
    detail = buf;
    if (elapsed >= 30.0) return 1.0;
    return worst;
  });

  // 4. short-time Taylor law of the gap.  The literal cubic-law target is
  // checked first; the exact expansion of the implemented closed forms has a
  // vanishing cubic term (leading order -(r+^2+r-^2-4r+r-)/384 * tau^4), so
  // this check documents its failure and the quartic law is verified next.
  const auto taus = log_spaced(1e-3, 1e-2, 24);
  auto gap_samples = [&](double rp, double rm) {
    std::vector<double> out;
    out.reserve(taus.size());
    for (double tau : taus) out.push_back(cp_gap(rp, rm, tau));
    return out;
  };
  std::mt19937_64 law_rng(20260811);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::vector<std::pair<double, double>> law_points;
  for (int i = 0; i < 20; ++i) law_points.emplace_back(unit(law_rng), unit(law_rng));

  rec.run(
      "4-gap-taylor-cubic-law", 0.01, false,
      [&](std::string& detail) {
        double worst_rel = 0.0;
        for (const auto& [rp, rm] : law_points) {
          const double target = -(rp * rp + rm * rm - 4.0 * rp * rm) / 96.0;
          if (std::abs(target) < 1e-4) continue;
          const double fitted = fit_two_term(taus, gap_samples(rp, rm), 3);
          worst_rel = std::max(worst_rel, std::abs(fitted - target) / std::abs(target));
        }
        double corner_rel = 0.0;
        const double c10 = fit_two_term(taus, gap_samples(1.0, 0.0), 3);
        const double c11 = fit_two_term(taus, gap_samples(1.0, 1.0), 3);
        corner_rel = std::max(std::abs(c10 + 1.0 / 96.0) / (1.0 / 96.0),
                              std::abs(c11 - 1.0 / 48.0) / (1.0 / 48.0));
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "fitted cubic coefficients are ~0 (corners %.3g, %.3g): the exact gap "
                      "expansion starts at fourth order; see 4-gap-taylor-quartic-law",
                      c10, c11);
        detail = buf;
        return std::max(worst_rel, corner_rel);
      },
      /*known_defect=*/true);

  rec.run("4-gap-taylor-quartic-law", 0.01, false, [&](std::string& detail) {
    double worst_rel = 0.0;
    for (const auto& [rp, rm] : law_points) {
      const double target = cp_gap_leading_coefficient(rp, rm);
      if (std::abs(target) < 1e-4) continue;
      const double fitted = fit_two_term(taus, gap_samples(rp, rm), 4);
      worst_rel = std::max(worst_rel, std::abs(fitted - target) / std::abs(target));
    }
    const double c10 = fit_two_term(taus, gap_samples(1.0, 0.0), 4);
    const double c11 = fit_two_term(taus, gap_samples(1.0, 1.0), 4);
    const double corner_rel = std::max(std::abs(c10 + 1.0 / 384.0) * 384.0,
                                       std::abs(c11 - 1.0 / 192.0) * 192.0);
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "leading coefficient matches -(r+^2+r-^2-4 r+ r-)/384: max rel err %.3g "
                  "(random), %.3g (corners, 0.1%% required)",
                  worst_rel, corner_rel);
    detail = buf;
    if (corner_rel > 1e-3) return 1.0;
    return worst_rel;
  });

  // 5. short-time CP boundary along r_- = 0.2
  rec.run("5-cp-boundary", 1.0 / 199.0 + 1e-12, false, [&](std::string& detail) {
    const double rm = 0.2;
    const double target = cp_boundary_ratio() * rm;
    double crossing = -1.0;
    double prev = fit_single_term(taus, gap_samples(0.0, rm), 3);
    for (int i = 1; i < 200; ++i) {
      const double rp = static_cast<double>(i) / 199.0;
      const double coeff = fit_single_term(taus, gap_samples(rp, rm), 3);
      if (prev >= 0.0 && coeff < 0.0 && rp > 0.5) {
        crossing = rp;
        break;
      }
      prev = coeff;
    }
    const auto [lower, upper] = cp_boundary_ratios();
    const double root_residual = std::max(std::abs(upper * upper - 4.0 * upper + 1.0),
                                          std::abs(lower * lower - 4.0 * lower + 1.0));
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "sign change at r+=%.6f vs (2+sqrt3)*0.2=%.6f on a 200-point sweep; quadratic "
                  "root residual %.2g (<=1e-12)",
                  crossing, target, root_residual);
    detail = buf;
    if (crossing < 0.0 || root_residual > 1e-12) return 1.0;
    return std::abs(crossing - target);
  });

  // 6. temperature threshold
  rec.run("6-temperature-threshold", 1e-12, false, [&](std::string& detail) {
    const double err = std::abs(temperature_threshold() - std::log(2.0 + std::sqrt(3.0)));
    const double reciprocal = temperature_threshold_reciprocal();
    const bool rounds = std::round(reciprocal * 10.0) / 10.0 == 0.8;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "threshold err %.2g; reciprocal %.6f rounds to 0.8: %s", err,
                  reciprocal, rounds ? "yes" : "no");
    detail = buf;
    if (!rounds) return 1.0;
    return err;
  });

  // 7. memoryless limit: exact semigroup against the exponential of the
  // generator, the semigroup property, and positivity of the factor matrix
  rec.run("7-markovian-limit", 1e-8, false, [&](std::string& detail) {
    const auto spec = QuantumKernelSpec::lattice(
        symmetric_jumps(), {MemoryFunction::delta(0.9), MemoryFunction::delta(0.35)});
    const auto grid = TimeGrid::from_horizon(1e-3, 10.0);
    const auto prop = build_propagator(spec, grid);

    Eigen::MatrixXcd lindblad = Eigen::MatrixXcd::Zero(4, 4);
    lindblad(0, 0) = -0.9;
    lindblad(3, 3) = -0.35;
    lindblad(1, 1) = lindblad(2, 2) = -0.5 * (0.9 + 0.35);
    lindblad(3, 0) = 0.9;
    lindblad(0, 3) = 0.35;
    double exp_err = 0.0;
    for (std::size_t i = 0; i < grid.size(); i += 125) {
      const Eigen::MatrixXcd reference = (lindblad * grid.time(i)).exp();
      exp_err = std::max(exp_err, (prop.maps[i] - reference).cwiseAbs().maxCoeff());
    }
    double semigroup_err = 0.0;
    for (const auto& [a, b] : {std::pair<int, int>{2000, 3000}, {1234, 5678}, {4000, 6000}})
      semigroup_err = std::max(semigroup_err,
                               (prop.maps[static_cast<std::size_t>(a + b)] -
                                prop.maps[static_cast<std::size_t>(a)] *
                                    prop.maps[static_cast<std::size_t>(b)])
                                   .cwiseAbs()
                                   .maxCoeff());
    const auto slice = check_factor_positivity(spec, grid);
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "exp(L t) err %.3g (<=1e-8); semigroup err %.3g (<=1e-6); factor matrix PSD: %s",
                  exp_err, semigroup_err, slice.holds ? "yes" : "no");
    detail = buf;
    if (semigroup_err > 1e-6 || !slice.holds) return 1.0;
    return exp_err;
  });

  // 8. equivalence of the reduced CP test and the Choi spectrum of the exact
  // lattice map at nine parameter points
  rec.run("8-choi-equivalence", 1e-8, false, [&](std::string& detail) {
    const double points[9][2] = {{0.2, 0.2}, {0.5, 0.2}, {1.0, 0.2}, {0.2, 0.8}, {0.8, 0.8},
                                 {1.0, 0.1}, {0.6, 0.0}, {1.0, 1.0}, {0.9, 0.45}};
    double worst = 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig;
    for (const auto& p : points) {
      const double kp = 0.25 * p[0], km = 0.25 * p[1];
      const std::vector<MemoryFunction> memory = {MemoryFunction::exponential_decay(kp, 1.0),
                                                  MemoryFunction::exponential_decay(km, 1.0)};
      const auto spec = QuantumKernelSpec::lattice(symmetric_jumps(), memory);
      const auto grid = TimeGrid::from_horizon(2e-3, 20.0);
      const auto factors = decoherence_factors(spec, grid);
      const auto populations = solve_gme(symmetric_jumps(), memory, grid);
      const auto slice = check_lattice_cp(spec, factors, populations);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto v = lattice_map_superoperator(populations.transition[i], factors.values[i]);
        const auto choi = choi_matrix(v);
        eig.compute(0.5 * (choi + choi.adjoint()), Eigen::EigenvaluesOnly);
        worst = std::max(worst,
                         std::abs(eig.eigenvalues().minCoeff() - slice.min_eigenvalue[i]));
      }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "max |choi min-eig - reduced margin| %.3g over 9 points, every grid time",
                  worst);
    detail = buf;
    return worst;
  });

  // 9. Monte Carlo against the generalized master equation
  rec.run("9-monte-carlo-vs-gme", 3.0, false, [&](std::string& detail) {
    const auto start = Clock::now();
    const SemiMarkovSpec spec(symmetric_jumps(), {WaitingTime::special_erlang(1.0, 3),
                                                  WaitingTime::special_erlang(1.5, 3)});
    std::vector<double> times;
    for (int k = 1; k <= 10; ++k) times.push_back(k);
    const std::size_t n_traj = 100000;
    const auto estimate = simulate_trajectories(spec, 0, times, n_traj, 20260811, threads);
    const auto rerun = simulate_trajectories(spec, 0, times, n_traj, 20260811, threads);
    const bool identical = estimate.occupation == rerun.occupation;

    const auto grid = TimeGrid::from_horizon(1e-3, 10.0);
    const auto gme = solve_gme(spec, grid);
    double worst_z = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto i = static_cast<std::size_t>(std::llround(times[k] / grid.step));
      for (int n = 0; n < 2; ++n) {
        const double se =
            std::max(estimate.std_error(n, static_cast<Eigen::Index>(k)), 1e-12);
        worst_z = std::max(worst_z, std::abs(estimate.occupation(n, static_cast<Eigen::Index>(k)) -
                                             gme.transition[i](n, 0)) /
                                        se);
      }
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "max |z| %.2f over 10 sample times, 1e5 trajectories; rerun identical: %s; "
                  "runtime<60s %s",
                  worst_z, identical ? "yes" : "no", elapsed < 60.0 ? "ok" : "EXCEEDED");
    detail = buf;
    if (!identical || elapsed >= 60.0) return 1e9;
    return worst_z;
  });

  // 10. classical inequalities on the criterion-3 solves.  The return
  // probability is compared against the survival probability computed on the
  // same grid (the diagonal of the factor matrix): that is the quantity the
  // lattice condition replaces, and at the one-way equality point the two
  // solves coincide to rounding.
  rec.run("10-classical-inequalities", 1e-6, false, [&](std::string& detail) {
    double floor_margin = 0.0;  // worst violation of T_nn >= g_n - 1e-8
    for (const auto& run : runs_fine) {
      for (std::size_t i = 0; i < run.grid.size(); ++i) {
        floor_margin = std::min({floor_margin,
                                 run.classical.transition[i](0, 0) -
                                     run.factors.values[i](0, 0).real() + 1e-8,
                                 run.classical.transition[i](1, 1) -
                                     run.factors.values[i](1, 1).real() + 1e-8});
      }
    }
    // one-way decay: the (0.24, 0) run pins the diagonals
    const auto& one_way = runs_fine[2];
    double pin_err = 0.0;
    for (std::size_t i = 0; i < one_way.grid.size(); ++i) {
      const double t = one_way.grid.time(i);
      pin_err = std::max(pin_err, std::abs(one_way.classical.transition[i](0, 0) -
                                           decay_factor(one_way.params, FactorPair::plus_plus, t)));
      pin_err = std::max(pin_err, std::abs(one_way.classical.transition[i](1, 1) - 1.0));
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "worst survival-floor margin %.3g (>=0 required); one-way decay pin err %.3g",
                  floor_margin, pin_err);
    detail = buf;
    if (floor_margin < 0.0) return 1.0;
    return pin_err;
  });

  // 11. second-order convergence: halving the step from 2e-3 to 1e-3
  rec.run("11-convergence-order", 3.5, true, [&](std::string& detail) {
    double coarse = 0.0, fine = 0.0;
    for (std::size_t p = 0; p < 3; ++p) {
      coarse = std::max(
          coarse, two_level_error(run_two_level(kCriterion3Params[p][0], kCriterion3Params[p][1],
                                                2e-3, 20.0)));
      fine = std::max(fine, two_level_error(runs_fine[p]));
    }
    const double ratio = coarse / fine;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "err(2e-3)=%.3g, err(1e-3)=%.3g, ratio %.2f (>=3.5)", coarse,
                  fine, ratio);
    detail = buf;
    return ratio;
  });

  if (!inject_failure.empty()) {
    for (auto& r : rec.results)
      if (r.name == inject_failure) {
        r.pass = false;
        r.detail += " [failure injected for testing]";
      }
  }
  return rec.results;
}

nlohmann::json report_json(const std::vector<CheckResult>& results) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& r : results)
    checks.push_back({{"name", r.name},
                      {"measured", r.measured},
                      {"threshold", r.threshold},
                      {"comparison", r.larger_is_better ? ">=" : "<="},
                      {"pass", r.pass},
                      {"known_defect", r.known_defect},
                      {"detail", r.detail}});
  bool all = true;
  for (const auto& r : results) all = all && r.pass;
  return {{"all_pass", all}, {"checks", checks}};
}

std::string format_line(const CheckResult& result) {
  char buf[400];
  std::snprintf(buf, sizeof(buf), "[%s] %-28s measured %.4g %s %.4g (%.2fs)%s\n    %s",
                result.pass ? "PASS" : "FAIL", result.name.c_str(), result.measured,
                result.larger_is_better ? ">=" : "<=", result.threshold, result.seconds,
                result.known_defect && !result.pass ? "  [documented defect]" : "",
                result.detail.c_str());
  return {buf};
}

}  // namespace qsm::tool
