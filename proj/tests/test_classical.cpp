#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "qsm/classical.hpp"
#include "qsm/volterra.hpp"

using namespace qsm;

namespace {

// Closed-form conditional transition probability of the symmetric two-state
// process with exponential memory functions kappa_pm e^{-gamma t}: solution
// of the damped second-order population equation.  Evaluated through complex
// arithmetic so it is valid for an imaginary splitting as well.
double telegraph_transition(double gamma, double kp, double km, bool plus, double t) {
  const std::complex<double> d = std::sqrt(std::complex<double>(gamma * gamma - 4.0 * (kp + km)));
  const std::complex<double> bracket =
      std::cosh(0.5 * d * t) + gamma / d * std::sinh(0.5 * d * t);
  const double stationary = (plus ? km : kp) / (kp + km);
  return stationary + (1.0 - stationary) * std::exp(-0.5 * gamma * t) * std::real(bracket);
}

double survival_closed_form(double gamma, double kappa, double t) {
  const std::complex<double> d = std::sqrt(std::complex<double>(gamma * gamma - 4.0 * kappa));
  const std::complex<double> bracket =
      std::cosh(0.5 * d * t) + gamma / d * std::sinh(0.5 * d * t);
  return std::exp(-0.5 * gamma * t) * std::real(bracket);
}

Eigen::MatrixXd symmetric_jumps() {
  Eigen::MatrixXd pi(2, 2);
  pi << 0.0, 1.0, 1.0, 0.0;
  return pi;
}

}  // namespace

TEST_CASE("memoryless limit matches the matrix exponential of the rate generator") {
  const SemiMarkovSpec spec(symmetric_jumps(),
                            {WaitingTime::exponential(1.2), WaitingTime::exponential(0.8)});
  const auto grid = TimeGrid::from_horizon(1e-3, 10.0);
  const auto result = solve_gme(spec, grid);
  CHECK(result.semigroup);

  Eigen::MatrixXd generator(2, 2);
  generator << -1.2, 0.8, 1.2, -0.8;
  for (std::size_t i = 0; i < grid.size(); i += 499) {
    const Eigen::MatrixXd expected = oracles::expm(Eigen::MatrixXd(generator * grid.time(i)));
    CHECK((result.transition[i] - expected).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("exponential memory functions reproduce the damped-mode transition probabilities") {
  const double gamma = 1.0, kp = 0.1875, km = 0.12;
  const std::vector<MemoryFunction> memory = {MemoryFunction::exponential_decay(kp, gamma),
                                              MemoryFunction::exponential_decay(km, gamma)};
  const auto grid = TimeGrid::from_horizon(1e-3, 10.0);
  const auto result = solve_gme(symmetric_jumps(), memory, grid);

  CHECK(result.transition[0].isIdentity(1e-14));
  CHECK(result.conservation_drift < 1e-10);

  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i);
    worst = std::max(worst, std::abs(result.transition[i](0, 0) -
                                     telegraph_transition(gamma, kp, km, true, t)));
    worst = std::max(worst, std::abs(result.transition[i](1, 1) -
                                     telegraph_transition(gamma, kp, km, false, t)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("the two-stage waiting-time construction gives the same kernel") {
  // Stage rates gamma/2 +- sqrt(gamma^2 - 4 kappa)/2 turn the exponential
  // memory functions into two-stage chains; both routes must agree.
  auto stage_rates = [](double gamma, double kappa) {
    const double d = std::sqrt(gamma * gamma - 4.0 * kappa);
    return std::vector<double>{0.5 * (gamma + d), 0.5 * (gamma - d)};
  };
  const SemiMarkovSpec spec(symmetric_jumps(),
                            {WaitingTime::generalized_erlang(stage_rates(1.0, 0.1875)),
                             WaitingTime::generalized_erlang(stage_rates(1.0, 0.12))});
  const auto grid = TimeGrid::from_horizon(1e-3, 6.0);
  const auto via_waiting = solve_gme(spec, grid);
  const std::vector<MemoryFunction> memory = {MemoryFunction::exponential_decay(0.1875, 1.0),
                                              MemoryFunction::exponential_decay(0.12, 1.0)};
  const auto via_memory = solve_gme(spec.jump_prob(), memory, grid);
  for (std::size_t i = 0; i < grid.size(); i += 211)
    CHECK((via_waiting.transition[i] - via_memory.transition[i]).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("transition probabilities stay positive, conserved and above the survival") {
  const SemiMarkovSpec spec(symmetric_jumps(),
                            {WaitingTime::generalized_erlang({0.75, 0.25}),
                             WaitingTime::special_erlang(0.9, 2)});
  const auto grid = TimeGrid::from_horizon(1e-3, 12.0);
  const auto result = solve_gme(spec, grid);
  CHECK(result.conservation_drift < 1e-8);
  for (std::size_t i = 0; i < grid.size(); i += 37) {
    const auto& t = result.transition[i];
    CHECK(t.minCoeff() > -1e-8);
    for (int n = 0; n < 2; ++n)
      CHECK(t(n, n) >= spec.waiting(n).survival(grid.time(i)) - 1e-8);
  }
}

TEST_CASE("one-way decay pins the diagonal to the survival probability") {
  const std::vector<MemoryFunction> memory = {MemoryFunction::exponential_decay(0.24, 1.0),
                                              MemoryFunction::zero()};
  const auto grid = TimeGrid::from_horizon(1e-3, 15.0);
  const auto result = solve_gme(symmetric_jumps(), memory, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    worst = std::max(worst, std::abs(result.transition[i](0, 0) -
                                     survival_closed_form(1.0, 0.24, grid.time(i))));
    worst = std::max(worst, std::abs(result.transition[i](1, 1) - 1.0));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("pauli evolution of the symmetric two-state chain") {
  Eigen::MatrixXd rates(2, 2);
  rates << 0.0, 0.7, 0.7, 0.0;
  const MarkovSpec spec(rates);
  const auto grid = TimeGrid::from_horizon(1e-3, 8.0);
  Eigen::VectorXd p0(2);
  p0 << 1.0, 0.0;
  const auto result = pauli_evolve(spec, p0, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double expect = 0.5 * (1.0 + std::exp(-1.4 * grid.time(i)));
    worst = std::max(worst, std::abs(result.occupation[i](0) - expect));
  }
  CHECK(worst <= 1e-6);
  CHECK(result.conservation_drift < 1e-12);
}

TEST_CASE("pauli evolution trivial cases") {
  const auto grid = TimeGrid(1e-2, 500);
  Eigen::VectorXd p0(2);
  p0 << 0.3, 0.7;
  const auto frozen = pauli_evolve(MarkovSpec(Eigen::MatrixXd::Zero(2, 2)), p0, grid);
  CHECK((frozen.occupation.back() - p0).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::MatrixXd rates(2, 2);
  rates << 0.0, 1.1, 1.1, 0.0;
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(2, 0.5);
  const auto stationary = pauli_evolve(MarkovSpec(rates), uniform, grid);
  CHECK((stationary.occupation.back() - uniform).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("monte carlo occupation matches the rate-equation oracle") {
  const SemiMarkovSpec spec(symmetric_jumps(),
                            {WaitingTime::exponential(1.0), WaitingTime::exponential(2.0)});
  const std::vector<double> times = {0.5, 1.0, 1.5, 2.0, 3.0, 4.0};
  const std::size_t n_traj = 40000;
  const auto estimate = simulate_trajectories(spec, 0, times, n_traj, 42);

  Eigen::MatrixXd rates(2, 2);
  rates << 0.0, 2.0, 1.0, 0.0;
  Eigen::VectorXd p0(2);
  p0 << 1.0, 0.0;
  const auto grid = TimeGrid::from_horizon(1e-3, times.back());
  const auto oracle = pauli_evolve(MarkovSpec(rates), p0, grid);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto i = static_cast<std::size_t>(std::llround(times[k] / grid.step));
    for (int n = 0; n < 2; ++n) {
      const double se = std::max(estimate.std_error(n, static_cast<Eigen::Index>(k)), 1e-12);
      CHECK(std::abs(estimate.occupation(n, static_cast<Eigen::Index>(k)) -
                     oracle.occupation[i](n)) < 3.0 * se);
    }
  }
}

TEST_CASE("monte carlo occupation matches the memory solver for three-stage sojourns") {
  const SemiMarkovSpec spec(symmetric_jumps(), {WaitingTime::special_erlang(1.0, 3),
                                                WaitingTime::exponential(0.8)});
  const std::vector<double> times = {1.0, 2.0, 4.0, 6.0};
  const auto estimate = simulate_trajectories(spec, 0, times, 40000, 2026);
  const auto grid = TimeGrid::from_horizon(1e-3, times.back());
  const auto gme = solve_gme(spec, grid);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto i = static_cast<std::size_t>(std::llround(times[k] / grid.step));
    for (int n = 0; n < 2; ++n) {
      const double se = std::max(estimate.std_error(n, static_cast<Eigen::Index>(k)), 1e-12);
      CHECK(std::abs(estimate.occupation(n, static_cast<Eigen::Index>(k)) -
                     gme.transition[i](n, 0)) < 3.0 * se);
    }
  }
}

TEST_CASE("monte carlo runs are reproducible and thread-count independent") {
  const SemiMarkovSpec spec(symmetric_jumps(), {WaitingTime::special_erlang(1.0, 3),
                                                WaitingTime::exponential(0.8)});
  const std::vector<double> times = {0.5, 1.5, 3.0};
  const auto a = simulate_trajectories(spec, 0, times, 10000, 9, 1);
  const auto b = simulate_trajectories(spec, 0, times, 10000, 9, 1);
  const auto c = simulate_trajectories(spec, 0, times, 10000, 9, 4);
  CHECK(a.occupation == b.occupation);
  CHECK(a.occupation == c.occupation);
  const auto other_seed = simulate_trajectories(spec, 0, times, 10000, 10, 1);
  CHECK(a.occupation != other_seed.occupation);
}

TEST_CASE("empty trajectory sets are rejected") {
  const SemiMarkovSpec spec(symmetric_jumps(),
                            {WaitingTime::exponential(1.0), WaitingTime::exponential(1.0)});
  CHECK_THROWS_AS((void)simulate_trajectories(spec, 0, std::vector<double>{1.0}, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("laplace-domain identities close for memoryless and three-stage specs") {
  const SemiMarkovSpec markov(symmetric_jumps(), {WaitingTime::exponential(1.3),
                                                  WaitingTime::exponential(0.6)});
  CHECK(laplace_consistency(markov, 1.0) <= 1e-4);

  // the memoryless kernel transform is the u-independent rate matrix
  const auto grid = TimeGrid::from_horizon(1e-3, 30.0);
  const auto k = WaitingTime::exponential(1.3).memory_function().sample(grid);
  for (double u : {1.0, 2.5})
    CHECK(laplace_probe(k, u).value == doctest::Approx(1.3).epsilon(1e-12));

  const SemiMarkovSpec erlang(symmetric_jumps(), {WaitingTime::special_erlang(1.0, 3),
                                                  WaitingTime::special_erlang(1.5, 3)});
  CHECK(laplace_consistency(erlang, 2.0) <= 1e-4);
}

TEST_CASE("self-looping states contribute no off-diagonal residual") {
  // Every jump returns to the same state: the off-diagonal semi-Markov
  // densities vanish identically and only the diagonal identity is probed.
  const SemiMarkovSpec spec(Eigen::MatrixXd::Identity(2, 2),
                            {WaitingTime::exponential(1.0), WaitingTime::special_erlang(2.0, 2)});
  CHECK(laplace_consistency(spec, 1.0) <= 1e-4);
}

TEST_CASE("spec validation") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 1.0, 0.4, 0.0;
  CHECK_THROWS_AS(SemiMarkovSpec(bad, {WaitingTime::exponential(1.0),
                                       WaitingTime::exponential(1.0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SemiMarkovSpec(symmetric_jumps(), {WaitingTime::exponential(1.0)}),
                  std::invalid_argument);
  Eigen::MatrixXd negative(2, 2);
  negative << 0.0, -1.0, 0.0, 2.0;
  CHECK_THROWS_AS(MarkovSpec{negative}, std::invalid_argument);
}
