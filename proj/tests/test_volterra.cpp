#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "qsm/volterra.hpp"
#include "qsm/waiting_time.hpp"

using namespace qsm;
using complexd = std::complex<double>;

namespace {

// Damped-mode closed form e^{-gamma t/2} [cosh(d t/2) + (gamma/d) sinh(d t/2)]
// with d = sqrt(gamma^2 - 4 kappa); the solution of dx/dt = -kappa
// int_0^t e^{-gamma tau} x(t-tau) dtau with x(0) = 1.  Written here directly
// from the real closed form (the tested parameters keep d real).
double damped_mode(double gamma, double kappa, double t) {
  const double d = std::sqrt(gamma * gamma - 4.0 * kappa);
  return std::exp(-0.5 * gamma * t) *
         (std::cosh(0.5 * d * t) + gamma / d * std::sinh(0.5 * d * t));
}

double solve_exponential_kernel_error(double h, double horizon, double gamma, double kappa) {
  VolterraKernel<complexd> kernel;
  kernel.grid = TimeGrid::from_horizon(h, horizon);
  kernel.local = 0.0;
  kernel.exp_terms.push_back({ExpProfile{kappa, gamma}, complexd{-1.0, 0.0}});
  const auto path = solve_volterra_ide(kernel, complexd{1.0, 0.0});
  double worst = 0.0;
  for (std::size_t i = 0; i < kernel.grid.size(); ++i) {
    const double expect = damped_mode(gamma, kappa, kernel.grid.time(i));
    worst = std::max(worst, std::abs(path[i] - expect));
  }
  return worst;
}

}  // namespace

TEST_CASE("convolution of constants is exact") {
  const TimeGrid grid(0.1, 50);
  const auto one = SampledReal::tabulate(grid, [](double) { return 1.0; });
  const auto conv = convolve(one, one);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(conv.values[i] == doctest::Approx(grid.time(i)).epsilon(1e-14));
}

TEST_CASE("point mass acts as the identity under convolution") {
  const TimeGrid grid(0.05, 40);
  SampledReal delta(grid);
  delta.delta_weight = 2.5;
  const auto b = SampledReal::tabulate(grid, [](double t) { return std::cos(t); });
  const auto conv = convolve(delta, b);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(conv.values[i] == doctest::Approx(2.5 * std::cos(grid.time(i))).epsilon(1e-14));
}

TEST_CASE("convolution of two exponentials") {
  const auto grid = TimeGrid::from_horizon(1e-3, 2.0);
  const auto a = SampledReal::tabulate(grid, [](double t) { return std::exp(-t); });
  const auto b = SampledReal::tabulate(grid, [](double t) { return std::exp(-2.0 * t); });
  const auto conv = convolve(a, b);
  const std::size_t i1 = 1000;  // t = 1
  REQUIRE(grid.time(i1) == doctest::Approx(1.0));
  // analytic integral e^{-1} - e^{-2}; quadrature oracle agrees
  const double symbolic = std::exp(-1.0) - std::exp(-2.0);
  const double quadrature =
      oracles::integrate([](double s) { return std::exp(-s) * std::exp(-2.0 * (1.0 - s)); }, 0.0, 1.0);
  CHECK(symbolic == doctest::Approx(quadrature).epsilon(1e-12));
  CHECK(conv.values[i1] == doctest::Approx(symbolic).epsilon(1e-6));
}

TEST_CASE("convolution rejects mismatched grids") {
  SampledReal a(TimeGrid(0.1, 10)), b(TimeGrid(0.1, 11));
  CHECK_THROWS_AS((void)convolve(a, b), std::invalid_argument);
}

TEST_CASE("pure point-mass kernel propagates exactly") {
  VolterraKernel<complexd> kernel;
  kernel.grid = TimeGrid::from_horizon(1e-3, 5.0);
  kernel.local = -1.0;
  const auto path = solve_volterra_ide(kernel, complexd{1.0, 0.0});
  for (std::size_t i = 0; i < kernel.grid.size(); i += 97)
    CHECK(std::abs(path[i] - std::exp(-kernel.grid.time(i))) < 1e-12);
}

TEST_CASE("exponential memory kernel reproduces the damped-mode closed form") {
  // gamma = 1, kappa = 0.1875 so the splitting is exactly 1/2
  const double worst = solve_exponential_kernel_error(1e-3, 10.0, 1.0, 0.1875);
  CHECK(worst <= 1e-6);
}

TEST_CASE("zero kernel freezes the state") {
  VolterraKernel<complexd> kernel;
  kernel.grid = TimeGrid(1e-2, 300);
  kernel.local = 0.0;
  kernel.samples.assign(kernel.grid.size(), complexd{0.0, 0.0});
  const auto path = solve_volterra_ide(kernel, complexd{0.7, 0.1});
  for (const auto& x : path) CHECK(std::abs(x - complexd{0.7, 0.1}) < 1e-15);
}

TEST_CASE("separable fast path agrees with the dense path") {
  const auto grid = TimeGrid::from_horizon(2e-3, 6.0);
  VolterraKernel<complexd> fast;
  fast.grid = grid;
  fast.local = complexd{-0.15, 0.0};
  fast.exp_terms.push_back({ExpProfile{0.21, 1.4}, complexd{-1.0, 0.0}});
  fast.exp_terms.push_back({ExpProfile{0.05, 0.3}, complexd{0.0, -1.0}});

  VolterraKernel<complexd> dense;
  dense.grid = grid;
  dense.local = fast.local;
  dense.samples.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i);
    dense.samples[i] =
        complexd{-1.0, 0.0} * (0.21 * std::exp(-1.4 * t)) + complexd{0.0, -1.0} * (0.05 * std::exp(-0.3 * t));
  }
  const auto a = solve_volterra_ide(fast, complexd{1.0, 0.0});
  const auto b = solve_volterra_ide(dense, complexd{1.0, 0.0});
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-10);
}

TEST_CASE("halving the step reduces the solver error by at least 3.5x") {
  const double coarse = solve_exponential_kernel_error(2e-3, 10.0, 1.0, 0.1875);
  const double fine = solve_exponential_kernel_error(1e-3, 10.0, 1.0, 0.1875);
  CHECK(coarse / fine >= 3.5);
}

TEST_CASE("matrix-valued solve matches decoupled scalar solves") {
  const auto grid = TimeGrid::from_horizon(2e-3, 4.0);
  VolterraKernel<Eigen::Matrix2d> kernel;
  kernel.grid = grid;
  kernel.local = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d m0 = Eigen::Matrix2d::Zero(), m1 = Eigen::Matrix2d::Zero();
  m0(0, 0) = -1.0;
  m1(1, 1) = -1.0;
  kernel.exp_terms.push_back({ExpProfile{0.1875, 1.0}, m0});
  kernel.exp_terms.push_back({ExpProfile{0.12, 1.0}, m1});
  const auto path = solve_volterra_ide(kernel, Eigen::Matrix2d(Eigen::Matrix2d::Identity()));
  for (std::size_t i = 0; i < grid.size(); i += 53) {
    CHECK(path[i](0, 0) == doctest::Approx(damped_mode(1.0, 0.1875, grid.time(i))).epsilon(5e-6));
    CHECK(path[i](1, 1) == doctest::Approx(damped_mode(1.0, 0.12, grid.time(i))).epsilon(5e-6));
    CHECK(path[i](0, 1) == doctest::Approx(0.0).scale(1.0));
  }
}

TEST_CASE("memory inversion recovers the three-stage kernel") {
  const auto grid = TimeGrid::from_horizon(1e-3, 10.0);
  const auto w = WaitingTime::special_erlang(1.0, 3);
  const auto f = SampledReal::tabulate(grid, [&](double t) { return w.density(t); });
  const auto g = SampledReal::tabulate(grid, [&](double t) { return w.survival(t); });
  const auto k = invert_memory(f, g);
  CHECK(k.delta_weight == 0.0);
  double worst = 0.0;
  double min_in_window = 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i);
    const double expect =
        2.0 / std::sqrt(3.0) * std::sin(0.5 * std::sqrt(3.0) * t) * std::exp(-1.5 * t);
    worst = std::max(worst, std::abs(k.values[i] - expect));
    if (t > 3.6 && t < 4.0) min_in_window = std::min(min_in_window, k.values[i]);
  }
  CHECK(worst <= 1e-5);
  CHECK(min_in_window < 0.0);
}

TEST_CASE("memory inversion confirms the oscillatory closed form at a different rate") {
  // Cross-check of the sin(sqrt(3) * rate * t / 2) reading at rate != 1.
  const double rate = 1.7;
  const auto grid = TimeGrid::from_horizon(1e-3, 8.0);
  const auto w = WaitingTime::special_erlang(rate, 3);
  const auto f = SampledReal::tabulate(grid, [&](double t) { return w.density(t); });
  const auto g = SampledReal::tabulate(grid, [&](double t) { return w.survival(t); });
  const auto numeric = invert_memory(f, g);
  const auto closed = w.memory_function();
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(numeric.values[i] - closed.regular(grid.time(i))));
  CHECK(worst <= 1e-5);
}

TEST_CASE("memory inversion extracts the point mass of an exponential") {
  const auto grid = TimeGrid::from_horizon(1e-3, 12.0);
  const auto w = WaitingTime::exponential(2.0);
  const auto f = SampledReal::tabulate(grid, [&](double t) { return w.density(t); });
  const auto g = SampledReal::tabulate(grid, [&](double t) { return w.survival(t); });
  const auto k = invert_memory(f, g);
  CHECK(k.delta_weight == doctest::Approx(2.0).epsilon(1e-12));
  for (std::size_t i = 0; i < grid.size(); i += 211) CHECK(std::abs(k.values[i]) < 1e-9);
}

TEST_CASE("memory inversion matches the mixture closed form") {
  const auto grid = TimeGrid::from_horizon(1e-3, 10.0);
  const auto w = WaitingTime::multi_exponential({0.5, 0.5}, {1.0, 3.0});
  const auto f = SampledReal::tabulate(grid, [&](double t) { return w.density(t); });
  const auto g = SampledReal::tabulate(grid, [&](double t) { return w.survival(t); });
  const auto k = invert_memory(f, g);
  CHECK(k.delta_weight == doctest::Approx(2.0).epsilon(1e-10));
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(k.values[i] + std::exp(-2.0 * grid.time(i))));
  CHECK(worst <= 1e-5);
}

TEST_CASE("memory inversion requires g(0) != 0") {
  const TimeGrid grid(1e-2, 10);
  SampledReal f(grid), g(grid);
  CHECK_THROWS_AS((void)invert_memory(f, g), std::invalid_argument);
}

TEST_CASE("inversion round-trips a forward convolution") {
  const auto grid = TimeGrid::from_horizon(1e-3, 8.0);
  const auto w = WaitingTime::generalized_erlang({1.0, 2.0});
  const auto k = w.memory_function().sample(grid);
  const auto g = SampledReal::tabulate(grid, [&](double t) { return w.survival(t); });
  const auto f = convolve(k, g);
  const auto back = invert_memory(f, g);
  CHECK(back.delta_weight == 0.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(back.values[i] - k.values[i]));
  // limited by the one-sided seeding of k(0): error ~3.5 h^2 for this kernel
  CHECK(worst <= 5e-6);
}

TEST_CASE("laplace probe of an exponential") {
  const auto grid = TimeGrid::from_horizon(1e-3, 30.0);
  const auto x = SampledReal::tabulate(grid, [](double t) { return std::exp(-t); });
  const auto probe = laplace_probe(x, 1.0);
  CHECK(probe.horizon_ok);
  CHECK(probe.value == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("laplace probe flags an insufficient horizon") {
  const auto grid = TimeGrid::from_horizon(1e-2, 2.0);
  const auto x = SampledReal::tabulate(grid, [](double t) { return std::exp(-t); });
  CHECK_FALSE(laplace_probe(x, 1.0).horizon_ok);
}

TEST_CASE("laplace transforms of waiting-time densities") {
  const auto grid = TimeGrid::from_horizon(1e-3, 40.0);
  for (double rate : {1.0, 2.5}) {
    const auto w = WaitingTime::exponential(rate);
    const auto f = SampledReal::tabulate(grid, [&](double t) { return w.density(t); });
    CHECK(laplace_probe(f, 1.0).value == doctest::Approx(rate / (1.0 + rate)).epsilon(1e-5));
  }
  const auto w3 = WaitingTime::special_erlang(1.0, 3);
  const auto f3 = SampledReal::tabulate(grid, [&](double t) { return w3.density(t); });
  CHECK(laplace_probe(f3, 2.0).value == doctest::Approx(1.0 / 27.0).epsilon(1e-5));
}

TEST_CASE("laplace identity ties kernel, density and survival for every kind") {
  const std::vector<WaitingTime> kinds = {
      WaitingTime::exponential(2.0),          WaitingTime::special_erlang(1.0, 2),
      WaitingTime::special_erlang(1.3, 3),    WaitingTime::generalized_erlang({1.0, 2.0}),
      WaitingTime::generalized_erlang({0.8, 1.7, 2.9}),
      WaitingTime::multi_exponential({0.5, 0.5}, {1.0, 3.0})};
  for (const auto& w : kinds) {
    const double horizon = std::max(30.0, w.horizon_for(1e-12));
    const auto grid = TimeGrid::from_horizon(1e-3, horizon);
    const auto f = SampledReal::tabulate(grid, [&](double t) { return w.density(t); });
    const auto k = w.memory_function().sample(grid);
    for (double u : {1.0, 2.0, 5.0}) {
      const double f_hat = laplace_probe(f, u).value;
      const double k_hat = laplace_probe(k, u).value;
      INFO(w.kind_name() << " u=" << u);
      CHECK(std::abs(k_hat - u * f_hat / (1.0 - f_hat)) < 1e-4);
    }
  }
}
