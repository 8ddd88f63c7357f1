#include <benchmark/benchmark.h>

#include <complex>

#include "qsm/volterra.hpp"
#include "qsm/waiting_time.hpp"

using namespace qsm;
using complexd = std::complex<double>;

namespace {

// Scalar memory solve via the exponential-profile recurrence: O(N).
void SolveScalarExponential(benchmark::State& state) {
  VolterraKernel<complexd> kernel;
  kernel.grid = TimeGrid(1e-3, static_cast<std::size_t>(state.range(0)));
  kernel.exp_terms.push_back({ExpProfile{0.1875, 1.0}, complexd{-1.0, 0.0}});
  for (auto _ : state) {
    auto path = solve_volterra_ide(kernel, complexd{1.0, 0.0});
    benchmark::DoNotOptimize(path);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(SolveScalarExponential)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

// The same solve through the dense sampled path: O(N^2).
void SolveScalarDense(benchmark::State& state) {
  VolterraKernel<complexd> kernel;
  kernel.grid = TimeGrid(1e-3, static_cast<std::size_t>(state.range(0)));
  kernel.samples.resize(kernel.grid.size());
  for (std::size_t i = 0; i < kernel.grid.size(); ++i)
    kernel.samples[i] = -0.1875 * std::exp(-kernel.grid.time(i));
  for (auto _ : state) {
    auto path = solve_volterra_ide(kernel, complexd{1.0, 0.0});
    benchmark::DoNotOptimize(path);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(SolveScalarDense)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Complexity();

void Convolve(benchmark::State& state) {
  const TimeGrid grid(1e-3, static_cast<std::size_t>(state.range(0)));
  const auto a = SampledReal::tabulate(grid, [](double t) { return std::exp(-t); });
  const auto b = SampledReal::tabulate(grid, [](double t) { return std::exp(-2.0 * t); });
  for (auto _ : state) {
    auto c = convolve(a, b);
    benchmark::DoNotOptimize(c);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(Convolve)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Complexity();

void InvertMemory(benchmark::State& state) {
  const TimeGrid grid(1e-3, static_cast<std::size_t>(state.range(0)));
  const auto w = WaitingTime::special_erlang(1.0, 3);
  const auto f = SampledReal::tabulate(grid, [&](double t) { return w.density(t); });
  const auto g = SampledReal::tabulate(grid, [&](double t) { return w.survival(t); });
  for (auto _ : state) {
    auto k = invert_memory(f, g);
    benchmark::DoNotOptimize(k);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(InvertMemory)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Complexity();

}  // namespace
