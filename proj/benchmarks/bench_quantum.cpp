#include <benchmark/benchmark.h>

#include "qsm/classical.hpp"
#include "qsm/quantum.hpp"

using namespace qsm;

namespace {

Eigen::MatrixXd symmetric_jumps() {
  Eigen::MatrixXd pi(2, 2);
  pi << 0.0, 1.0, 1.0, 0.0;
  return pi;
}

QuantumKernelSpec two_level_spec() {
  return QuantumKernelSpec::lattice(symmetric_jumps(),
                                    {MemoryFunction::exponential_decay(0.1875, 1.0),
                                     MemoryFunction::exponential_decay(0.12, 1.0)});
}

void BuildPropagator(benchmark::State& state) {
  const auto spec = two_level_spec();
  const TimeGrid grid(1e-3, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto prop = build_propagator(spec, grid);
    benchmark::DoNotOptimize(prop);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BuildPropagator)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

void LatticeCpCheck(benchmark::State& state) {
  const auto spec = two_level_spec();
  const TimeGrid grid(1e-3, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto slice = check_lattice_cp(spec, grid);
    benchmark::DoNotOptimize(slice);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(LatticeCpCheck)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Complexity();

void MonteCarlo(benchmark::State& state) {
  const SemiMarkovSpec spec(symmetric_jumps(), {WaitingTime::special_erlang(1.0, 3),
                                                WaitingTime::special_erlang(1.5, 3)});
  const std::vector<double> times = {2.0, 4.0, 6.0, 8.0, 10.0};
  for (auto _ : state) {
    auto estimate = simulate_trajectories(spec, 0, times,
                                          static_cast<std::size_t>(state.range(0)), 1);
    benchmark::DoNotOptimize(estimate);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(MonteCarlo)->RangeMultiplier(4)->Range(1 << 12, 1 << 16)->Complexity();

}  // namespace

BENCHMARK_MAIN();
