#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "heatsum/oracle.hpp"
#include "heatsum/solver.hpp"

namespace {

using namespace heatsum;
using namespace heatsum::oracle;

ArrowheadSystem make_system(int k, int n) {
  std::vector<ArrowheadSystem::Chain> chains;
  for (int c = 0; c < k; ++c) {
    ArrowheadSystem::Chain ch;
    ch.lower.assign(n, -0.45);
    ch.diag.assign(n, 2.1);
    ch.upper.assign(n, -0.5);
    ch.lower[0] = 0.0;
    ch.upper[n - 1] = 0.0;
    ch.hub_col = -0.2;
    ch.hub_row = -0.25;
    chains.push_back(std::move(ch));
  }
  return ArrowheadSystem(std::move(chains), 3.0);
}

// Direct elimination should scale linearly with the unknown count.
void BM_ArrowheadSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto sys = make_system(3, n);
  sys.factor();
  std::vector<double> rhs(sys.size(), 0.0);
  rhs[0] = 1.0;
  for (auto _ : state) {
    auto x = sys.solve(rhs);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetComplexityN(sys.size());
}
BENCHMARK(BM_ArrowheadSolve)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oN);

void BM_FactorAndSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> rhs;
  for (auto _ : state) {
    auto sys = make_system(3, n);
    sys.factor();
    rhs.assign(sys.size(), 1.0);
    auto x = sys.solve(rhs);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetComplexityN(3 * n + 1);
}
BENCHMARK(BM_FactorAndSolve)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity(benchmark::oN);

void BM_HeatKernelStep(benchmark::State& state) {
  auto sum = geometry::SumSpec::make(
      {geometry::EndSpec::power_law(0, 1.0), geometry::EndSpec::power_law(1, 2.0)});
  // uniform spacing keeps the cell width sane across the whole size range
  auto grid = build_grid(sum, {450.0, static_cast<int>(state.range(0)), 1.0, 1e4});
  std::vector<double> times = {20.0};
  for (auto _ : state) {
    auto series = heat_kernel(grid, grid.center_index(), times);
    benchmark::DoNotOptimize(series.density.data());
  }
  state.SetComplexityN(grid.size());
}
BENCHMARK(BM_HeatKernelStep)->Arg(1000)->Arg(4000)->Arg(16000)->Complexity(benchmark::oN);

void BM_ResolventSample(benchmark::State& state) {
  auto sum = geometry::SumSpec::make(
      {geometry::EndSpec::power_law(0, 1.0), geometry::EndSpec::power_law(1, 2.0)});
  auto grid = build_grid(sum, {450.0, static_cast<int>(state.range(0)), 1.0, 1e4});
  for (auto _ : state) {
    auto samples = resolvent(grid, {1e-3}, 10.0);
    benchmark::DoNotOptimize(samples.data());
  }
  state.SetComplexityN(grid.size());
}
BENCHMARK(BM_ResolventSample)->Arg(1000)->Arg(4000)->Arg(16000)->Complexity(benchmark::oN);

}  // namespace

BENCHMARK_MAIN();
