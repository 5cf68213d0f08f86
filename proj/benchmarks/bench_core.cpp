#include <benchmark/benchmark.h>

#include "nonmarkov/greens.hpp"
#include "nonmarkov/numerics.hpp"

using namespace nonmarkov;

namespace {

const bath::BathParams kParams = bath::BathParams::from_critical_ratio(1.5, 5.0, 2.0);

void BM_SolveUIde(benchmark::State& state) {
  const auto grid = greens::TimeGrid::covering(0.01, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(greens::solve_u_ide(grid, kParams));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(grid.n_steps));
}
BENCHMARK(BM_SolveUIde)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond)->Complexity();

void BM_VDiagonal(benchmark::State& state) {
  const auto grid = greens::TimeGrid::covering(0.01, static_cast<double>(state.range(0)));
  const auto u = greens::solve_u_ide(grid, kParams);
  const greens::FluctuationCorrelator corr(u, kParams);
  for (auto _ : state) benchmark::DoNotOptimize(corr.diagonal());
}
BENCHMARK(BM_VDiagonal)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_VRow(benchmark::State& state) {
  const auto grid = greens::TimeGrid::covering(0.01, 60.0);
  const auto u = greens::solve_u_ide(grid, kParams);
  const greens::FluctuationCorrelator corr(u, kParams);
  const auto i = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(corr.row(i, i, i + 3000));
}
BENCHMARK(BM_VRow)->Arg(100)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_USpectral(benchmark::State& state) {
  const auto q = greens::spectral_quadrature();
  for (auto _ : state) benchmark::DoNotOptimize(greens::u_spectral(10.0, kParams, q));
}
BENCHMARK(BM_USpectral)->Unit(benchmark::kMicrosecond);

void BM_ExponentialIntegral(benchmark::State& state) {
  double x = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerics::exponential_integral(x));
    x = x < 40.0 ? x * 1.1 : 0.05;
  }
}
BENCHMARK(BM_ExponentialIntegral);

}  // namespace

BENCHMARK_MAIN();
