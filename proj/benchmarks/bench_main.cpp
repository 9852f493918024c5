#include <benchmark/benchmark.h>

#include "srblab/entropy.hpp"
#include "srblab/induced_map.hpp"
#include "srblab/spread.hpp"
#include "srblab/tail.hpp"
#include "srblab/ulam.hpp"

using namespace srblab;

static void BM_FirstReturnQuadratic(benchmark::State& state) {
  const MapSystem q = MapSystem::quadratic(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(first_return_map(q, {-1.0, 1.0}, state.range(0)));
}
BENCHMARK(BM_FirstReturnQuadratic)->Arg(8)->Arg(14)->Unit(benchmark::kMillisecond);

static void BM_FirstReturnPerturbedCircle(benchmark::State& state) {
  const MapSystem m = MapSystem::perturbed_circle(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(first_return_map(m, {0.0, 0.5}, state.range(0)));
}
BENCHMARK(BM_FirstReturnPerturbedCircle)->Arg(12)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_UlamTower(benchmark::State& state) {
  const InducedMarkovMap F = first_return_map(MapSystem::perturbed_circle(0.1), {0.0, 0.5}, 20);
  for (auto _ : state) benchmark::DoNotOptimize(ulam_matrix(F, state.range(0)));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_UlamTower)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_UlamOneStep(benchmark::State& state) {
  const MapSystem q = MapSystem::quadratic(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(ulam_matrix(q, state.range(0)));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_UlamOneStep)->RangeMultiplier(4)->Range(1 << 10, 1 << 20)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_UlamViana(benchmark::State& state) {
  const MapSystem v = MapSystem::viana();
  for (auto _ : state) benchmark::DoNotOptimize(ulam_matrix(v, state.range(0), state.range(0)));
}
BENCHMARK(BM_UlamViana)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_StationaryOneStep(benchmark::State& state) {
  const UlamMatrix U = ulam_matrix(MapSystem::quadratic(2.0), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stationary_density(U));
}
BENCHMARK(BM_StationaryOneStep)->Arg(1 << 12)->Arg(1 << 14)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

static void BM_StationaryTowerCesaro(benchmark::State& state) {
  const UlamMatrix U = ulam_matrix(first_return_map(MapSystem::perturbed_circle(0.1), {0.0, 0.5}, 20), 4096);
  for (auto _ : state) benchmark::DoNotOptimize(stationary_density(U, SolveMode::cesaro, 1e-10));
}
BENCHMARK(BM_StationaryTowerCesaro)->Unit(benchmark::kMillisecond);

static void BM_SpreadMeasure(benchmark::State& state) {
  const InducedMarkovMap F = first_return_map(MapSystem::perturbed_circle(0.1), {0.0, 0.5}, 20);
  const GridDensity mu = stationary_density(ulam_matrix(F, 4096));
  for (auto _ : state) benchmark::DoNotOptimize(spread_measure(F, mu, state.range(0), 20));
}
BENCHMARK(BM_SpreadMeasure)->Arg(1 << 12)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

static void BM_TailProfileViana(benchmark::State& state) {
  const MapSystem v = MapSystem::viana();
  TailParams p{0.3, 0.05, 0.1, 200, static_cast<std::size_t>(state.range(0)), 1};
  for (auto _ : state) benchmark::DoNotOptimize(tail_profile(v, p));
}
BENCHMARK(BM_TailProfileViana)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_LyapunovQuadratic(benchmark::State& state) {
  const MapSystem q = MapSystem::quadratic(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(entropy_lyapunov(q, 16, state.range(0), 1));
}
BENCHMARK(BM_LyapunovQuadratic)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
