#include <benchmark/benchmark.h>

#include <random>

#include "vpme/dynamics.hpp"
#include "vpme/verify_suite.hpp"

using namespace vpme;

static void BM_Deposit(benchmark::State& state) {
  const auto scheme = static_cast<ForceScheme>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  std::mt19937_64 rng(5);
  const auto f = random_ensemble(d, 100'000, rng, 0.5, true);
  for (auto _ : state) benchmark::DoNotOptimize(deposit_for(f, d == 1 ? 256 : 64, scheme));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}
BENCHMARK(BM_Deposit)
    ->ArgsProduct({{static_cast<int>(ForceScheme::Spectral), static_cast<int>(ForceScheme::CubicSpline)}, {1, 2}});

static void BM_LeapfrogStep(benchmark::State& state) {
  std::mt19937_64 rng(6);
  const auto f = random_ensemble(1, static_cast<std::size_t>(state.range(0)), rng, 0.5, true);
  SimParams p;
  p.epsilon = 0.5;
  p.dt = 0.01;
  p.t_end = 0.01;
  p.force = ForceScheme::CubicSpline;
  for (auto _ : state) benchmark::DoNotOptimize(step(f, p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LeapfrogStep)->Arg(10'000)->Arg(100'000);
