#include <benchmark/benchmark.h>

#include <random>

#include "vpme/field.hpp"
#include "vpme/verify_suite.hpp"

using namespace vpme;

static void BM_PoissonBoltzmann(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0)), n = static_cast<int>(state.range(1));
  std::mt19937_64 rng(1);
  const auto rho = random_smooth_density(d, n, rng, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_poisson_boltzmann(rho, 0.2, 1e-10));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rho.rho.size()));
}
BENCHMARK(BM_PoissonBoltzmann)->Args({1, 256})->Args({1, 4096})->Args({2, 64})->Args({2, 256});
