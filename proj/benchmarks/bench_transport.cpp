#include <benchmark/benchmark.h>

#include <random>

#include "vpme/network_simplex.hpp"
#include "vpme/ot.hpp"
#include "vpme/sinkhorn.hpp"
#include "vpme/verify_suite.hpp"

using namespace vpme;

namespace {

std::vector<double> uniform_cost(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(n * n);
  for (double& x : c) x = u(rng);
  return c;
}

}  // namespace

static void BM_NetworkSimplex(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  const auto c = uniform_cost(n, rng);
  const std::vector<double> w(n, 1.0 / static_cast<double>(n));
  for (auto _ : state) benchmark::DoNotOptimize(network_simplex(w, w, c));
}
BENCHMARK(BM_NetworkSimplex)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

// Random matrices are the near-degenerate case: most levels need Newton steps.
static void BM_SinkhornUniform(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(7);
  const auto c = uniform_cost(n, rng);
  const std::vector<double> w(n, 1.0 / static_cast<double>(n));
  for (auto _ : state) benchmark::DoNotOptimize(sinkhorn(w, w, c));
}
BENCHMARK(BM_SinkhornUniform)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_SinkhornPhaseSpace(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  const auto a = random_ensemble(2, n, rng), b = random_ensemble(2, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein(a, b, 2, OtMethod::Entropic));
}
BENCHMARK(BM_SinkhornPhaseSpace)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_PhaseSpaceW2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(4);
  const auto a = random_ensemble(2, n, rng), b = random_ensemble(2, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein(a, b, 2));
}
BENCHMARK(BM_PhaseSpaceW2)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
