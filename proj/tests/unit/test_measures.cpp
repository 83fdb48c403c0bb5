#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vpme/error.hpp"
#include "vpme/field.hpp"
#include "vpme/measures.hpp"
#include "vpme/verify_suite.hpp"

using namespace vpme;
using std::numbers::pi;

TEST_CASE("deposition conserves mass and stays nonnegative") {
  std::mt19937_64 rng(20);
  for (int d : {1, 2}) {
    for (int k = 0; k < 10; ++k) {
      const auto f = random_ensemble(d, 50 + 37 * k, rng, 1.0, k % 2 == 0);
      const auto rho = deposit_density(f, 16);
      CHECK(rho.rho.integral() == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(rho.rho.min() >= 0.0);
      CHECK(rho.mass == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("interpolation is the adjoint of deposition") {
  // Σ w_i g(x_i) = ∫ g ρ_h for CIC pairs.
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int d : {1, 2}) {
    const auto f = random_ensemble(d, 300, rng, 1.0, true);
    PeriodicGrid g(d, 16);
    for (double& v : g.values()) v = n(rng);
    double lhs = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) lhs += f.weights[i] * interpolate_cic(g, f.x(i));
    const auto rho = deposit_density(f, 16);
    double rhs = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rhs += g[i] * rho.rho[i] * g.cell_volume();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("interpolation reproduces linear data between nodes") {
  PeriodicGrid g(1, 16);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 3.0 * static_cast<double>(i);
  const double x[1] = {-0.5 + 2.25 / 16.0};
  CHECK(interpolate_cic(g, x) == doctest::Approx(3.0 * 2.25));
}

TEST_CASE("resolution must be a power of two") {
  auto f = ParticleEnsemble::with_equal_weights(1, 4, 1.0);
  try {
    (void)deposit_density(f, 12);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ResolutionNotPowerOfTwo);
  }
}

TEST_CASE("ensemble validation catches malformed data") {
  auto f = ParticleEnsemble::with_equal_weights(1, 10, 1.0);
  CHECK_NOTHROW(f.validate());
  f.weights[2] = 0.0;
  CHECK_THROWS_AS(f.validate(), Error);
  f = ParticleEnsemble::with_equal_weights(1, 10, 1.0);
  f.weights[0] *= 1.01;
  CHECK_THROWS_AS(f.validate(), Error);
  // Summation roundoff for large equal-weight ensembles is tolerated.
  CHECK_NOTHROW(ParticleEnsemble::with_equal_weights(1, 300'000, 1.0).validate());
}

TEST_CASE("kinetic energy and moments of a two-point ensemble") {
  auto f = ParticleEnsemble::with_equal_weights(1, 2, 0.5);
  f.velocities = {-2.0, 2.0};
  CHECK(moment(f, 3.0).value == doctest::Approx(1.0 + 8.0));
  CHECK(bare_moment(f, 2.0) == doctest::Approx(4.0));
  GridDensity rho = deposit_density(f, 16);
  const auto U = solve_poisson_boltzmann(rho, 0.5);
  const auto e = energy(f, U);
  CHECK(e.kinetic == doctest::Approx(2.0));
  CHECK(e.field() == doctest::Approx(field_energy(U).field()));
  CHECK(e.gradient >= 0.0);
}

TEST_CASE("moments grow with the order on |v| ≥ 1 and always exceed the mass") {
  std::mt19937_64 rng(22);
  for (int k = 0; k < 20; ++k) {
    const auto f = random_ensemble(2, 80, rng);
    CHECK(moment(f, 2.0).value >= 1.0);
    CHECK(moment(f, 4.0).value >= 1.0);
    // Jensen: (∫|v|²)^2 ≤ ∫|v|⁴ for a probability measure.
    CHECK(bare_moment(f, 2.0) * bare_moment(f, 2.0) <= bare_moment(f, 4.0) * (1 + 1e-12));
  }
}

TEST_CASE("analytic norm of 1 + a cos(2πx) is 1 + aδ") {
  // Roundoff in the unresolved modes is amplified by δ^|k|, so keep n small.
  PeriodicGrid g(1, 16);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 1.0 + 0.3 * std::cos(2.0 * pi * g.node_coord(i, 0));
  for (double delta : {1.25, 1.5, 2.0}) CHECK(analytic_norm(g, delta) == doctest::Approx(1.0 + 0.3 * delta).epsilon(1e-10));
}
