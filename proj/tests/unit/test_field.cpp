#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vpme/error.hpp"
#include "vpme/field.hpp"
#include "vpme/field_checks.hpp"
#include "vpme/verify_suite.hpp"

using namespace vpme;
using std::numbers::pi;

TEST_CASE("constant density gives the constant potential log c") {
  for (double c : {0.3, 1.0, 4.0}) {
    GridDensity rho{PeriodicGrid(1, 32, c), c};
    const auto U = solve_poisson_boltzmann(rho, 0.2, 1e-12);
    for (std::size_t i = 0; i < U.U.size(); ++i) CHECK(U.U[i] == doctest::Approx(std::log(c)).epsilon(1e-12));
  }
}

TEST_CASE("solutions meet the residual target and conserve mass through e^U") {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 20; ++k) {
    const int d = 1 + k % 2;
    const auto rho = random_smooth_density(d, d == 1 ? 64 : 32, rng, 1.5);
    const double eps = 0.1 + 0.09 * k / 2.0;
    const auto U = solve_poisson_boltzmann(rho, eps, 1e-11);
    CHECK(U.residual_norm <= 1e-11);
    CHECK(pb_residual(U.U, rho.rho, eps) == doctest::Approx(U.residual_norm).scale(1e-11));
    // Integrating the equation over the torus: ∫e^U = ∫ρ.
    PeriodicGrid e = U.U;
    for (double& v : e.values()) v = std::exp(v);
    CHECK(e.integral() == doctest::Approx(rho.rho.integral()).epsilon(1e-10));
    // Maximum principle: U lies between the logs of the density extremes.
    CHECK(U.U.max() <= std::log(rho.rho.max()) + 1e-10);
    CHECK(U.U.min() >= std::log(rho.rho.min()) - 1e-10);
  }
}

TEST_CASE("small perturbations follow the linearised response") {
  // ε²U″ = U − δcos(2πkx) to first order, so U ≈ δcos/(1 + 4π²k²ε²).
  const double delta = 1e-5;
  for (int mode : {1, 3}) {
    for (double eps : {1.0, 0.3}) {
      GridDensity rho{PeriodicGrid(1, 128), 1.0};
      for (std::size_t i = 0; i < rho.rho.size(); ++i)
        rho.rho[i] = 1.0 + delta * std::cos(2.0 * pi * mode * rho.rho.node_coord(i, 0));
      const auto U = solve_poisson_boltzmann(rho, eps, 1e-13);
      const double amp = delta / (1.0 + 4.0 * pi * pi * mode * mode * eps * eps);
      for (std::size_t i = 0; i < U.U.size(); ++i)
        CHECK(std::abs(U.U[i] - amp * std::cos(2.0 * pi * mode * U.U.node_coord(i, 0))) <= 10.0 * delta * delta);
    }
  }
}

TEST_CASE("invalid inputs are rejected with stable codes") {
  GridDensity rho{PeriodicGrid(1, 16, 1.0), 1.0};
  rho.rho[3] = -0.5;
  try {
    (void)solve_poisson_boltzmann(rho, 0.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeDensity);
  }
  rho.rho[3] = 1.0;
  CHECK_THROWS_AS((void)solve_poisson_boltzmann(rho, 0.0), Error);
}

TEST_CASE("the 1D splitting reassembles the full potential") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 5; ++k) {
    const auto rho = random_smooth_density(1, 128, rng, 1.0);
    const double eps = 0.5 - 0.08 * k;
    const auto split = split_field_1d(rho, eps, 1e-12);
    const auto U = solve_poisson_boltzmann(rho, eps, 1e-12);
    const auto sum = split.U();
    // Equal up to the additive constant fixed by the Ū normalisation.
    const double shift = sum[0] - U.U[0];
    for (std::size_t i = 0; i < sum.size(); ++i) CHECK(sum[i] - shift == doctest::Approx(U.U[i]).scale(1.0).epsilon(1e-9));
    CHECK(std::abs(shift) < 1e-9);
    CHECK(split.U_bar.integral() == doctest::Approx(0.0).scale(1.0));
  }
}

TEST_CASE("the periodic Green function has the unit jump and the −1 background") {
  for (double y : {0.1, 0.25, 0.4}) {
    const double h = 1e-5;
    const double second = (green_1d(y + h) - 2.0 * green_1d(y) + green_1d(y - h)) / (h * h);
    CHECK(second == doctest::Approx(1.0).epsilon(1e-4));  // −G″ = −1 away from 0
    CHECK(green_1d(y) == doctest::Approx(green_1d(-y)));
  }
  CHECK(green_1d_derivative(1e-12) - green_1d_derivative(-1e-12) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(green_1d_derivative(0.0) == 0.0);
}

TEST_CASE("singular field matches the grid field of a smooth sample") {
  // Equal-weight particles on a lattice: Ē vanishes between symmetric neighbours.
  auto f = ParticleEnsemble::with_equal_weights(1, 64, 0.5);
  for (std::size_t i = 0; i < 64; ++i) f.positions[i] = -0.5 + (static_cast<double>(i) + 0.5) / 64.0;
  CHECK(std::abs(singular_field_at(f, -0.5, 0.5)) < 1e-12);
  CHECK(std::abs(singular_field_at(f, 0.0, 0.5)) < 1e-12);
}

TEST_CASE("field checks report both sides of their inequalities") {
  std::mt19937_64 rng(12);
  const auto r1 = random_smooth_density(2, 16, rng, 1.0), r2 = random_smooth_density(2, 16, rng, 1.0);
  const auto s = verify_field_stability(r1, r2, 0.7);
  CHECK(s.l2_holds);
  CHECK(s.lhs <= s.l2_rhs * (1 + 1e-6));
  CHECK(s.l2_rhs == doctest::Approx(s.h_minus1 / 0.49));
  CHECK(s.quantization_points > 0);
  const auto same = verify_field_stability(r1, r1, 0.7);
  CHECK(same.lhs == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("quantization preserves mass") {
  std::mt19937_64 rng(13);
  const auto rho = random_smooth_density(2, 32, rng, 1.0);
  const auto q = quantize_density(rho, 8);
  double m = 0.0;
  for (double w : q.weights) m += w;
  CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.size() <= 64);
}

TEST_CASE("log-Lipschitz modulus is finite and positive for a nontrivial field") {
  std::mt19937_64 rng(14);
  const auto rho = random_smooth_density(2, 32, rng, 1.0);
  const auto U = solve_poisson_boltzmann(rho, 0.5);
  const auto r = field_log_lipschitz_modulus(U, rho.rho.max());
  CHECK(r.modulus > 0.0);
  CHECK(std::isfinite(r.fitted_c));
  CHECK(r.pairs > 0);
}
