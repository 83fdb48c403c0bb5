#include <doctest.h>

#include <cmath>
#include <random>

#include "vpme/error.hpp"
#include "vpme/kinetic_distance.hpp"
#include "vpme/stability.hpp"
#include "vpme/verify_suite.hpp"

using namespace vpme;

TEST_CASE("kinetic distance solves its fixed-point equation") {
  std::mt19937_64 rng(60);
  std::uniform_real_distribution<double> lp(-14.0, -2.0);
  for (int k = 0; k < 200; ++k) {
    const double P = std::exp(lp(rng)), V = std::exp(lp(rng)), eps = 0.1 + 0.9 * (k % 10) / 10.0;
    const auto s = solve_kinetic_distance(P, V, eps);
    REQUIRE(s.D > 0.0);
    REQUIRE(s.D < 1.0);
    const double G = std::abs(std::log(s.D)) * P / (eps * eps) + V - s.D;
    CHECK(std::abs(G) <= 1e-12 + 1e-9 * s.D);
    CHECK(s.D >= V);
    CHECK(s.lambda == doctest::Approx(std::abs(std::log(s.D)) / (eps * eps)));
  }
}

TEST_CASE("kinetic distance is monotone in both parts and zero at coincidence") {
  CHECK(solve_kinetic_distance(0.0, 0.0, 0.5).D == 0.0);
  const double a = solve_kinetic_distance(1e-6, 1e-6, 0.3).D;
  CHECK(solve_kinetic_distance(2e-6, 1e-6, 0.3).D > a);
  CHECK(solve_kinetic_distance(1e-6, 2e-6, 0.3).D > a);
  // Smaller ε weighs positions more heavily.
  CHECK(solve_kinetic_distance(1e-6, 1e-6, 0.1).D > a);
  std::mt19937_64 rng(61);
  const auto f = random_ensemble(1, 40, rng, 0.3, true);
  CHECK(kinetic_distance(f, f, identity_plan(f, f), 0.3).D == 0.0);
}

TEST_CASE("large separations have no root below one") {
  try {
    (void)solve_kinetic_distance(0.5, 2.0, 0.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoRoot);
  }
  CHECK_THROWS_AS((void)solve_kinetic_distance(-1.0, 0.0, 0.5), Error);
}

TEST_CASE("cumulative trapezoid integrals are exact for affine data") {
  const std::vector<double> t{0.0, 0.5, 1.5, 2.0}, a{1.0, 2.0, 4.0, 5.0};  // a = 1 + 2t
  const auto I = cumulative_integral(t, a);
  REQUIRE(I.size() == t.size());
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(I[k] == doctest::Approx(t[k] + t[k] * t[k]));
}

TEST_CASE("weak–strong right side and the 2D envelope follow their formulas") {
  CHECK(weak_strong_rhs(1e-3, 0.5, 0.0, 7.0) == doctest::Approx(4e-3));
  CHECK(weak_strong_rhs(1e-3, 0.5, 0.2, 5.0) == doctest::Approx(4e-3 * std::exp(1.0)));
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double w = 1e-4 + 1e-2 * u(rng), eps = 0.2 + 0.8 * u(rng);
    const double env = stability_envelope_2d(w, eps, u(rng), 3.0 * u(rng));
    CHECK(env >= 0.0);
    CHECK(env <= 2.0);
    // No elapsed time: the envelope is 2 exp(−L₀).
    CHECK(stability_envelope_2d(w, eps, 1.0, 0.0) ==
          doctest::Approx(2.0 * std::exp(-envelope_base_2d(w, eps))));
  }
  // The bracket grows monotonically with ∫A.
  double prev = 0.0;
  for (double I = 0.0; I < 10.0; I += 0.5) {
    const double e = stability_envelope_2d(1e-3, 0.5, 1.0, I);
    CHECK(e >= prev);
    prev = e;
  }
}
