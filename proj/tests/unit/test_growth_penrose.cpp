#include <doctest.h>

#include <cmath>
#include <random>

#include "vpme/growth.hpp"
#include "vpme/penrose.hpp"

using namespace vpme;

TEST_CASE("b is increasing and the inverse bound overshoots") {
  double prev = 0.0;
  for (double y = 1e-6; y < 1e8; y *= 1.37) {
    const double b = b_function(y);
    CHECK(b > prev);
    CHECK(b <= y);
    prev = b;
  }
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> lu(-12.0, 12.0);
  for (int k = 0; k < 5000; ++k) {
    const double u = std::exp(lu(rng));
    CHECK(b_function(b_inverse_bound(u)) >= u);
  }
  const auto r = verify_inverse_bound(20'000);
  CHECK(r.failures == 0);
  CHECK(r.worst_ratio >= 1.0);
}

TEST_CASE("density ratio series is relative to its initial value") {
  RunRecord rec;
  rec.dim = 2;
  const double rho[] = {2.0, 4.0, 9.0}, q[] = {0.0, 1.0, 1.0};
  for (int k = 0; k < 3; ++k) {
    Checkpoint c;
    c.time = k;
    c.rho_sup = rho[k];
    c.q_star = q[k];
    rec.checkpoints.push_back(c);
  }
  const auto s = density_bound_series(rec, 2.0);
  CHECK(s.initial_ratio == doctest::Approx(2.0));
  CHECK(s.ratios[1] == doctest::Approx(2.0));
  CHECK(s.worst_ratio == doctest::Approx(9.0 / 2.0 / 2.0));
  CHECK(s.holds == false);
  CHECK(density_bound_series(rec, 2.5).holds);
}

TEST_CASE("growth envelope is monotone in t and decreasing in ε") {
  double prev = growth_envelope_2d(0.0, 0.3);
  CHECK(prev == 1.0);
  for (double t = 0.01; t < 10.0; t *= 1.5) {
    const double e = growth_envelope_2d(t, 0.3);
    CHECK(e > prev);
    CHECK(growth_envelope_2d(t, 0.6) < e);
    prev = e;
  }
}

TEST_CASE("the Penrose functional is 1 at a vanishing wavenumber horizon and nonnegative") {
  const auto m = maxwellian_profile(1.0);
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> g(0.05, 2.0), t(-4.0, 4.0), x(0.25, 4.0);
  for (int k = 0; k < 50; ++k) CHECK(penrose_functional(m, x(rng), g(rng), t(rng)) >= 0.0);
  // A flat profile has g0′ = 0, so the integral vanishes.
  const auto flat = VelocityProfile::sample([](double) { return 1.0 / 16.0; }, 8.0, 256);
  CHECK(penrose_functional(flat, 1.0, 0.5, 0.3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a Maxwellian is further from instability than two cold beams") {
  PenroseGrid grid = PenroseGrid::standard();
  const auto m = penrose_sweep(maxwellian_profile(1.0), grid);
  const auto db = penrose_sweep(double_bump_profile(2.0, 0.3), grid);
  CHECK(m.infimum > db.infimum);
  CHECK(m.infimum > 0.5);
  CHECK(m.evaluations == grid.gamma.size() * grid.tau.size() * grid.xi.size());
  CHECK(std::isfinite(m.lipschitz));
}

TEST_CASE("velocity profiles carry unit mass") {
  for (const auto& p : {maxwellian_profile(0.7), double_bump_profile(1.5, 0.4)}) {
    double s = 0.0;
    for (double v : p.g) s += v * p.dv;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-8));
  }
}
