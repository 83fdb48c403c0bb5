#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vpme/error.hpp"
#include "vpme/geometry.hpp"
#include "vpme/grid.hpp"

using namespace vpme;
using std::numbers::pi;

TEST_CASE("wrap_coord lands in the canonical box and differs by an integer") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int k = 0; k < 10000; ++k) {
    const double x = u(rng);
    const double w = wrap_coord(x);
    CHECK(w >= -0.5);
    CHECK(w < 0.5);
    CHECK(std::abs((x - w) - std::round(x - w)) < 1e-12);
  }
  CHECK(wrap_coord(0.5) == -0.5);
  CHECK(wrap_coord(-0.5) == -0.5);
}

TEST_CASE("torus distance is a metric bounded by half the diagonal") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 2000; ++k) {
    const double a[2] = {u(rng), u(rng)}, b[2] = {u(rng), u(rng)}, c[2] = {u(rng), u(rng)};
    const double ab = torus_distance(a, b), bc = torus_distance(b, c), ac = torus_distance(a, c);
    CHECK(ab == doctest::Approx(torus_distance(b, a)).epsilon(1e-14));
    CHECK(ac <= ab + bc + 1e-14);
    CHECK(ab <= std::sqrt(2.0) / 2.0 + 1e-14);
    CHECK(torus_distance_sq(a, b) == doctest::Approx(ab * ab).epsilon(1e-12));
    // Invariant under integer shifts of either argument.
    const double shifted[2] = {a[0] + 3.0, a[1] - 2.0};
    CHECK(torus_distance(shifted, b) == doctest::Approx(ab).epsilon(1e-12));
  }
}

TEST_CASE("lifted points split into a torus point plus winding") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int k = 0; k < 1000; ++k) {
    const double c[2] = {u(rng), u(rng)};
    const auto w = wrap(LiftedPoint::from(c));
    for (int i = 0; i < 2; ++i) {
      CHECK(w.point[i] + static_cast<double>(w.winding[static_cast<std::size_t>(i)]) ==
            doctest::Approx(c[i]).epsilon(1e-13));
    }
    const auto back = unwrap(w.point, std::span<const std::int64_t>(w.winding.data(), 2));
    CHECK(back.c[0] == doctest::Approx(c[0]).epsilon(1e-13));
  }
}

TEST_CASE("torus points reject non-finite coordinates") {
  const double bad[1] = {std::nan("")};
  CHECK_THROWS_AS(TorusPoint(std::span<const double>(bad, 1)), Error);
}

TEST_CASE("spectral operators are exact on resolved trigonometric modes") {
  for (int dim : {1, 2}) {
    PeriodicGrid g(dim, 32);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.node_coord(i, 0), y = dim == 2 ? g.node_coord(i, 1) : 0.0;
      g[i] = std::cos(2.0 * pi * (3.0 * x + (dim == 2 ? 2.0 * y : 0.0)));
    }
    const double k2 = 4.0 * pi * pi * (9.0 + (dim == 2 ? 4.0 : 0.0));
    const auto lap = spectral::laplacian(g);
    const auto dx = spectral::derivative(g, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(lap[i] == doctest::Approx(-k2 * g[i]).epsilon(1e-10).scale(1.0));
      const double x = g.node_coord(i, 0), y = dim == 2 ? g.node_coord(i, 1) : 0.0;
      const double expect = -6.0 * pi * std::sin(2.0 * pi * (3.0 * x + (dim == 2 ? 2.0 * y : 0.0)));
      CHECK(dx[i] == doctest::Approx(expect).scale(1.0).epsilon(1e-10));
    }
    CHECK(g.integral() == doctest::Approx(0.0).scale(1.0));
    // ε²/2 ∫|∇u|² = ε²/2 · k² · ½ for a unit cosine.
    CHECK(spectral::gradient_energy(g, 0.5) == doctest::Approx(0.125 * k2 * 0.5).epsilon(1e-10));
  }
}

TEST_CASE("screened solve inverts (-aΔ + b) on random data") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  PeriodicGrid rhs(2, 16);
  for (double& v : rhs.values()) v = n(rng);
  const auto u = spectral::solve_screened(rhs, 0.3, 2.0);
  const auto lap = spectral::laplacian(u);
  // Only the resolved band is invertible; the Nyquist rows are part of it here.
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(-0.3 * lap[i] + 2.0 * u[i] - rhs[i]));
  CHECK(err < 1e-10);
}

TEST_CASE("lp norms follow the rectangle rule") {
  PeriodicGrid g(1, 8, 2.0);
  CHECK(g.lp_norm(1.0) == doctest::Approx(2.0));
  CHECK(g.lp_norm(2.0) == doctest::Approx(2.0));
  g[3] = 10.0;
  CHECK(g.lp_norm(INFINITY) == 10.0);
  CHECK(g.lp_norm(3.0) <= g.lp_norm(INFINITY));
  CHECK(g.lp_norm(1.0) <= g.lp_norm(2.0));  // probability measure on T¹
}
