#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "vpme/error.hpp"
#include "vpme/network_simplex.hpp"
#include "vpme/ot.hpp"
#include "vpme/sinkhorn.hpp"
#include "vpme/verify_suite.hpp"

using namespace vpme;

namespace {

std::vector<double> random_cost(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(n * m);
  for (double& x : c) x = u(rng);
  return c;
}

std::vector<double> random_weights(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (double& x : w) s += (x = u(rng));
  for (double& x : w) x /= s;
  return w;
}

double assignment_brute_force(const std::vector<double>& c, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  double best = INFINITY;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += c[i * n + p[i]];
    best = std::min(best, s / static_cast<double>(n));
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

}  // namespace

TEST_CASE("network simplex matches permutation enumeration on uniform problems") {
  std::mt19937_64 rng(30);
  for (std::size_t n = 1; n <= 7; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto c = random_cost(n, n, rng);
      const std::vector<double> w(n, 1.0 / static_cast<double>(n));
      CHECK(network_simplex(w, w, c).cost == doctest::Approx(assignment_brute_force(c, n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("network simplex returns a feasible plan with optimal duals") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> size(1, 40);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = size(rng), m = size(rng);
    const auto a = random_weights(n, rng), b = random_weights(m, rng);
    const auto c = random_cost(n, m, rng);
    const auto r = network_simplex(a, b, c);
    std::vector<double> ra(n, 0.0), cb(m, 0.0);
    double primal = 0.0;
    for (const auto& e : r.plan) {
      CHECK(e.mass >= 0.0);
      ra[e.i] += e.mass;
      cb[e.j] += e.mass;
      primal += e.mass * c[e.i * m + e.j];
      // Complementary slackness on the support.
      CHECK(c[e.i * m + e.j] - r.u[e.i] - r.v[e.j] == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    }
    for (std::size_t i = 0; i < n; ++i) CHECK(ra[i] == doctest::Approx(a[i]).epsilon(1e-12));
    for (std::size_t j = 0; j < m; ++j) CHECK(cb[j] == doctest::Approx(b[j]).epsilon(1e-12));
    CHECK(primal == doctest::Approx(r.cost).epsilon(1e-12));
    // Dual feasibility and zero duality gap.
    double dual = 0.0;
    for (std::size_t i = 0; i < n; ++i) dual += a[i] * r.u[i];
    for (std::size_t j = 0; j < m; ++j) dual += b[j] * r.v[j];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) CHECK(c[i * m + j] - r.u[i] - r.v[j] >= -1e-10);
    CHECK(dual == doctest::Approx(r.cost).epsilon(1e-10));
  }
}

TEST_CASE("network simplex survives degenerate and tied instances") {
  // All-zero costs and repeated weights produce massive degeneracy.
  const std::vector<double> a(6, 1.0 / 6.0), b(6, 1.0 / 6.0), zero(36, 0.0);
  CHECK(network_simplex(a, b, zero).cost == 0.0);
  std::vector<double> ties(36);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) ties[i * 6 + j] = static_cast<double>((i + j) % 3);
  CHECK(network_simplex(a, b, ties).cost == doctest::Approx(assignment_brute_force(ties, 6)));
}

TEST_CASE("unbalanced or malformed transport problems are rejected") {
  const std::vector<double> a{0.5, 0.5}, b{0.7, 0.4}, c(4, 1.0);
  try {
    (void)network_simplex(a, b, c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnequalMass);
  }
  const std::vector<double> short_cost(3, 1.0), ok{0.5, 0.5};
  CHECK_THROWS_AS((void)network_simplex(a, ok, short_cost), Error);
}

TEST_CASE("Sinkhorn brackets the exact cost") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = 10 + 5 * static_cast<std::size_t>(trial), m = 12 + 3 * static_cast<std::size_t>(trial);
    const auto a = random_weights(n, rng), b = random_weights(m, rng);
    const auto c = random_cost(n, m, rng);
    const double exact = network_simplex(a, b, c).cost;
    const auto s = sinkhorn(a, b, c);
    CHECK(s.dual <= exact + 1e-9);
    CHECK(s.primal >= exact - 1e-9);
    CHECK(s.gap == doctest::Approx(s.primal - s.dual));
    CHECK(s.gap < 5e-2);
    std::vector<double> ra(n, 0.0);
    for (const auto& e : s.plan) ra[e.i] += e.mass;
    for (std::size_t i = 0; i < n; ++i) CHECK(ra[i] == doctest::Approx(a[i]).epsilon(1e-9));
  }
}

TEST_CASE("circle W1 closed form agrees with exact OT on positions") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    auto mu = random_ensemble(1, 5 + trial, rng, 1.0, true);
    auto nu = random_ensemble(1, 3 + 2 * trial, rng, 1.0, trial % 2 == 0);
    std::fill(mu.velocities.begin(), mu.velocities.end(), 0.0);
    std::fill(nu.velocities.begin(), nu.velocities.end(), 0.0);
    const double exact = wasserstein(mu, nu, 1).value;
    CHECK(circle_w1(mu.positions, mu.weights, nu.positions, nu.weights) == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("a uniform velocity shift moves W1 and W2 by exactly the shift") {
  std::mt19937_64 rng(34);
  auto mu = random_ensemble(2, 60, rng);
  auto nu = mu;
  for (std::size_t i = 0; i < nu.size(); ++i) nu.velocities[2 * i] += 0.01;
  CHECK(wasserstein(mu, nu, 1).value == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(wasserstein(mu, nu, 2).value == doctest::Approx(0.01).epsilon(1e-9));
  const auto id = identity_plan(mu, nu);
  CHECK(id.cost_p1 == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("Wasserstein distances satisfy the triangle inequality") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 15; ++trial) {
    const auto a = random_ensemble(1, 20, rng, 1.0, true);
    const auto b = random_ensemble(1, 25, rng, 1.0, true);
    const auto c = random_ensemble(1, 15, rng, 1.0, true);
    for (int p : {1, 2}) {
      const double ab = wasserstein(a, b, p).value, bc = wasserstein(b, c, p).value, ac = wasserstein(a, c, p).value;
      CHECK(ac <= ab + bc + 1e-10);
    }
    CHECK(wasserstein(a, a, 1).value == doctest::Approx(0.0).scale(1.0));
  }
}

TEST_CASE("the entropic method returns certified bounds") {
  std::mt19937_64 rng(36);
  const auto a = random_ensemble(2, 40, rng), b = random_ensemble(2, 50, rng);
  const auto exact = wasserstein(a, b, 2);
  const auto ent = wasserstein(a, b, 2, OtMethod::Entropic);
  const double c = exact.value * exact.value;
  CHECK(ent.cost_lower <= c + 1e-9);
  CHECK(ent.cost_upper >= c - 1e-9);
  CHECK(ent.plan.marginal_error(a.weights, b.weights) < 1e-8);
}

TEST_CASE("entropic values bracket the exact value on phase-space pairs up to 200 particles") {
  std::mt19937_64 rng(39);
  for (std::size_t n : {20, 80, 200}) {
    for (int p : {1, 2}) {
      const auto a = random_ensemble(2, n, rng), b = random_ensemble(2, n + 7, rng);
      const double exact = wasserstein(a, b, p).value;
      const auto ent = wasserstein(a, b, p, OtMethod::Entropic);
      const double c = p == 1 ? exact : exact * exact;
      CHECK(ent.cost_lower <= c + 1e-9);
      CHECK(ent.cost_upper >= c - 1e-9);
      CHECK(ent.plan.marginal_error(a.weights, b.weights) < 1e-8);
    }
  }
}

TEST_CASE("cross-order comparisons hold on random pairs") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mu = random_ensemble(1 + trial % 2, 30, rng, 1.0, true);
    const auto nu = random_ensemble(1 + trial % 2, 40, rng, 1.0, false);
    const auto r = verify_wp_inequalities(mu, nu, 4.0);
    CHECK(r.first_holds);
    CHECK(r.second_holds);
  }
}

TEST_CASE("the stated second comparison fails on a far-outlier pair while the squared form holds") {
  // μ = δ₀, ν = (1−ρ)δ₀ + ρδ_{v=L}: W₂ = √ρ·L outgrows the W₁^{2/3} right side.
  auto mu = ParticleEnsemble::with_equal_weights(1, 1, 1.0);
  auto nu = ParticleEnsemble::with_equal_weights(1, 2, 1.0);
  const double rho = 1e-4, L = 10.0;
  nu.weights = {1.0 - rho, rho};
  nu.velocities = {0.0, L};
  const auto r = verify_wp_inequalities(mu, nu, 4.0);
  CHECK(r.w2 == doctest::Approx(std::sqrt(rho) * L));
  CHECK_FALSE(r.second_holds);
  CHECK(r.squared_holds);
}

TEST_CASE("subsample keeps unit mass and the requested size") {
  std::mt19937_64 rng(38);
  const auto f = random_ensemble(1, 1000, rng, 1.0, true);
  const auto s = subsample(f, 77);
  CHECK(s.size() == 77);
  CHECK(std::accumulate(s.weights.begin(), s.weights.end(), 0.0) == doctest::Approx(1.0));
  CHECK_NOTHROW(s.validate());
}
