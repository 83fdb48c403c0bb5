#include "vpme/verify_suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "vpme/error.hpp"
#include "vpme/field.hpp"
#include "vpme/field_checks.hpp"
#include "vpme/growth.hpp"
#include "vpme/initial_data.hpp"
#include "vpme/ot.hpp"
#include "vpme/penrose.hpp"

namespace vpme {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void record(CheckResult& r, bool ok, double lhs, double rhs) {
  ++r.trials;
  if (!ok) ++r.failures;
  if (rhs > 0.0) r.worst = std::max(r.worst, lhs / rhs);
}

}  // namespace

Verdict CheckResult::as_verdict() const {
  Verdict v;
  v.name = name;
  v.lhs = worst;
  v.rhs = 1.0;
  v.holds = holds();
  return v;
}

GridDensity random_smooth_density(int dim, int n, std::mt19937_64& rng, double strength) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), phase(0.0, 2.0 * std::numbers::pi);
  struct Mode {
    int k0, k1;
    double a, phi;
  };
  std::vector<Mode> modes;
  for (int k0 = 0; k0 <= 3; ++k0) {
    for (int k1 = (dim == 2 ? -3 : 0); k1 <= (dim == 2 ? 3 : 0); ++k1) {
      if (k0 == 0 && k1 <= 0) continue;
      const double decay = 1.0 / (1.0 + k0 * k0 + k1 * k1);
      modes.push_back({k0, k1, strength * decay * u(rng), phase(rng)});
    }
  }
  PeriodicGrid g(dim, n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x0 = g.node_coord(i, 0), x1 = dim == 2 ? g.node_coord(i, 1) : 0.0;
    double s = 0.0;
    for (const auto& m : modes) s += m.a * std::cos(2.0 * std::numbers::pi * (m.k0 * x0 + m.k1 * x1) + m.phi);
    g[i] = std::exp(s);
  }
  const double mean = g.mean();
  for (double& x : g.values()) x /= mean;
  return {std::move(g), 1.0};
}

ParticleEnsemble random_ensemble(int dim, std::size_t n, std::mt19937_64& rng, double epsilon, bool random_weights) {
  std::uniform_real_distribution<double> pos(-0.5, 0.5), w(0.1, 1.0), scale(0.2, 2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto f = ParticleEnsemble::with_equal_weights(dim, n, epsilon);
  const double s = scale(rng);
  for (std::size_t k = 0; k < f.positions.size(); ++k) {
    f.positions[k] = std::min(pos(rng), std::nextafter(0.5, 0.0));
    f.velocities[k] = s * gauss(rng);
  }
  if (random_weights) {
    double total = 0.0;
    for (double& x : f.weights) total += (x = w(rng));
    for (double& x : f.weights) x /= total;
  }
  return f;
}

CheckResult check_field_exactness(const std::vector<double>& epsilons, int n, double max_seconds) {
  CheckResult r;
  r.name = "field_solver_exactness";
  std::ostringstream detail;
  detail.precision(3);
  constexpr double delta = 1e-4;
  const auto t0 = Clock::now();
  for (double eps : epsilons) {
    GridDensity rho{PeriodicGrid(1, n), 1.0};
    for (std::size_t i = 0; i < rho.rho.size(); ++i)
      rho.rho[i] = 1.0 + delta * std::cos(2.0 * std::numbers::pi * rho.rho.node_coord(i, 0));
    const auto ts = Clock::now();
    const auto U = solve_poisson_boltzmann(rho, eps, 1e-10);
    const double secs = seconds_since(ts);
    const double amp = delta / (1.0 + 4.0 * std::numbers::pi * std::numbers::pi * eps * eps);
    double err = 0.0;
    for (std::size_t i = 0; i < U.U.size(); ++i)
      err = std::max(err, std::abs(U.U[i] - amp * std::cos(2.0 * std::numbers::pi * U.U.node_coord(i, 0))));
    record(r, U.residual_norm <= 1e-10, U.residual_norm, 1e-10);
    record(r, err <= 1e-6, err, 1e-6);
    record(r, secs < max_seconds, secs, max_seconds);
    detail << "eps=" << eps << " residual=" << U.residual_norm << " oracle_err=" << err << " t=" << secs << "s; ";
  }
  r.seconds = seconds_since(t0);
  r.detail = detail.str();
  return r;
}

CheckResult check_lp_bounds(std::size_t per_case, std::uint64_t seed) {
  CheckResult r;
  r.name = "exp_potential_lp_bound";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_eps(std::log(0.1), 0.0), strength(0.2, 2.0);
  const auto t0 = Clock::now();
  for (int d : {1, 2}) {
    for (std::size_t k = 0; k < per_case; ++k) {
      const auto rho = random_smooth_density(d, d == 1 ? 128 : 32, rng, strength(rng));
      const double eps = std::exp(log_eps(rng));
      const auto U = solve_poisson_boltzmann(rho, eps, 1e-11);
      for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
        const auto b = verify_lp_bound(rho, U, p, 1e-8);
        record(r, b.holds, b.lhs, b.rhs);
      }
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CheckResult> check_field_stability(std::size_t l2_pairs, std::size_t loeper_pairs, std::uint64_t seed) {
  CheckResult l2, loeper;
  l2.name = "potential_gradient_l2_stability";
  loeper.name = "loeper_type_bound";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> strength(0.2, 1.5);
  const auto t0 = Clock::now();
  const std::size_t total = std::max(l2_pairs, loeper_pairs);
  for (std::size_t k = 0; k < total; ++k) {
    const double eps = k % 2 == 0 ? 1.0 : 0.5;
    const auto r1 = random_smooth_density(2, 32, rng, strength(rng));
    const auto r2 = random_smooth_density(2, 32, rng, strength(rng));
    const auto s = verify_field_stability(r1, r2, eps);
    if (k < l2_pairs) record(l2, s.l2_holds, s.lhs, s.l2_rhs);
    if (k < loeper_pairs) record(loeper, s.loeper_holds, s.lhs, s.loeper_rhs);
  }
  l2.seconds = loeper.seconds = seconds_since(t0);
  return {l2, loeper};
}

CheckResult check_regular_stability(std::size_t pairs, const std::vector<double>& epsilons, std::uint64_t seed) {
  CheckResult r;
  r.name = "regular_field_w1_stability";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(5, 120);
  const auto t0 = Clock::now();
  for (double eps : epsilons) {
    for (std::size_t k = 0; k < pairs; ++k) {
      const auto f1 = random_ensemble(1, size(rng), rng, eps, k % 2 == 1);
      const auto f2 = random_ensemble(1, size(rng), rng, eps, k % 3 == 1);
      const auto s = verify_1d_regular_stability(f1, f2, eps);
      record(r, s.holds, s.lhs, s.rhs);
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_wp_inequalities(std::size_t pairs, std::size_t max_particles, double k, std::uint64_t seed) {
  CheckResult r;
  r.name = "wasserstein_order_comparison";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(1, max_particles);
  std::uniform_int_distribution<int> dim(1, 2);
  const auto t0 = Clock::now();
  std::size_t squared_failures = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const int d = dim(rng);
    const auto mu = random_ensemble(d, size(rng), rng, 1.0, i % 2 == 0);
    const auto nu = random_ensemble(d, size(rng), rng, 1.0, i % 3 == 0);
    const auto w = verify_wp_inequalities(mu, nu, k);
    record(r, w.first_holds, w.w1, w.first_rhs);
    record(r, w.second_holds, w.w2, w.second_rhs);
    if (!w.squared_holds) ++squared_failures;
  }
  r.seconds = seconds_since(t0);
  r.detail = "squared-form failures: " + std::to_string(squared_failures);
  return r;
}

CheckResult check_inverse_bound(std::size_t samples, double max_seconds) {
  CheckResult r;
  r.name = "b_inverse_bound";
  const auto rep = verify_inverse_bound(samples);
  r.trials = rep.samples;
  r.failures = rep.failures;
  r.worst = 1.0 / rep.worst_ratio;  // max u / b(bound(u))
  r.seconds = rep.seconds;
  if (rep.seconds >= max_seconds) {
    ++r.failures;
    r.detail = "too slow: " + std::to_string(rep.seconds) + " s";
  }
  return r;
}

CheckResult check_penrose_ordering() {
  CheckResult r;
  r.name = "penrose_ordering";
  const auto t0 = Clock::now();
  const auto grid = PenroseGrid::standard();
  const auto stable = penrose_sweep(maxwellian_profile(1.0), grid);
  const auto unstable = penrose_sweep(double_bump_profile(0.5, 0.05), grid);
  record(r, stable.infimum > unstable.infimum, unstable.infimum, stable.infimum);
  std::ostringstream o;
  o << "maxwellian inf=" << stable.infimum << " double_bump inf=" << unstable.infimum;
  r.detail = o.str();
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_initial_energy() {
  CheckResult r;
  r.name = "initial_energy_bounds";
  const auto t0 = Clock::now();
  InitialDataSpec spec;
  spec.epsilon = 0.5;
  const std::pair<Family, double> cases[] = {
      {Family::Equilibrium, 0.0}, {Family::SingleBump, 0.05}, {Family::DoubleBump, 0.05}, {Family::AnalyticPerturbed, 0.2}};
  for (auto [family, amp] : cases) {
    spec.family = family;
    spec.amplitude = amp;
    spec.sigma = family == Family::DoubleBump ? 0.2 : 1.0;
    const auto data = make_initial_data(spec, 4000, 11);
    const auto e = verify_initial_energy(data.ensemble, data.f_sup, 3.0);
    record(r, e.energy_holds, e.energy, e.energy_bound);
    record(r, e.interpolation_holds, e.rho_norm, e.interpolation_rhs);
  }
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CheckResult> run_verify_suite(const SuiteOptions& o) {
  const std::size_t scale = o.quick ? 5 : 1;
  std::vector<CheckResult> out;
  out.push_back(check_field_exactness({1.0, 0.1, 0.05}));
  out.push_back(check_lp_bounds(50 / scale, o.seed));
  for (auto& c : check_field_stability(50 / scale, 20 / scale, o.seed + 1)) out.push_back(std::move(c));
  out.push_back(check_regular_stability(50 / scale, {1.0, 0.5, 0.25}, o.seed + 2));
  out.push_back(check_wp_inequalities(100 / scale, 100, 4.0, o.seed + 3));
  out.push_back(check_inverse_bound(o.quick ? 100'000 : 1'000'000));
  out.push_back(check_penrose_ordering());
  out.push_back(check_initial_energy());
  return out;
}

}  // namespace vpme
