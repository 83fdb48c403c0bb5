#include "vpme/initial_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "vpme/error.hpp"
#include "vpme/field.hpp"
#include "vpme/geometry.hpp"
#include "vpme/ot.hpp"

namespace vpme {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Root of x^{D+1} = x + 1; its inverse powers give the additive R_D sequence.
double generalized_golden(int D) {
  double x = 2.0;
  for (int it = 0; it < 60; ++it) {
    const double f = std::pow(x, D + 1) - x - 1.0;
    const double df = (D + 1) * std::pow(x, D) - 1.0;
    x -= f / df;
  }
  return x;
}

class UnitSampler {
 public:
  UnitSampler(int D, bool quasi, std::uint64_t seed) : quasi_(quasi), rng_(seed), alpha_(D), shift_(D) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double phi = generalized_golden(D);
    for (int j = 0; j < D; ++j) {
      alpha_[j] = std::pow(1.0 / phi, j + 1);
      shift_[j] = u(rng_);
    }
  }

  // Coordinate j of point i, strictly inside (0, 1).
  double operator()(std::size_t i, int j) {
    double u;
    if (quasi_) {
      const double t = shift_[j] + static_cast<double>(i + 1) * alpha_[j];
      u = t - std::floor(t);
    } else {
      u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    }
    return std::clamp(u, 1e-15, 1.0 - 1e-15);
  }

 private:
  bool quasi_;
  std::mt19937_64 rng_;
  std::vector<double> alpha_, shift_;
};

// Cosine series of the spatial profile: pairs (mode, amplitude).
std::vector<std::pair<int, double>> profile_terms(const InitialDataSpec& s) {
  std::vector<std::pair<int, double>> terms;
  switch (s.family) {
    case Family::Equilibrium:
      break;
    case Family::SingleBump:
    case Family::DoubleBump:
      if (s.amplitude != 0.0) terms.emplace_back(s.mode, s.amplitude);
      break;
    case Family::AnalyticPerturbed:
      for (int m = 1; m <= 4; ++m) terms.emplace_back(m, s.amplitude * std::ldexp(1.0, 1 - m));
      break;
  }
  return terms;
}

double profile_cdf(const std::vector<std::pair<int, double>>& terms, double x) {
  double c = x + 0.5;
  for (auto [m, a] : terms) c += a * std::sin(kTwoPi * m * x) / (kTwoPi * m);
  return c;
}

double profile_value(const std::vector<std::pair<int, double>>& terms, double x) {
  double r = 1.0;
  for (auto [m, a] : terms) r += a * std::cos(kTwoPi * m * x);
  return r;
}

// Safeguarded Newton on the monotone CDF.
double inverse_cdf(const std::vector<std::pair<int, double>>& terms, double u) {
  if (terms.empty()) return u - 0.5;
  double lo = -0.5, hi = 0.5, x = u - 0.5;
  for (int it = 0; it < 100; ++it) {
    const double g = profile_cdf(terms, x) - u;
    if (std::abs(g) < 1e-15) break;
    if (g > 0) hi = x; else lo = x;
    double next = x - g / profile_value(terms, x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return std::clamp(x, -0.5, std::nextafter(0.5, 0.0));
}

void check_spec(const InitialDataSpec& s) {
  if (s.dim < 1 || s.dim > 2) fail(ErrorCode::DimensionMismatch, "dimension must be 1 or 2");
  if (!(s.epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (!(s.sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be nonnegative");
  if (s.mode < 1) fail(ErrorCode::InvalidArgument, "mode must be >= 1");
  double total = 0.0;
  for (auto [m, a] : profile_terms(s)) total += std::abs(a);
  if (!(total < 1.0)) fail(ErrorCode::NegativeDensity, "perturbation amplitude makes the density nonpositive");
}

double gauss(double v, double mean, double sigma) {
  const double z = (v - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
}

double velocity_box(const InitialDataSpec& s) {
  return std::abs(s.family == Family::DoubleBump ? s.beam_velocity : 0.0) + 10.0 * std::max(s.sigma, 0.1);
}

// Numerical sup over a tensor grid of velocities of weight(v)·g(v).
template <class Weight>
double velocity_sup(const InitialDataSpec& s, Weight weight) {
  const double L = velocity_box(s);
  const int m = s.dim == 1 ? 4001 : 401;
  double best = 0.0;
  std::array<double, 2> v{};
  for (int a = 0; a < m; ++a) {
    v[0] = -L + 2.0 * L * a / (m - 1);
    if (s.dim == 1) {
      best = std::max(best, weight(std::span<const double>(v.data(), 1)));
      continue;
    }
    for (int b = 0; b < m; ++b) {
      v[1] = -L + 2.0 * L * b / (m - 1);
      best = std::max(best, weight(std::span<const double>(v.data(), 2)));
    }
  }
  return best;
}

}  // namespace

Family parse_family(std::string_view name) {
  if (name == "equilibrium") return Family::Equilibrium;
  if (name == "single_bump") return Family::SingleBump;
  if (name == "double_bump") return Family::DoubleBump;
  if (name == "analytic_perturbed") return Family::AnalyticPerturbed;
  fail(ErrorCode::UnknownFamily, "unknown initial-data family '" + std::string(name) + "'");
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Equilibrium: return "equilibrium";
    case Family::SingleBump: return "single_bump";
    case Family::DoubleBump: return "double_bump";
    case Family::AnalyticPerturbed: return "analytic_perturbed";
  }
  return "?";
}

double family_density(const InitialDataSpec& spec, double x1) { return profile_value(profile_terms(spec), x1); }

double family_velocity_density(const InitialDataSpec& spec, std::span<const double> v) {
  if (spec.sigma == 0.0) return 0.0;
  double rest = 1.0;
  for (std::size_t a = 1; a < v.size(); ++a) rest *= gauss(v[a], 0.0, spec.sigma);
  if (spec.family == Family::DoubleBump) {
    return 0.5 * (gauss(v[0], spec.beam_velocity, spec.sigma) + gauss(v[0], -spec.beam_velocity, spec.sigma)) * rest;
  }
  return gauss(v[0], 0.0, spec.sigma) * rest;
}

InitialData make_initial_data(const InitialDataSpec& spec, std::size_t n, std::uint64_t seed) {
  check_spec(spec);
  if (n == 0) fail(ErrorCode::InvalidArgument, "particle count must be positive");
  const int d = spec.dim;
  const bool bump2 = spec.family == Family::DoubleBump;
  const int D = 2 * d + (bump2 ? 1 : 0);
  UnitSampler sample(D, spec.quasi_random, seed);
  const auto terms = profile_terms(spec);
  const boost::math::normal_distribution<double> normal(0.0, 1.0);

  InitialData out;
  auto& f = out.ensemble;
  f = ParticleEnsemble::with_equal_weights(d, n, spec.epsilon);
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < d; ++a) {
      const double u = sample(i, a);
      f.positions[i * d + a] = a == 0 ? inverse_cdf(terms, u) : std::min(u - 0.5, std::nextafter(0.5, 0.0));
    }
    double beam = 0.0;
    if (bump2) beam = sample(i, 2 * d) < 0.5 ? spec.beam_velocity : -spec.beam_velocity;
    for (int a = 0; a < d; ++a) {
      const double z = spec.sigma > 0.0 ? spec.sigma * boost::math::quantile(normal, sample(i, d + a)) : 0.0;
      f.velocities[i * d + a] = z + (a == 0 ? beam : 0.0);
    }
  }

  double rho_max = 1.0;
  for (auto [m, a] : terms) rho_max += std::abs(a);
  double b_norm = 1.0;
  for (auto [m, a] : terms) b_norm += std::abs(a) * std::pow(spec.analytic_delta, m);
  out.b_delta_norm = b_norm;

  if (spec.sigma == 0.0) {
    out.f_sup = std::numeric_limits<double>::infinity();
    out.weighted_sup = std::numeric_limits<double>::infinity();
  } else {
    out.f_sup = rho_max * velocity_sup(spec, [&](std::span<const double> v) { return family_velocity_density(spec, v); });
    out.weighted_sup = b_norm * velocity_sup(spec, [&](std::span<const double> v) {
                         double s = 0.0;
                         for (double c : v) s += c * c;
                         return (1.0 + std::pow(std::sqrt(s), spec.k0)) * family_velocity_density(spec, v);
                       });
  }
  return out;
}

PerturbMode parse_perturb_mode(std::string_view name) {
  if (name == "velocity_shift") return PerturbMode::VelocityShift;
  if (name == "jitter") return PerturbMode::Jitter;
  if (name == "rough_resample") return PerturbMode::RoughResample;
  fail(ErrorCode::InvalidArgument, "unknown perturbation mode '" + std::string(name) + "'");
}

std::string_view to_string(PerturbMode m) {
  switch (m) {
    case PerturbMode::VelocityShift: return "velocity_shift";
    case PerturbMode::Jitter: return "jitter";
    case PerturbMode::RoughResample: return "rough_resample";
  }
  return "?";
}

double resolution_floor(std::size_t n, int dim) {
  return 3.0 * std::pow(static_cast<double>(n), -1.0 / (4.0 * dim));
}

PerturbationResult perturb(const ParticleEnsemble& g0, double eta, PerturbMode mode, std::uint64_t seed,
                           const InitialDataSpec* spec, std::size_t subsample_size) {
  g0.validate();
  if (!(eta > 0.0) || !std::isfinite(eta)) fail(ErrorCode::InvalidArgument, "perturbation size must be positive");
  const int d = g0.dim;
  const std::size_t n = g0.size();
  PerturbationResult r;
  r.eta = eta;
  r.ensemble = g0;
  auto& f = r.ensemble;

  switch (mode) {
    case PerturbMode::VelocityShift:
      for (std::size_t i = 0; i < n; ++i) f.velocities[i * d] += eta;
      break;
    case PerturbMode::Jitter: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        f.velocities[i * d] += eta * (0.5 + 0.25 * u(rng));
        const double x = f.positions[i * d] + 0.25 * eta * (2.0 * u(rng) - 1.0);
        const double wrapped = wrap_coord(x);
        f.positions[i * d] = wrapped;
        if (!f.winding.empty()) f.winding[i * d] += std::llround(x - wrapped);
      }
      break;
    }
    case PerturbMode::RoughResample: {
      if (spec == nullptr) fail(ErrorCode::InvalidArgument, "rough resample needs the family spec");
      const double floor = resolution_floor(n, d);
      if (eta < floor) {
        fail(ErrorCode::BelowResolutionFloor,
             "eta " + std::to_string(eta) + " is below the resolution floor " + std::to_string(floor));
      }
      InitialDataSpec s = *spec;
      s.quasi_random = false;
      f = make_initial_data(s, n, seed ^ 0x9e3779b97f4a7c15ULL).ensemble;
      f.time = g0.time;
      for (std::size_t i = 0; i < n; ++i) f.velocities[i * d] += eta;
      break;
    }
  }

  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) shift += f.weights[i] * (f.velocities[i * d] - g0.velocities[i * d]);
  r.w1_lower = std::abs(shift);
  auto plan = identity_plan(f, g0);
  price_plan(plan, f, g0);
  r.w1_upper = plan.cost_p1;
  if (subsample_size > 0) {
    const std::size_t m = std::min(subsample_size, n);
    r.w1_subsample = wasserstein(subsample(f, m), subsample(g0, m), 1).value;
  }
  return r;
}

double moment_interpolation_constant(double k, int d) {
  if (!(k > 1.0)) fail(ErrorCode::InvalidArgument, "moment order must exceed 1");
  if (d < 1 || d > 2) fail(ErrorCode::DimensionMismatch, "dimension must be 1 or 2");
  const double omega = d == 1 ? 2.0 : std::numbers::pi;
  const double dd = d;
  return std::pow(omega, k / (dd + k)) * (std::pow(k / dd, dd / (dd + k)) + std::pow(dd / k, k / (dd + k)));
}

InitialEnergyReport verify_initial_energy(const ParticleEnsemble& f0, double f_sup, double k, int resolution) {
  f0.validate();
  const int d = f0.dim;
  const auto rho = deposit_density(f0, resolution);
  const auto U = solve_poisson_boltzmann(rho, f0.epsilon, 1e-10);
  const auto e = energy(f0, U);
  InitialEnergyReport r;
  r.kinetic = e.kinetic;
  r.field = e.field();
  r.energy = e.total();

  const double q = (d + 2.0) / d;
  const double cd = std::pow(d / 2.0, d / 2.0) * std::exp(-d / 2.0);
  const double norm_q = rho.rho.lp_norm(q);
  r.energy_bound = e.kinetic + std::pow(cd, 2.0 / d) * std::pow(norm_q, q);
  r.energy_holds = r.energy <= r.energy_bound * (1.0 + 1e-10);

  r.rho_norm = rho.rho.lp_norm(1.0 + k / d);
  r.moment = moment(f0, k).value;
  r.constant = moment_interpolation_constant(k, d);
  r.interpolation_rhs = r.constant * std::pow(f_sup, k / (d + k)) * std::pow(r.moment, d / (d + k));
  r.interpolation_holds = r.rho_norm <= r.interpolation_rhs;
  return r;
}

}  // namespace vpme
