#pragma once

// Initial-data families and controlled perturbations.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "vpme/measures.hpp"

namespace vpme {

enum class Family { Equilibrium, SingleBump, DoubleBump, AnalyticPerturbed };

Family parse_family(std::string_view name);
std::string_view to_string(Family f);

struct InitialDataSpec {
  Family family = Family::Equilibrium;
  int dim = 1;
  double epsilon = 0.5;
  /// Thermal width of each Maxwellian; 0 gives cold data (v ≡ beam velocity).
  double sigma = 1.0;
  /// Spatial perturbation ρ = 1 + a cos(2π·mode·x₁) (single/double bump), or
  /// 1 + a Σ_{m=1}^4 2^{1−m} cos(2π m x₁) (analytic_perturbed).
  double amplitude = 0.0;
  int mode = 1;
  /// Beam velocities ±beam_velocity along the first axis (double bump).
  double beam_velocity = 2.0;
  /// Low-discrepancy sampling; false switches to pseudo-random draws.
  bool quasi_random = true;
  /// δ of the analytic norm that is logged.
  double analytic_delta = 1.5;
  double k0 = 3.0;
};

struct InitialData {
  ParticleEnsemble ensemble;
  double f_sup = 0.0;          // sup f of the sampled law (inf for cold data)
  double b_delta_norm = 0.0;   // ‖ρ‖_{B_δ} of the spatial profile
  double weighted_sup = 0.0;   // sup_v (1+|v|^k0) g(v) · ‖ρ‖_{B_δ}
};

InitialData make_initial_data(const InitialDataSpec& spec, std::size_t n, std::uint64_t seed);

/// Spatial density profile of a family (unit mass).
double family_density(const InitialDataSpec& spec, double x1);
/// Velocity density of a family at v (product over axes for the Maxwellian part).
double family_velocity_density(const InitialDataSpec& spec, std::span<const double> v);

enum class PerturbMode { VelocityShift, Jitter, RoughResample };

PerturbMode parse_perturb_mode(std::string_view name);
std::string_view to_string(PerturbMode m);

struct PerturbationResult {
  ParticleEnsemble ensemble;
  double eta = 0.0;
  double w1_upper = 0.0;      // identity coupling over all particles
  double w1_lower = 0.0;      // |mean velocity shift|, a Kantorovich lower bound
  double w1_subsample = 0.0;  // exact OT on a paired subsample
};

/// Velocity shift: every velocity moves by η along the first axis, W₁ = η.
/// Jitter: per-particle phase-space displacement of size ≤ η.
/// Rough resample: an independent draw of `spec` plus a shift of η;
/// rejected when η < 3 N^{−1/(4d)}.
PerturbationResult perturb(const ParticleEnsemble& g0, double eta, PerturbMode mode, std::uint64_t seed,
                           const InitialDataSpec* spec = nullptr, std::size_t subsample_size = 400);

/// Lower bound below which a resampled perturbation is dominated by sampling noise.
double resolution_floor(std::size_t n, int dim);

struct InitialEnergyReport {
  double kinetic = 0.0;
  double field = 0.0;
  double energy = 0.0;
  double energy_bound = 0.0;  // ½M₂ + c_d^{2/d} ‖ρ‖^{(d+2)/d}_{(d+2)/d}
  bool energy_holds = false;
  double rho_norm = 0.0;      // ‖ρ‖_{1+k/d}
  double moment = 0.0;        // ∫(1+|v|^k) f
  double constant = 0.0;      // C_{k,d}
  double interpolation_rhs = 0.0;
  bool interpolation_holds = false;
};

/// C_{k,d} = ω_d^{k/(d+k)} [(k/d)^{d/(d+k)} + (d/k)^{k/(d+k)}].
double moment_interpolation_constant(double k, int d);

InitialEnergyReport verify_initial_energy(const ParticleEnsemble& f0, double f_sup, double k, int resolution = 64);

}  // namespace vpme
