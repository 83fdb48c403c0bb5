#pragma once

// Experiment configuration: flat key = value text grouped in [sections].
//
//   [run]          d, epsilon, dt, t_end, N_particles, grid, seed, k0, j0, m0,
//                  store_stride, checkpoint_stride, force, solver_tol
//   [initial_data] family, sigma, amplitude, mode, beam_velocity, sampling,
//                  analytic_delta
//   [experiment]   epsilon_ladder (comma list), perturbation, rate, eta,
//                  c_star, zeta, scale, power, T, threads
//   [distances]    method, max_particles, cadence, coupling
//   [monitors]     snapshots, fields
//
// Unknown sections or keys are rejected so that typos fail loudly.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vpme/dynamics.hpp"
#include "vpme/initial_data.hpp"
#include "vpme/stability.hpp"

namespace vpme {

enum class PerturbKind { None, VelocityShift, Jitter, RoughResample };
/// How η depends on ε: fixed, scale·exp(−C_* ε^{−ζ}), or scale·ε^power.
enum class RateKind { Fixed, Exponential, Polynomial };

struct RateParams {
  RateKind kind = RateKind::Fixed;
  double eta = 1e-3;
  double c_star = 5.0;
  double zeta = 1.0;
  double scale = 1.0;
  double power = 2.0;

  double eta_at(double epsilon) const;
};

struct ExperimentConfig {
  SimParams sim;
  std::size_t n_particles = 10000;
  InitialDataSpec initial;
  std::vector<double> epsilon_ladder;
  PerturbKind perturbation = PerturbKind::None;
  RateParams rate;
  DistanceOptions distances;
  /// Checkpoints between distance evaluations.
  int distance_cadence = 1;
  /// "identity" or "optimal" coupling at t = 0 for the kinetic distance.
  std::string coupling = "identity";
  bool snapshots = true;
  bool fields = false;
  /// Moment exponents; j0 and m0 are carried for the record only.
  double j0 = 2.0;
  double m0 = 2.0;
  unsigned threads = 1;

  /// Checks cross-field invariants; throws Error(Config).
  void validate() const;
  /// Canonical text form (every key, fixed order, round-trip precision).
  std::string canonical() const;
  /// FNV-1a 64 of `canonical()`, as 16 hex digits.
  std::string hash() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

std::string_view to_string(PerturbKind k);
std::string_view to_string(RateKind k);
std::string_view to_string(ForceScheme s);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace vpme
