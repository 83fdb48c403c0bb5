#pragma once

// The inequality suite on synthetic data: random smooth densities, random
// particle ensembles and the analytic families. Each check counts trials and
// failures and keeps the worst lhs/rhs ratio seen.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vpme/measures.hpp"
#include "vpme/run_record.hpp"

namespace vpme {

struct CheckResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // max lhs / rhs over trials
  double seconds = 0.0;
  std::string detail;

  bool holds() const noexcept { return trials > 0 && failures == 0; }
  Verdict as_verdict() const;
};

/// exp of a random trigonometric polynomial (|k|∞ ≤ 3), normalised to mean 1.
GridDensity random_smooth_density(int dim, int n, std::mt19937_64& rng, double strength = 1.0);

/// Uniform positions, Gaussian velocities of random scale, optional random weights.
ParticleEnsemble random_ensemble(int dim, std::size_t n, std::mt19937_64& rng, double epsilon = 1.0,
                                 bool random_weights = false);

/// Residual ≤ 1e−10 at n = 256 plus agreement with the linearised solution
/// δ cos(2πx)/(1 + 4π²ε²) for ρ = 1 + δ cos(2πx), δ = 1e−4, within 1e−6.
CheckResult check_field_exactness(const std::vector<double>& epsilons, int n = 256, double max_seconds = 1.0);
CheckResult check_lp_bounds(std::size_t per_case, std::uint64_t seed);
/// Returns the constant-free L² stability check and the Loeper-type check.
std::vector<CheckResult> check_field_stability(std::size_t l2_pairs, std::size_t loeper_pairs, std::uint64_t seed);
CheckResult check_regular_stability(std::size_t pairs, const std::vector<double>& epsilons, std::uint64_t seed);
CheckResult check_wp_inequalities(std::size_t pairs, std::size_t max_particles, double k, std::uint64_t seed);
CheckResult check_inverse_bound(std::size_t samples, double max_seconds = 1.0);
CheckResult check_penrose_ordering();
CheckResult check_initial_energy();

struct SuiteOptions {
  bool quick = false;
  std::uint64_t seed = 20240607;
};

std::vector<CheckResult> run_verify_suite(const SuiteOptions& opts = {});

}  // namespace vpme
