#pragma once

// Phase-space measures: particle ensembles, grid densities, velocity moments,
// the VPME energy and the analytic-norm diagnostic. The Penrose functional
// lives in penrose.hpp.

#include <cstdint>
#include <span>
#include <vector>

#include "vpme/grid.hpp"
#include "vpme/potential.hpp"

namespace vpme {

/// Weighted particles (x ∈ T^d, v ∈ R^d) representing f_ε at `time`.
/// Coordinates are stored flat: particle i occupies [i*d, (i+1)*d).
struct ParticleEnsemble {
  int dim = 1;
  double epsilon = 1.0;
  double time = 0.0;
  std::vector<double> positions;
  std::vector<double> velocities;
  std::vector<double> weights;
  /// Winding counts matching `positions` (lifted = position + winding).
  std::vector<std::int64_t> winding;

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> x(std::size_t i) const {
    return {positions.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::span<const double> v(std::size_t i) const {
    return {velocities.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  double lifted(std::size_t i, int axis) const {
    const std::size_t k = i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(axis);
    return positions[k] + static_cast<double>(winding.empty() ? 0 : winding[k]);
  }

  /// Checks array sizes, positivity of weights, Σw = 1 within 1e-12 + n·u (summation roundoff) and
  /// finiteness; throws Error(InvalidEnsemble) otherwise.
  void validate() const;

  /// Ensemble of `n` particles with equal weights 1/n and zeroed coordinates.
  static ParticleEnsemble with_equal_weights(int dim, std::size_t n, double epsilon);
};

/// Spatial density ρ on the grid, values ≥ 0.
struct GridDensity {
  PeriodicGrid rho;
  double mass = 1.0;

  int dim() const noexcept { return rho.dim(); }
  int n() const noexcept { return rho.n(); }
};

/// Cloud-in-cell deposition onto an N^d periodic grid (N ≥ 8, power of two).
GridDensity deposit_density(const ParticleEnsemble& f, int resolution);

/// Linear (cloud-in-cell) interpolation of a grid field at a torus point,
/// the adjoint of `deposit_density`.
double interpolate_cic(const PeriodicGrid& g, std::span<const double> x);

struct MomentReport {
  double order = 0.0;
  double value = 0.0;
  double time = 0.0;
};

/// ∫(1 + |v|^k) f: the sup-in-time moment convention, always ≥ mass.
MomentReport moment(const ParticleEnsemble& f, double k);
/// ∫|v|^k f without the additive mass term.
double bare_moment(const ParticleEnsemble& f, double k);

struct EnergyTerms {
  double kinetic = 0.0;   // ½∫|v|² f
  double gradient = 0.0;  // (ε²/2)∫|∇U|²
  double entropy = 0.0;   // ∫ U e^U
  double total() const noexcept { return kinetic + gradient + entropy; }
  double field() const noexcept { return gradient + entropy; }
};

EnergyTerms energy(const ParticleEnsemble& f, const PotentialField& U);
/// Field part only (kinetic left at zero).
EnergyTerms field_energy(const PotentialField& U);

/// ‖g‖_{B_δ} = Σ_k |ĝ(k)| δ^{|k|}, truncated at the grid Nyquist band.
double analytic_norm(const PeriodicGrid& g, double delta);

}  // namespace vpme
