#pragma once

// Penrose-type stability functional for a 1D velocity profile g0:
//   |1 − ∫₀^S e^{−(γ+iτ)s} (iξ/(1+ξ²)) F_v[g0′](sξ) ds|
// with F_v h(η) = ∫ h(v) e^{−iηv} dv. g0′ comes from spectral differentiation
// on the velocity grid and the transform is a direct sum at η = sξ.

#include <cstddef>
#include <functional>
#include <vector>

namespace vpme {

struct VelocityProfile {
  double v_min = -8.0;
  double dv = 1.0 / 32.0;
  std::vector<double> g;

  std::size_t size() const noexcept { return g.size(); }
  double v(std::size_t k) const noexcept { return v_min + dv * static_cast<double>(k); }

  /// Samples `fn` on n points of [−vmax, vmax); n must be even.
  static VelocityProfile sample(const std::function<double(double)>& fn, double vmax, int n);
};

VelocityProfile maxwellian_profile(double sigma, double vmax = 8.0, int n = 512);
/// Two Maxwellian beams at ±vb with thermal width σ, total mass 1.
VelocityProfile double_bump_profile(double vb, double sigma, double vmax = 8.0, int n = 512);

double penrose_functional(const VelocityProfile& g0, double xi, double gamma, double tau);

struct PenroseGrid {
  std::vector<double> gamma;
  std::vector<double> tau;
  std::vector<double> xi;

  /// γ ∈ [0.05, 2] log-spaced, τ ∈ [−4, 4], ξ ∈ [0.25, 4] log-spaced.
  static PenroseGrid standard();
};

struct PenroseSweep {
  double infimum = 0.0;
  double gamma = 0.0;
  double tau = 0.0;
  double xi = 0.0;
  /// Largest |Δvalue|/Δparameter between neighbours in γ or τ.
  double lipschitz = 0.0;
  std::size_t evaluations = 0;
};

PenroseSweep penrose_sweep(const VelocityProfile& g0, const PenroseGrid& grid);

}  // namespace vpme
