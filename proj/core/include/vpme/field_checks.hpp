#pragma once

// Numerical checks of the elliptic estimates on solved fields. Every report
// carries both sides of its inequality so callers can log the slack.

#include "vpme/field.hpp"
#include "vpme/measures.hpp"

namespace vpme {

struct LpBoundReport {
  double p = 2.0;
  double lhs = 0.0;  // ‖e^U‖_p
  double rhs = 0.0;  // ‖ρ‖_p
  bool holds = false;
};

/// ‖e^U‖_p ≤ ‖ρ‖_p (1 + rel_slack); p = +inf selects the sup norm.
LpBoundReport verify_lp_bound(const GridDensity& rho, const PotentialField& U, double p,
                              double rel_slack = 1e-8);

struct FieldStabilityOptions {
  double tol = 1e-11;
  int quantization_cells = 14;   // per axis in d = 2; 200 cells in d = 1
  double l2_rel_slack = 1e-6;
  double loeper_abs_slack = 1e-4;
};

struct FieldStabilityReport {
  double lhs = 0.0;             // ‖∇U₁ − ∇U₂‖_{L²}
  double h_minus1 = 0.0;        // ‖∇Δ⁻¹(ρ₁ − ρ₂)‖_{L²}
  double l2_rhs = 0.0;       // ε⁻² h_minus1
  bool l2_holds = false;
  double w2 = 0.0;              // exact W₂ between quantizations
  double rho_sup = 0.0;         // max ‖ρ_i‖_∞
  double loeper_rhs = 0.0;      // ε⁻² ρ_sup^{1/2} W₂
  bool loeper_holds = false;
  std::size_t quantization_points = 0;
};

FieldStabilityReport verify_field_stability(const GridDensity& rho1, const GridDensity& rho2, double epsilon,
                                            const FieldStabilityOptions& opts = {});

/// Mass-preserving quantization of a grid density: each coarse cell becomes
/// one atom at its barycentre (velocity zero).
ParticleEnsemble quantize_density(const GridDensity& rho, int cells_per_axis);

struct RegularStabilityReport {
  double lhs = 0.0;  // ‖Û₁′ − Û₂′‖_{L²}
  double w1 = 0.0;   // spatial W₁(ρ₁, ρ₂) on the circle
  double rhs = 0.0;  // ε⁻³ W₁ / 4
  bool holds = false;
  double residual = 0.0;  // worst Û residual of the two solves
};

RegularStabilityReport verify_1d_regular_stability(const ParticleEnsemble& f1, const ParticleEnsemble& f2,
                                                   double epsilon, int resolution = 256,
                                                   double abs_slack = 1e-8);

struct LogLipschitzReport {
  double modulus = 0.0;  // max |∇U(x) − ∇U(y)| / (|x−y| (1 + |log|x−y||))
  double rho_sup = 0.0;
  double epsilon = 0.0;
  double fitted_c = 0.0;  // modulus / (ρ_sup ε⁻²), logged only
  std::size_t pairs = 0;
};

/// Samples node pairs at fixed physical separations {1/32, 1/16, 1/8, 1/4}
/// along the axes and diagonals, so the estimate is grid independent.
LogLipschitzReport field_log_lipschitz_modulus(const PotentialField& U, double rho_sup = 1.0);

}  // namespace vpme
