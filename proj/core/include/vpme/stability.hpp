#pragma once

// Run-time stability monitors comparing two simulations: the 2D W₂ envelope
// and the 1D weak–strong W₁ bound. Constants are fitted once and reported.

#include <cstddef>
#include <vector>

#include "vpme/dynamics.hpp"
#include "vpme/kinetic_distance.hpp"
#include "vpme/ot.hpp"

namespace vpme {

/// |log(ε⁻² W² |log(½ ε⁻² W²)|)| for W = W₂(f₁(0), f₂(0)).
double envelope_base_2d(double w2_initial, double epsilon);
/// Bound on W₂(t)²: 2 exp(−(√L₀ − (C_d/ε) ∫A)²), or 2 once the bracket turns negative.
double stability_envelope_2d(double w2_initial, double epsilon, double c_d, double integral_a);

/// Trapezoid ∫₀^{t_k} A for each checkpoint time.
std::vector<double> cumulative_integral(const std::vector<double>& times, const std::vector<double>& values);

struct DistanceOptions {
  OtMethod method = OtMethod::Exact;
  /// Paired-index subsample size used for each distance evaluation.
  std::size_t max_particles = 800;
  SinkhornOptions sinkhorn;
};

struct StabilityMonitorReport {
  std::vector<double> times;
  std::vector<double> measured_w2;
  std::vector<double> envelope_w2;  // square root of the fitted envelope
  std::vector<double> integral_a;
  std::vector<double> kinetic_d;    // D(t) under π₀
  double fitted_cd = 0.0;
  int fit_index = -1;               // -1: no decay visible, C_d = 0
  bool holds = false;
};

/// Needs both runs with snapshots at matched checkpoints.
StabilityMonitorReport stability_monitor_2d(const SimulationResult& run1, const SimulationResult& run2,
                                            const TransportPlan& pi0, double epsilon,
                                            const DistanceOptions& opts = {});

/// ε⁻² exp(C ∫₀ᵗ (A + ε⁻²)) W₁(0).
double weak_strong_rhs(double w1_initial, double epsilon, double c, double integral);

struct WeakStrongReport {
  std::vector<double> times;
  std::vector<double> measured_w1;
  std::vector<double> rhs;
  std::vector<double> integral;     // ∫₀ᵗ (A + ε⁻²)
  double fitted_c = 0.0;
  bool holds = false;
};

/// `strong` supplies A(t) = ‖ρ‖_∞; both runs need snapshots at matched checkpoints.
WeakStrongReport weak_strong_bound_1d(const SimulationResult& weak, const SimulationResult& strong, double epsilon,
                                      const DistanceOptions& opts = {});

/// Distance between matched snapshots using a paired-index subsample.
double snapshot_distance(const ParticleEnsemble& a, const ParticleEnsemble& b, int order, const DistanceOptions& opts);

}  // namespace vpme
