#pragma once

// The implicit kinetic-Wasserstein functional D(t): the unique D ∈ [0, 1) with
//   D = ε⁻²|log D| · P + V,
//   P = ½ Σ π₀(i,j) |X₁,i(t) − X₂,j(t)|²_T,  V = ½ Σ π₀(i,j) |V₁,i(t) − V₂,j(t)|².

#include "vpme/dynamics.hpp"
#include "vpme/ot.hpp"

namespace vpme {

struct KineticDistanceState {
  double D = 0.0;
  double lambda = 0.0;  // ε⁻²|log D|
  double position_part = 0.0;
  double velocity_part = 0.0;
  double residual = 0.0;  // |G(D)|
  int iterations = 0;
};

/// Root of G(D) = ε⁻²|log D| P + V − D by bisection on (1e-300, 1⁻), using
/// geometric midpoints while the bracket spans orders of magnitude.
KineticDistanceState solve_kinetic_distance(double position_part, double velocity_part, double epsilon);

/// Evaluates P and V at stored time t of both trajectory sets under π₀.
KineticDistanceState kinetic_distance(const TrajectorySet& traj1, const TrajectorySet& traj2,
                                      const TransportPlan& pi0, double epsilon, double t);

/// Same functional from two ensembles at a common time.
KineticDistanceState kinetic_distance(const ParticleEnsemble& f1, const ParticleEnsemble& f2,
                                      const TransportPlan& pi0, double epsilon);

}  // namespace vpme
