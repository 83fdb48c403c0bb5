#pragma once

// Particle-in-cell integration of the VPME characteristics
//   Ẋ = V,  V̇ = E(X),  ε²ΔU = e^U − ρ,  E = −∇U,
// by kick-drift-kick leapfrog with one field solve per step.

#include <cstdint>
#include <functional>
#include <vector>

#include "vpme/field.hpp"
#include "vpme/measures.hpp"
#include "vpme/run_record.hpp"

namespace vpme {

enum class ForceScheme {
  /// CIC interpolation of the spectral field E = −∇U (momentum conserving).
  Spectral,
  /// Exact gradient of the CIC-interpolated potential (energy conserving).
  PotentialGradient,
  /// Cubic B-spline deposit with the exact gradient of the spline-interpolated
  /// potential. Energy conserving with a C¹ force, so the leapfrog error is
  /// visible above particle noise.
  CubicSpline,
};


struct SimParams {
  double epsilon = 0.5;
  double dt = 0.05;
  double t_end = 1.0;
  int grid_resolution = 64;
  int dim = 1;
  std::uint64_t seed = 1;
  double k0 = 3.0;
  /// Trajectories are stored every `store_stride` steps.
  int store_stride = 1;
  /// Checkpoints are recorded every `checkpoint_stride` steps (and at t_end).
  int checkpoint_stride = 1;
  ForceScheme force = ForceScheme::Spectral;
  double solver_tol = 1e-10;
  /// dt ≤ dt_cap_factor · ε is enforced by `validate`.
  double dt_cap_factor = 0.1;

  std::int64_t steps() const;
  /// Throws Error(InvalidArgument) on violations of the step-size cap or a
  /// non-integral t_end/dt.
  void validate() const;
};

/// Stored characteristics. Rows are stored steps; each row holds N·d values.
struct TrajectorySet {
  int dim = 1;
  std::size_t particles = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> lifted_positions;
  std::vector<std::vector<double>> velocities;
  /// |E(X_i)| as seen by the integrator at each stored step.
  std::vector<std::vector<double>> field_magnitude;
  std::vector<double> v0;

  /// Index of the stored step at time t; throws OutOfRange when absent.
  std::size_t index_at(double t) const;
  /// Ensemble view of stored step k (positions wrapped, windings kept).
  ParticleEnsemble ensemble_at(std::size_t k, const std::vector<double>& weights, double epsilon) const;
};

struct GrowthDiagnostics {
  double q_star = 0.0;
  double q_incr = 0.0;
  double A = 0.0;
  double rho_sup = 0.0;
};

/// Density seen by the field solve: CIC for the first two schemes, cubic
/// B-spline for CubicSpline. Both conserve mass exactly.
GridDensity deposit_for(const ParticleEnsemble& f, int resolution, ForceScheme scheme);

/// Accelerations for every particle from a solved potential.
std::vector<double> particle_field(const ParticleEnsemble& f, const PotentialField& U, ForceScheme scheme);

/// One full kick-drift-kick step (two field solves, no caching).
ParticleEnsemble step(const ParticleEnsemble& f, const SimParams& params);

struct SimulationResult {
  RunRecord record;
  TrajectorySet trajectories;
  ParticleEnsemble final_state;
  std::vector<ParticleEnsemble> snapshots;  // at each checkpoint, if requested
  std::vector<PotentialField> fields;       // at each checkpoint, if requested
};

struct MonitorSet {
  bool trajectories = true;
  bool snapshots = false;
  bool fields = false;
  /// Called after each checkpoint with the current ensemble.
  std::function<void(const ParticleEnsemble&, Checkpoint&)> on_checkpoint;
};

/// Invariants every run must satisfy: Q(t,t) ≥ Q_*(t) up to `slack` (relative,
/// roundoff in the trapezoid sums) and Σw identical at every checkpoint.
/// `simulate` appends these to its record.
std::vector<Verdict> run_invariants(const RunRecord& record, double slack = 1e-12);

SimulationResult simulate(const ParticleEnsemble& f0, const SimParams& params, const MonitorSet& monitors = {});

/// max_i |V_i(t) − v_i| at a stored time.
double q_star(const TrajectorySet& traj, double t);
/// Discrete sup of q_star over stored times in [0, t].
double q_star_running(const TrajectorySet& traj, double t);
/// max_i ∫_{t−δ}^t |E(X_i(s))| ds by the trapezoid rule on stored samples.
double q_increment(const TrajectorySet& traj, double t, double delta);

}  // namespace vpme
