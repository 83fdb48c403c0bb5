#pragma once

// Poisson–Boltzmann solver ε²ΔU = e^U − ρ on T^d (d = 1, 2) and the 1D
// splitting U = Ū + Û into a linear singular part and a smooth remainder.

#include <vector>

#include "vpme/grid.hpp"
#include "vpme/measures.hpp"
#include "vpme/potential.hpp"

namespace vpme {

struct SolverOptions {
  double tol = 1e-10;          // sup-norm residual target
  int max_iterations = 80;     // Newton iterations
  double density_floor = 1e-8; // initial guess U0 = log(max(ρ, floor))
  double cg_rel_tol = 1e-13;
  int cg_max_iterations = 500;
};

PotentialField solve_poisson_boltzmann(const GridDensity& rho, double epsilon, double tol = 1e-10);
/// Full-control entry point. `guess`, when given, replaces the log ρ warm start.
PotentialField solve_poisson_boltzmann(const PeriodicGrid& rho, double epsilon,
                                       const SolverOptions& opts,
                                       const PeriodicGrid* guess = nullptr);

/// ‖ε²ΔU − e^U + ρ‖_∞.
double pb_residual(const PeriodicGrid& U, const PeriodicGrid& rho, double epsilon);

/// Newton core for ε²ΔW = e^{W+B} − h. `shift` (B) may be null.
struct NewtonSolve {
  PeriodicGrid W;
  double residual_norm = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
};
NewtonSolve solve_shifted(const PeriodicGrid& h, const PeriodicGrid* shift, double epsilon,
                          const SolverOptions& opts, PeriodicGrid guess);

/// G₁(y) = (y² − |y|)/2 on the minimal-image difference, so that −G₁″ = δ₀ − 1.
double green_1d(double y) noexcept;
/// G₁′(y) = y − sign(y)/2, with G₁′(0) = 0 (mean of the one-sided limits).
double green_1d_derivative(double y) noexcept;

struct FieldSplit1D {
  PeriodicGrid U_bar;  // −ε²Ū″ = ρ − 1, ∫Ū = 0
  PeriodicGrid U_hat;  // ε²Û″ = e^{Ū+Û} − 1
  PeriodicGrid E_bar;  // −Ū′
  PeriodicGrid E_hat;  // −Û′
  double epsilon = 0.0;
  double residual_norm = 0.0;   // sup residual of the Û equation
  double hat_lipschitz = 0.0;   // max |Û″|, compared against ε⁻⁴
  PeriodicGrid U() const;
};

/// Splitting for particle data: Ū and Ē are evaluated from the exact kernel
/// at the grid nodes, Û is solved on an N-point grid.
FieldSplit1D split_field_1d(const ParticleEnsemble& f, double epsilon, int resolution,
                            double tol = 1e-11);
/// Splitting for grid data; Ū comes from a spectral Poisson solve.
FieldSplit1D split_field_1d(const GridDensity& rho, double epsilon, double tol = 1e-11);

/// Ē(x) = −ε⁻² Σ w_i G₁′(x − x_i), evaluated exactly.
double singular_field_at(const ParticleEnsemble& f, double x, double epsilon);

}  // namespace vpme
