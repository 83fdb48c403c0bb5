#pragma once

// Density-growth diagnostics: the ‖ρ‖_∞ / (1 + Q_*^d) ratio, the 2D growth
// envelope with fitted constants, and the function b(y) = y/(1 + log(1 + y)).

#include <cstddef>
#include <vector>

#include "vpme/dynamics.hpp"
#include "vpme/measures.hpp"
#include "vpme/potential.hpp"
#include "vpme/run_record.hpp"

namespace vpme {

double b_function(double y);
/// 2u(1 + log(1 + u)), an upper bound for b⁻¹(u).
double b_inverse_bound(double u);

struct InverseBoundReport {
  std::size_t samples = 0;
  std::size_t failures = 0;
  double worst_ratio = 0.0;  // min over u of b(bound(u)) / u
  double seconds = 0.0;
};

/// Checks b(b_inverse_bound(u)) ≥ u on log-spaced u ∈ [lo, hi].
InverseBoundReport verify_inverse_bound(std::size_t samples = 1'000'000, double lo = 1e-6, double hi = 1e6);

struct DensityBoundReport {
  double rho_sup = 0.0;
  double one_plus_q = 0.0;  // 1 + Q_*^d
  double ratio = 0.0;
  double k0 = 0.0;
};

DensityBoundReport verify_density_bound(const GridDensity& rho, const GrowthDiagnostics& diag, int dim, double k0);

struct DensityBoundSeries {
  std::vector<double> times;
  std::vector<double> ratios;
  double initial_ratio = 0.0;
  double worst_ratio = 0.0;  // max ratio(t) / ratio(0)
  double slack = 4.0;
  bool holds = false;
};

/// ratio(t) ≤ slack · ratio(0) along a run record.
DensityBoundSeries density_bound_series(const RunRecord& record, double slack = 4.0);

/// (1 + ε⁻⁴t²)(1 + log(1 + ε⁻²t)).
double growth_envelope_2d(double t, double epsilon);

struct Growth2DReport {
  double fitted_c = 0.0;          // envelope constant, fitted at the first positive checkpoint
  double worst_ratio = 0.0;       // max sup ρ / (C · envelope)
  bool envelope_holds = false;    // worst_ratio ≤ slack
  double field_fitted_c = 0.0;    // constant in ‖∇U‖_∞ ≤ C ε⁻²(1 + |log‖h‖_∞|^{1/2})
  double field_worst_ratio = 0.0;
  bool field_holds = true;
  bool b_increasing = false;
  double slack = 4.0;
};

/// Requires a d = 2 record; `fields` (one per checkpoint) may be empty.
Growth2DReport verify_2d_growth(const RunRecord& record, const std::vector<PotentialField>& fields,
                                double slack = 4.0);

}  // namespace vpme
