#include "vpme/growth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "vpme/error.hpp"

namespace vpme {

double b_function(double y) {
  if (!(y >= 0.0)) fail(ErrorCode::InvalidArgument, "b(y) needs y >= 0");
  return y / (1.0 + std::log1p(y));
}

double b_inverse_bound(double u) {
  if (!(u >= 0.0)) fail(ErrorCode::InvalidArgument, "bound needs u >= 0");
  return 2.0 * u * (1.0 + std::log1p(u));
}

InverseBoundReport verify_inverse_bound(std::size_t samples, double lo, double hi) {
  if (samples < 2 || !(lo > 0.0) || !(hi > lo)) fail(ErrorCode::InvalidArgument, "invalid sampling range");
  const auto start = std::chrono::steady_clock::now();
  InverseBoundReport r;
  r.samples = samples;
  r.worst_ratio = std::numeric_limits<double>::infinity();
  const double llo = std::log(lo), step = (std::log(hi) - llo) / static_cast<double>(samples - 1);
  for (std::size_t k = 0; k < samples; ++k) {
    const double u = std::exp(llo + step * static_cast<double>(k));
    const double val = b_function(b_inverse_bound(u));
    if (!(val >= u)) ++r.failures;
    r.worst_ratio = std::min(r.worst_ratio, val / u);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

DensityBoundReport verify_density_bound(const GridDensity& rho, const GrowthDiagnostics& diag, int dim, double k0) {
  DensityBoundReport r;
  r.rho_sup = rho.rho.max();
  r.one_plus_q = 1.0 + std::pow(diag.q_star, dim);
  r.ratio = r.rho_sup / r.one_plus_q;
  r.k0 = k0;
  return r;
}

DensityBoundSeries density_bound_series(const RunRecord& record, double slack) {
  if (record.checkpoints.empty()) fail(ErrorCode::MissingHistory, "run record has no checkpoints");
  DensityBoundSeries s;
  s.slack = slack;
  for (const auto& c : record.checkpoints) {
    s.times.push_back(c.time);
    s.ratios.push_back(c.rho_sup / (1.0 + std::pow(c.q_star, record.dim)));
  }
  s.initial_ratio = s.ratios.front();
  for (double r : s.ratios) s.worst_ratio = std::max(s.worst_ratio, r / s.initial_ratio);
  s.holds = s.worst_ratio <= slack;
  return s;
}

double growth_envelope_2d(double t, double epsilon) {
  const double e2 = 1.0 / (epsilon * epsilon);
  return (1.0 + e2 * e2 * t * t) * (1.0 + std::log1p(e2 * t));
}

Growth2DReport verify_2d_growth(const RunRecord& record, const std::vector<PotentialField>& fields, double slack) {
  if (record.dim != 2) fail(ErrorCode::DimensionMismatch, "2D growth check needs a d = 2 record");
  if (record.checkpoints.size() < 2) fail(ErrorCode::MissingHistory, "need at least two checkpoints");
  Growth2DReport r;
  r.slack = slack;
  const double eps = record.epsilon;
  const Checkpoint& first = record.checkpoints[1];
  r.fitted_c = first.rho_sup_running / growth_envelope_2d(first.time, eps);
  for (std::size_t k = 1; k < record.checkpoints.size(); ++k) {
    const Checkpoint& c = record.checkpoints[k];
    r.worst_ratio = std::max(r.worst_ratio, c.rho_sup_running / (r.fitted_c * growth_envelope_2d(c.time, eps)));
  }
  r.envelope_holds = r.worst_ratio <= slack;

  for (std::size_t k = 0; k < fields.size(); ++k) {
    const PotentialField& U = fields[k];
    // h = ε²ΔU = e^U − ρ for the solved field.
    PeriodicGrid h = spectral::laplacian(U.U);
    double hsup = 0.0;
    for (double x : h.values()) hsup = std::max(hsup, std::abs(x) * U.epsilon * U.epsilon);
    double gsup = 0.0;
    for (std::size_t i = 0; i < U.U.size(); ++i) gsup = std::max(gsup, std::hypot(U.E[0][i], U.E[1][i]));
    const double bound = (1.0 + std::sqrt(std::abs(std::log(std::max(hsup, 1e-300))))) / (U.epsilon * U.epsilon);
    const double ratio = gsup / bound;
    if (k == 0) r.field_fitted_c = ratio;
    if (r.field_fitted_c > 0.0) r.field_worst_ratio = std::max(r.field_worst_ratio, ratio / r.field_fitted_c);
  }
  r.field_holds = r.field_worst_ratio <= slack;

  r.b_increasing = true;
  double prev = -1.0;
  for (int k = 0; k <= 400; ++k) {
    const double y = std::pow(10.0, -6.0 + 12.0 * k / 400.0);
    const double b = b_function(y);
    if (!(b > prev)) r.b_increasing = false;
    prev = b;
  }
  return r;
}

}  // namespace vpme
