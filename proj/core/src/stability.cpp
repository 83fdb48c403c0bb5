#include "vpme/stability.hpp"

#include <algorithm>
#include <cmath>

#include "vpme/error.hpp"

namespace vpme {

double envelope_base_2d(double w2, double epsilon) {
  const double x = w2 * w2 / (epsilon * epsilon);
  if (!(x > 0.0)) fail(ErrorCode::InvalidArgument, "envelope needs a positive initial distance");
  return std::abs(std::log(x * std::abs(std::log(0.5 * x))));
}

double stability_envelope_2d(double w2, double epsilon, double c_d, double integral_a) {
  const double bracket = std::sqrt(envelope_base_2d(w2, epsilon)) - c_d / epsilon * integral_a;
  if (bracket <= 0.0) return 2.0;
  return 2.0 * std::exp(-bracket * bracket);
}

std::vector<double> cumulative_integral(const std::vector<double>& t, const std::vector<double>& v) {
  if (t.size() != v.size()) fail(ErrorCode::DimensionMismatch, "time and value series differ in length");
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t k = 1; k < t.size(); ++k) out[k] = out[k - 1] + 0.5 * (t[k] - t[k - 1]) * (v[k] + v[k - 1]);
  return out;
}

double snapshot_distance(const ParticleEnsemble& a, const ParticleEnsemble& b, int order, const DistanceOptions& opts) {
  return wasserstein(subsample(a, opts.max_particles), subsample(b, opts.max_particles), order, opts.method,
                     opts.sinkhorn)
      .value;
}

namespace {

void check_matched(const SimulationResult& r1, const SimulationResult& r2) {
  const auto& c1 = r1.record.checkpoints;
  const auto& c2 = r2.record.checkpoints;
  if (c1.size() != c2.size() || r1.snapshots.size() != c1.size() || r2.snapshots.size() != c2.size()) {
    fail(ErrorCode::CheckpointMismatch, "runs need snapshots at the same number of checkpoints");
  }
  for (std::size_t k = 0; k < c1.size(); ++k) {
    if (std::abs(c1[k].time - c2[k].time) > 1e-9) {
      fail(ErrorCode::CheckpointMismatch, "checkpoint " + std::to_string(k) + " times differ");
    }
  }
  if (c1.size() < 2) fail(ErrorCode::CheckpointMismatch, "at least two checkpoints are required");
}

}  // namespace

StabilityMonitorReport stability_monitor_2d(const SimulationResult& run1, const SimulationResult& run2,
                                            const TransportPlan& pi0, double epsilon, const DistanceOptions& opts) {
  if (run1.record.dim != 2 || run2.record.dim != 2) fail(ErrorCode::DimensionMismatch, "2D monitor needs d = 2 runs");
  check_matched(run1, run2);
  StabilityMonitorReport r;
  const auto& c1 = run1.record.checkpoints;
  const auto& c2 = run2.record.checkpoints;
  std::vector<double> A;
  for (std::size_t k = 0; k < c1.size(); ++k) {
    r.times.push_back(c1[k].time);
    A.push_back(c1[k].rho_sup + c2[k].rho_sup);
    r.measured_w2.push_back(snapshot_distance(run1.snapshots[k], run2.snapshots[k], 2, opts));
    r.kinetic_d.push_back(kinetic_distance(run1.snapshots[k], run2.snapshots[k], pi0, epsilon).D);
  }
  r.integral_a = cumulative_integral(r.times, A);
  const double w0 = r.measured_w2.front();
  if (w0 == 0.0) {
    r.envelope_w2.assign(r.times.size(), 0.0);
    bool zero = true;
    for (double w : r.measured_w2) zero = zero && w == 0.0;
    r.holds = zero;
    return r;
  }
  const double L0 = envelope_base_2d(w0, epsilon);
  for (std::size_t k = 1; k < r.times.size(); ++k) {
    const double w2sq = r.measured_w2[k] * r.measured_w2[k];
    if (w2sq > 2.0 * std::exp(-L0) && r.integral_a[k] > 0.0) {
      const double target = w2sq < 2.0 ? std::sqrt(std::log(2.0 / w2sq)) : 0.0;
      r.fitted_cd = std::max(0.0, epsilon * (std::sqrt(L0) - target) / r.integral_a[k]);
      r.fit_index = static_cast<int>(k);
      break;
    }
  }
  r.holds = true;
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    const double env = stability_envelope_2d(w0, epsilon, r.fitted_cd, r.integral_a[k]);
    r.envelope_w2.push_back(std::sqrt(env));
    if (k > 0 && r.measured_w2[k] * r.measured_w2[k] > env * (1.0 + 1e-9)) r.holds = false;
  }
  return r;
}

double weak_strong_rhs(double w1, double epsilon, double c, double integral) {
  return std::exp(c * integral) * w1 / (epsilon * epsilon);
}

WeakStrongReport weak_strong_bound_1d(const SimulationResult& weak, const SimulationResult& strong, double epsilon,
                                      const DistanceOptions& opts) {
  if (weak.record.dim != 1 || strong.record.dim != 1) fail(ErrorCode::DimensionMismatch, "weak-strong bound needs d = 1");
  check_matched(weak, strong);
  WeakStrongReport r;
  const auto& cs = strong.record.checkpoints;
  std::vector<double> a;
  const double inv = 1.0 / (epsilon * epsilon);
  for (std::size_t k = 0; k < cs.size(); ++k) {
    r.times.push_back(cs[k].time);
    a.push_back(cs[k].rho_sup + inv);
    r.measured_w1.push_back(snapshot_distance(weak.snapshots[k], strong.snapshots[k], 1, opts));
  }
  r.integral = cumulative_integral(r.times, a);
  const double w0 = r.measured_w1.front();
  if (w0 > 0.0 && r.measured_w1[1] > 0.0) {
    r.fitted_c = std::max(0.0, std::log(epsilon * epsilon * r.measured_w1[1] / w0) / r.integral[1]);
  }
  r.holds = true;
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    r.rhs.push_back(weak_strong_rhs(w0, epsilon, r.fitted_c, r.integral[k]));
    if (r.measured_w1[k] > r.rhs[k] * (1.0 + 1e-12)) r.holds = false;
  }
  return r;
}

}  // namespace vpme
