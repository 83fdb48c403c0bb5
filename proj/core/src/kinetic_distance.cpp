#include "vpme/kinetic_distance.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "vpme/error.hpp"
#include "vpme/geometry.hpp"

namespace vpme {

KineticDistanceState solve_kinetic_distance(double P, double V, double epsilon) {
  if (!(P >= 0.0) || !(V >= 0.0) || !std::isfinite(P) || !std::isfinite(V)) {
    fail(ErrorCode::InvalidArgument, "position and velocity parts must be finite and nonnegative");
  }
  if (!(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
  KineticDistanceState s;
  s.position_part = P;
  s.velocity_part = V;
  const double inv = 1.0 / (epsilon * epsilon);
  if (P == 0.0) {
    s.D = std::min(V, std::nextafter(1.0, 0.0));
    s.lambda = s.D > 0.0 ? inv * std::abs(std::log(s.D)) : 0.0;
    s.residual = std::abs(V - s.D);
    return s;
  }
  auto G = [&](double D) { return inv * std::abs(std::log(D)) * P + V - D; };
  double lo = 1e-300, hi = std::nextafter(1.0, 0.0);
  const double glo = G(lo), ghi = G(hi);
  if (!(glo > 0.0) || !(ghi < 0.0)) {
    fail(ErrorCode::NoRoot, "G has no sign change on (1e-300, 1): G(lo) = " + std::to_string(glo) +
                                ", G(hi) = " + std::to_string(ghi));
  }
  double mid = lo;
  double gmid = glo;
  for (int it = 0; it < 4000; ++it) {
    mid = hi / lo > 4.0 ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
    gmid = G(mid);
    s.iterations = it + 1;
    if (std::abs(gmid) <= 1e-12) break;
    if (gmid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  s.D = mid;
  s.lambda = inv * std::abs(std::log(mid));
  s.residual = std::abs(gmid);
  return s;
}

namespace {

KineticDistanceState from_rows(const std::vector<double>& x1, const std::vector<double>& v1,
                               const std::vector<double>& x2, const std::vector<double>& v2, int d,
                               const TransportPlan& pi0, double epsilon) {
  double P = 0.0, V = 0.0;
  const auto dd = static_cast<std::size_t>(d);
  for (const auto& e : pi0.pairs) {
    if ((e.i + 1) * dd > x1.size() || (e.j + 1) * dd > x2.size()) {
      fail(ErrorCode::DimensionMismatch, "coupling index outside the trajectory sets");
    }
    const std::span<const double> a(x1.data() + e.i * dd, dd), b(x2.data() + e.j * dd, dd);
    P += e.mass * torus_distance_sq(a, b);
    for (std::size_t k = 0; k < dd; ++k) {
      const double dv = v1[e.i * dd + k] - v2[e.j * dd + k];
      V += e.mass * dv * dv;
    }
  }
  return solve_kinetic_distance(0.5 * P, 0.5 * V, epsilon);
}

}  // namespace

KineticDistanceState kinetic_distance(const TrajectorySet& t1, const TrajectorySet& t2, const TransportPlan& pi0,
                                      double epsilon, double t) {
  if (t1.dim != t2.dim) fail(ErrorCode::DimensionMismatch, "trajectory sets differ in dimension");
  const std::size_t k1 = t1.index_at(t), k2 = t2.index_at(t);
  return from_rows(t1.lifted_positions[k1], t1.velocities[k1], t2.lifted_positions[k2], t2.velocities[k2], t1.dim,
                   pi0, epsilon);
}

KineticDistanceState kinetic_distance(const ParticleEnsemble& f1, const ParticleEnsemble& f2,
                                      const TransportPlan& pi0, double epsilon) {
  if (f1.dim != f2.dim) fail(ErrorCode::DimensionMismatch, "ensembles differ in dimension");
  return from_rows(f1.positions, f1.velocities, f2.positions, f2.velocities, f1.dim, pi0, epsilon);
}

}  // namespace vpme
