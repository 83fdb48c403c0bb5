#include "vpme/field_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vpme/error.hpp"
#include "vpme/geometry.hpp"
#include "vpme/ot.hpp"

namespace vpme {

LpBoundReport verify_lp_bound(const GridDensity& rho, const PotentialField& U, double p, double rel_slack) {
  if (!rho.rho.same_shape(U.U)) fail(ErrorCode::DimensionMismatch, "density and potential grids differ");
  PeriodicGrid eU = U.U;
  for (double& x : eU.values()) x = std::exp(x);
  LpBoundReport r;
  r.p = p;
  r.lhs = eU.lp_norm(p);
  r.rhs = rho.rho.lp_norm(p);
  r.holds = r.lhs <= r.rhs * (1.0 + rel_slack);
  return r;
}

namespace {

/// ‖∇u‖_{L²} on the Fourier side, consistent with the spectral Laplacian.
double gradient_l2(const PeriodicGrid& u) { return std::sqrt(2.0 * spectral::gradient_energy(u, 1.0)); }

}  // namespace

ParticleEnsemble quantize_density(const GridDensity& rho, int cells) {
  const PeriodicGrid& g = rho.rho;
  const int d = g.dim();
  if (cells < 1) fail(ErrorCode::InvalidArgument, "quantization needs at least one cell");
  const std::size_t ncell = d == 1 ? std::size_t(cells) : std::size_t(cells) * cells;
  std::vector<double> mass(ncell, 0.0), c0(ncell, 0.0), c1(ncell, 0.0);
  auto cell_of = [&](double x) { return std::min(cells - 1, static_cast<int>(std::floor((x + 0.5) * cells))); };
  auto centre = [&](int k) { return -0.5 + (k + 0.5) / cells; };
  const double vol = g.cell_volume();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double x0 = g.node_coord(idx, 0);
    const int k0 = cell_of(x0);
    std::size_t cell = static_cast<std::size_t>(k0);
    double x1 = 0.0;
    int k1 = 0;
    if (d == 2) {
      x1 = g.node_coord(idx, 1);
      k1 = cell_of(x1);
      cell = cell * static_cast<std::size_t>(cells) + static_cast<std::size_t>(k1);
    }
    const double m = g[idx] * vol;
    mass[cell] += m;
    c0[cell] += m * torus_delta(x0, centre(k0));
    if (d == 2) c1[cell] += m * torus_delta(x1, centre(k1));
  }
  double total = 0.0;
  for (double m : mass) total += std::max(0.0, m);
  ParticleEnsemble q;
  q.dim = d;
  q.epsilon = 1.0;
  for (std::size_t cell = 0; cell < ncell; ++cell) {
    if (!(mass[cell] > 0.0)) continue;
    const int k0 = d == 1 ? static_cast<int>(cell) : static_cast<int>(cell / std::size_t(cells));
    q.positions.push_back(wrap_coord(centre(k0) + c0[cell] / mass[cell]));
    q.velocities.push_back(0.0);
    if (d == 2) {
      const int k1 = static_cast<int>(cell % std::size_t(cells));
      q.positions.push_back(wrap_coord(centre(k1) + c1[cell] / mass[cell]));
      q.velocities.push_back(0.0);
    }
    q.weights.push_back(mass[cell] / total);
  }
  q.winding.assign(q.positions.size(), 0);
  return q;
}

FieldStabilityReport verify_field_stability(const GridDensity& rho1, const GridDensity& rho2, double epsilon,
                                            const FieldStabilityOptions& opts) {
  if (!rho1.rho.same_shape(rho2.rho)) fail(ErrorCode::DimensionMismatch, "densities live on different grids");
  const double m1 = rho1.rho.integral(), m2 = rho2.rho.integral();
  if (std::abs(m1 - m2) > 1e-10 * std::max(1.0, m1)) {
    fail(ErrorCode::UnequalMass, "field stability needs equal masses");
  }
  SolverOptions so;
  so.tol = opts.tol;
  const PotentialField U1 = solve_poisson_boltzmann(rho1.rho, epsilon, so);
  const PotentialField U2 = solve_poisson_boltzmann(rho2.rho, epsilon, so);
  PeriodicGrid dU = U1.U, dh = rho1.rho;
  for (std::size_t i = 0; i < dU.size(); ++i) {
    dU[i] -= U2.U[i];
    dh[i] -= rho2.rho[i];
  }
  FieldStabilityReport r;
  r.lhs = gradient_l2(dU);
  r.h_minus1 = spectral::negative_sobolev_norm(dh);
  const double inv = 1.0 / (epsilon * epsilon);
  r.l2_rhs = inv * r.h_minus1;
  r.l2_holds = r.lhs <= r.l2_rhs * (1.0 + opts.l2_rel_slack) + 1e-14;

  const int cells = rho1.dim() == 1 ? 200 : opts.quantization_cells;
  const ParticleEnsemble q1 = quantize_density(rho1, cells);
  const ParticleEnsemble q2 = quantize_density(rho2, cells);
  r.quantization_points = std::max(q1.size(), q2.size());
  r.w2 = wasserstein(q1, q2, 2).value;
  r.rho_sup = std::max(rho1.rho.max(), rho2.rho.max());
  r.loeper_rhs = inv * std::sqrt(r.rho_sup) * r.w2;
  r.loeper_holds = r.lhs <= r.loeper_rhs + opts.loeper_abs_slack;
  return r;
}

RegularStabilityReport verify_1d_regular_stability(const ParticleEnsemble& f1, const ParticleEnsemble& f2,
                                                   double epsilon, int resolution, double abs_slack) {
  if (f1.dim != 1 || f2.dim != 1) fail(ErrorCode::DimensionMismatch, "regular-part stability requires d = 1");
  const FieldSplit1D s1 = split_field_1d(f1, epsilon, resolution);
  const FieldSplit1D s2 = split_field_1d(f2, epsilon, resolution);
  PeriodicGrid d = s1.U_hat;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= s2.U_hat[i];
  RegularStabilityReport r;
  r.lhs = gradient_l2(d);
  r.w1 = circle_w1(f1.positions, f1.weights, f2.positions, f2.weights);
  r.rhs = 0.25 * std::pow(epsilon, -3.0) * r.w1;
  r.holds = r.lhs <= r.rhs + abs_slack;
  r.residual = std::max(s1.residual_norm, s2.residual_norm);
  return r;
}

LogLipschitzReport field_log_lipschitz_modulus(const PotentialField& U, double rho_sup) {
  if (U.dim() != 2) fail(ErrorCode::DimensionMismatch, "log-Lipschitz modulus is measured in d = 2");
  const int n = U.U.n();
  if (n < 32) fail(ErrorCode::InvalidArgument, "log-Lipschitz sampling needs n >= 32");
  LogLipschitzReport r;
  r.epsilon = U.epsilon;
  r.rho_sup = rho_sup;
  const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (int sep_inv : {32, 16, 8, 4}) {
    const int shift = n / sep_inv;
    for (const auto& dir : dirs) {
      const double len = std::hypot(dir[0], dir[1]) / sep_inv;
      const double denom = len * (1.0 + std::abs(std::log(len)));
      for (int i0 = 0; i0 < n; ++i0) {
        for (int i1 = 0; i1 < n; ++i1) {
          const std::size_t a = U.U.flat_index(i0, i1);
          const std::size_t b = U.U.flat_index(i0 + dir[0] * shift, i1 + dir[1] * shift);
          const double dx = U.E[0][a] - U.E[0][b];
          const double dy = U.E[1][a] - U.E[1][b];
          r.modulus = std::max(r.modulus, std::hypot(dx, dy) / denom);
          ++r.pairs;
        }
      }
    }
  }
  r.fitted_c = r.modulus * U.epsilon * U.epsilon / std::max(rho_sup, std::numeric_limits<double>::min());
  return r;
}

}  // namespace vpme
