#include "vpme/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vpme/error.hpp"
#include "vpme/geometry.hpp"

namespace vpme {
namespace {

constexpr double kExpCap = 700.0;

double dot(const PeriodicGrid& a, const PeriodicGrid& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sup_abs(const PeriodicGrid& a) {
  double m = 0.0;
  for (double x : a.values()) m = std::max(m, std::abs(x));
  return m;
}

double rms(const PeriodicGrid& a) { return std::sqrt(dot(a, a) / static_cast<double>(a.size())); }

/// F(W) = ε²ΔW − e^{W+B} + h.
PeriodicGrid residual(const PeriodicGrid& W, const PeriodicGrid* B, const PeriodicGrid& h, double eps2) {
  PeriodicGrid F = spectral::laplacian(W);
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double s = W[i] + (B ? (*B)[i] : 0.0);
    F[i] = eps2 * F[i] - std::exp(s) + h[i];
  }
  return F;
}

/// Preconditioned CG for (−ε²Δ + diag a) x = b.
PeriodicGrid solve_linearized(const PeriodicGrid& a, const PeriodicGrid& b, double eps2,
                              const SolverOptions& opts) {
  const double abar = a.mean();
  auto apply = [&](const PeriodicGrid& x) {
    PeriodicGrid y = spectral::laplacian(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = -eps2 * y[i] + a[i] * x[i];
    return y;
  };
  PeriodicGrid x(b.dim(), b.n());
  PeriodicGrid r = b;
  PeriodicGrid z = spectral::solve_screened(r, eps2, abar);
  PeriodicGrid p = z;
  double rz = dot(r, z);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) return x;
  for (int it = 0; it < opts.cg_max_iterations; ++it) {
    const PeriodicGrid Ap = apply(p);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) break;
    const double alpha = rz / pAp;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    if (std::sqrt(dot(r, r)) <= opts.cg_rel_tol * bnorm) break;
    z = spectral::solve_screened(r, eps2, abar);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  return x;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    fail(ErrorCode::InvalidArgument, "epsilon must be positive, got " + std::to_string(epsilon));
  }
}

}  // namespace

NewtonSolve solve_shifted(const PeriodicGrid& h, const PeriodicGrid* shift, double epsilon,
                          const SolverOptions& opts, PeriodicGrid guess) {
  check_epsilon(epsilon);
  if (!guess.same_shape(h) || (shift && !shift->same_shape(h))) {
    fail(ErrorCode::DimensionMismatch, "grids passed to the field solver differ in shape");
  }
  const double eps2 = epsilon * epsilon;
  NewtonSolve out;
  out.W = std::move(guess);
  PeriodicGrid F = residual(out.W, shift, h, eps2);
  double r2 = rms(F);
  out.residual_history.push_back(r2);
  for (int it = 0;; ++it) {
    out.residual_norm = sup_abs(F);
    if (!std::isfinite(out.residual_norm)) {
      fail(ErrorCode::NewtonDivergence, "non-finite residual in Newton iteration " + std::to_string(it));
    }
    if (out.residual_norm <= opts.tol) break;
    if (it >= opts.max_iterations) {
      fail(ErrorCode::NewtonDivergence,
           "Newton did not converge after " + std::to_string(it) +
               " iterations; last residual " + std::to_string(out.residual_norm));
    }
    PeriodicGrid a(h.dim(), h.n());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::exp(out.W[i] + (shift ? (*shift)[i] : 0.0));
    const PeriodicGrid delta = solve_linearized(a, F, eps2, opts);

    double step = 1.0;
    bool accepted = false;
    PeriodicGrid trial(h.dim(), h.n());
    PeriodicGrid Ft;
    while (step > 1e-12) {
      bool ok = true;
      for (std::size_t i = 0; i < trial.size(); ++i) {
        trial[i] = out.W[i] + step * delta[i];
        if (trial[i] + (shift ? (*shift)[i] : 0.0) > kExpCap) ok = false;
      }
      if (ok) {
        Ft = residual(trial, shift, h, eps2);
        const double r2t = rms(Ft);
        if (std::isfinite(r2t) && r2t <= (1.0 - 1e-4 * step) * r2) {
          r2 = r2t;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Roundoff floor: no descent possible from here.
      if (out.residual_norm <= 1e3 * opts.tol) break;
      fail(ErrorCode::NewtonDivergence,
           "line search stalled at iteration " + std::to_string(it) + "; last residual " +
               std::to_string(out.residual_norm));
    }
    out.W = std::move(trial);
    trial = PeriodicGrid(h.dim(), h.n());
    F = std::move(Ft);
    out.residual_history.push_back(r2);
    out.iterations = it + 1;
  }
  return out;
}

double pb_residual(const PeriodicGrid& U, const PeriodicGrid& rho, double epsilon) {
  return sup_abs(residual(U, nullptr, rho, epsilon * epsilon));
}

PotentialField solve_poisson_boltzmann(const PeriodicGrid& rho, double epsilon,
                                       const SolverOptions& opts, const PeriodicGrid* guess) {
  check_epsilon(epsilon);
  if (rho.dim() < 1 || rho.dim() > 2) fail(ErrorCode::DimensionMismatch, "field solver supports d = 1, 2");
  if (!(opts.tol >= 1e-14)) fail(ErrorCode::InvalidArgument, "tolerance must be >= 1e-14");
  for (double r : rho.values()) {
    if (!std::isfinite(r)) fail(ErrorCode::NonFinite, "density contains non-finite values");
    if (r < -1e-12) fail(ErrorCode::NegativeDensity, "density has negative entry " + std::to_string(r));
  }
  PeriodicGrid start(rho.dim(), rho.n());
  if (guess) {
    if (!guess->same_shape(rho)) fail(ErrorCode::DimensionMismatch, "initial guess shape differs from rho");
    start = *guess;
  } else {
    for (std::size_t i = 0; i < start.size(); ++i) start[i] = std::log(std::max(rho[i], opts.density_floor));
  }
  NewtonSolve s = solve_shifted(rho, nullptr, epsilon, opts, std::move(start));
  PotentialField out;
  out.E = spectral::gradient(s.W);
  for (auto& c : out.E) {
    for (double& x : c.values()) x = -x;
  }
  out.U = std::move(s.W);
  out.epsilon = epsilon;
  out.residual_norm = s.residual_norm;
  out.iterations = s.iterations;
  out.residual_history = std::move(s.residual_history);
  return out;
}

PotentialField solve_poisson_boltzmann(const GridDensity& rho, double epsilon, double tol) {
  SolverOptions opts;
  opts.tol = tol;
  return solve_poisson_boltzmann(rho.rho, epsilon, opts);
}

double green_1d(double y) noexcept {
  const double d = torus_delta(y, 0.0);
  return 0.5 * (d * d - std::abs(d));
}

double green_1d_derivative(double y) noexcept {
  const double d = torus_delta(y, 0.0);
  if (d == 0.0) return 0.0;
  return d - (d > 0.0 ? 0.5 : -0.5);
}

PeriodicGrid FieldSplit1D::U() const {
  PeriodicGrid u = U_bar;
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += U_hat[i];
  return u;
}

namespace {

void finish_split(FieldSplit1D& s, double tol) {
  SolverOptions opts;
  opts.tol = tol;
  const int n = s.U_bar.n();
  PeriodicGrid one(1, n, 1.0);
  NewtonSolve hat = solve_shifted(one, &s.U_bar, s.epsilon, opts, PeriodicGrid(1, n));
  s.U_hat = std::move(hat.W);
  s.residual_norm = hat.residual_norm;
  s.E_hat = spectral::derivative(s.U_hat, 0);
  for (double& x : s.E_hat.values()) x = -x;
  s.hat_lipschitz = sup_abs(spectral::laplacian(s.U_hat));
}

}  // namespace

FieldSplit1D split_field_1d(const ParticleEnsemble& f, double epsilon, int resolution, double tol) {
  if (f.dim != 1) fail(ErrorCode::DimensionMismatch, "split_field_1d requires d = 1");
  check_epsilon(epsilon);
  if (resolution < 8 || (resolution & (resolution - 1)) != 0) {
    fail(ErrorCode::ResolutionNotPowerOfTwo, "split resolution must be a power of two >= 8");
  }
  FieldSplit1D s;
  s.epsilon = epsilon;
  s.U_bar = PeriodicGrid(1, resolution);
  s.E_bar = PeriodicGrid(1, resolution);
  const double inv = 1.0 / (epsilon * epsilon);
  for (std::size_t j = 0; j < s.U_bar.size(); ++j) {
    const double x = s.U_bar.node_coord(j, 0);
    double g = 0.0, dg = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double y = x - f.positions[i];
      g += f.weights[i] * green_1d(y);
      dg += f.weights[i] * green_1d_derivative(y);
    }
    s.U_bar[j] = inv * (g + 1.0 / 12.0);
    s.E_bar[j] = -inv * dg;
  }
  finish_split(s, tol);
  return s;
}

FieldSplit1D split_field_1d(const GridDensity& rho, double epsilon, double tol) {
  if (rho.dim() != 1) fail(ErrorCode::DimensionMismatch, "split_field_1d requires d = 1");
  check_epsilon(epsilon);
  FieldSplit1D s;
  s.epsilon = epsilon;
  s.U_bar = spectral::solve_screened(rho.rho, epsilon * epsilon, 0.0);
  s.E_bar = spectral::derivative(s.U_bar, 0);
  for (double& x : s.E_bar.values()) x = -x;
  finish_split(s, tol);
  return s;
}

double singular_field_at(const ParticleEnsemble& f, double x, double epsilon) {
  if (f.dim != 1) fail(ErrorCode::DimensionMismatch, "singular_field_at requires d = 1");
  double dg = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) dg += f.weights[i] * green_1d_derivative(x - f.positions[i]);
  return -dg / (epsilon * epsilon);
}

}  // namespace vpme
