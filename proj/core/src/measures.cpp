#include "vpme/measures.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vpme/error.hpp"

namespace vpme {

void ParticleEnsemble::validate() const {
  if (dim < 1 || dim > 2) fail(ErrorCode::InvalidEnsemble, "dimension must be 1 or 2");
  const std::size_t n = weights.size();
  const auto d = static_cast<std::size_t>(dim);
  if (positions.size() != n * d || velocities.size() != n * d) {
    fail(ErrorCode::InvalidEnsemble, "position/velocity arrays do not match weight count");
  }
  if (!winding.empty() && winding.size() != n * d) {
    fail(ErrorCode::InvalidEnsemble, "winding array does not match positions");
  }
  if (n == 0) fail(ErrorCode::InvalidEnsemble, "empty ensemble");
  if (!(epsilon > 0.0)) fail(ErrorCode::InvalidEnsemble, "epsilon must be positive");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) fail(ErrorCode::InvalidEnsemble, "weights must be positive and finite");
    total += w;
  }
  // Naive summation of n equal weights drifts by up to n·u.
  const double tol = 1e-12 + static_cast<double>(n) * std::numeric_limits<double>::epsilon();
  if (std::abs(total - 1.0) > tol) {
    fail(ErrorCode::InvalidEnsemble, "total mass " + std::to_string(total) + " differs from 1");
  }
  for (double x : positions) {
    if (!std::isfinite(x) || x < -0.5 || x >= 0.5) fail(ErrorCode::InvalidEnsemble, "position outside [-1/2,1/2)");
  }
  for (double v : velocities) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFinite, "velocity is not finite");
  }
}

ParticleEnsemble ParticleEnsemble::with_equal_weights(int dim, std::size_t n, double epsilon) {
  ParticleEnsemble f;
  f.dim = dim;
  f.epsilon = epsilon;
  const auto d = static_cast<std::size_t>(dim);
  f.positions.assign(n * d, 0.0);
  f.velocities.assign(n * d, 0.0);
  f.winding.assign(n * d, 0);
  f.weights.assign(n, 1.0 / static_cast<double>(n));
  return f;
}

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct CicStencil {
  int j = 0;          // left node
  double frac = 0.0;  // weight of the right node
};

CicStencil stencil(double x, int n) {
  const double s = (x + 0.5) * n;
  double fl = std::floor(s);
  CicStencil st;
  st.frac = s - fl;
  st.j = static_cast<int>(fl);
  st.j = ((st.j % n) + n) % n;
  return st;
}

}  // namespace

GridDensity deposit_density(const ParticleEnsemble& f, int resolution) {
  if (resolution < 8 || !is_power_of_two(resolution)) {
    fail(ErrorCode::ResolutionNotPowerOfTwo,
         "deposit resolution must be a power of two >= 8, got " + std::to_string(resolution));
  }
  GridDensity out{PeriodicGrid(f.dim, resolution), 0.0};
  PeriodicGrid& g = out.rho;
  const double inv_vol = 1.0 / g.cell_volume();
  const std::size_t n = f.size();
  if (f.dim == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const CicStencil s = stencil(f.positions[i], resolution);
      const double w = f.weights[i] * inv_vol;
      g[g.flat_index(s.j)] += w * (1.0 - s.frac);
      g[g.flat_index(s.j + 1)] += w * s.frac;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const CicStencil a = stencil(f.positions[2 * i], resolution);
      const CicStencil b = stencil(f.positions[2 * i + 1], resolution);
      const double w = f.weights[i] * inv_vol;
      g[g.flat_index(a.j, b.j)] += w * (1.0 - a.frac) * (1.0 - b.frac);
      g[g.flat_index(a.j + 1, b.j)] += w * a.frac * (1.0 - b.frac);
      g[g.flat_index(a.j, b.j + 1)] += w * (1.0 - a.frac) * b.frac;
      g[g.flat_index(a.j + 1, b.j + 1)] += w * a.frac * b.frac;
    }
  }
  out.mass = std::accumulate(f.weights.begin(), f.weights.end(), 0.0);
  return out;
}

double interpolate_cic(const PeriodicGrid& g, std::span<const double> x) {
  const int n = g.n();
  if (g.dim() == 1) {
    const CicStencil s = stencil(x[0], n);
    return g[g.flat_index(s.j)] * (1.0 - s.frac) + g[g.flat_index(s.j + 1)] * s.frac;
  }
  const CicStencil a = stencil(x[0], n);
  const CicStencil b = stencil(x[1], n);
  return g[g.flat_index(a.j, b.j)] * (1.0 - a.frac) * (1.0 - b.frac) +
         g[g.flat_index(a.j + 1, b.j)] * a.frac * (1.0 - b.frac) +
         g[g.flat_index(a.j, b.j + 1)] * (1.0 - a.frac) * b.frac +
         g[g.flat_index(a.j + 1, b.j + 1)] * a.frac * b.frac;
}

namespace {

double speed(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

}  // namespace

double bare_moment(const ParticleEnsemble& f, double k) {
  if (!(k >= 0.0)) fail(ErrorCode::InvalidArgument, "moment order must be >= 0");
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double s = speed(f.v(i));
    if (!std::isfinite(s)) fail(ErrorCode::NonFinite, "velocity is not finite");
    m += f.weights[i] * std::pow(s, k);
  }
  return m;
}

MomentReport moment(const ParticleEnsemble& f, double k) {
  double mass = 0.0;
  for (double w : f.weights) mass += w;
  return {k, mass + bare_moment(f, k), f.time};
}

EnergyTerms field_energy(const PotentialField& U) {
  EnergyTerms e;
  e.gradient = spectral::gradient_energy(U.U, U.epsilon);
  double s = 0.0;
  for (double u : U.U.values()) s += u * std::exp(u);
  e.entropy = s * U.U.cell_volume();
  return e;
}

EnergyTerms energy(const ParticleEnsemble& f, const PotentialField& U) {
  if (std::abs(U.epsilon - f.epsilon) > 1e-14 * std::max(1.0, f.epsilon)) {
    fail(ErrorCode::EpsilonMismatch, "potential solved with epsilon " + std::to_string(U.epsilon) +
                                         " but ensemble has " + std::to_string(f.epsilon));
  }
  if (U.dim() != f.dim) fail(ErrorCode::DimensionMismatch, "potential and ensemble dimensions differ");
  EnergyTerms e = field_energy(U);
  e.kinetic = 0.5 * bare_moment(f, 2.0);
  return e;
}

double analytic_norm(const PeriodicGrid& g, double delta) {
  if (!(delta > 1.0)) fail(ErrorCode::InvalidArgument, "analytic norm requires delta > 1");
  const Spectrum s = spectral::forward(g);
  const int n = s.n;
  const std::size_t last = s.last_extent();
  double total = 0.0;
  for (std::size_t idx = 0; idx < s.coeffs.size(); ++idx) {
    int i0 = 0, il = 0;
    if (s.dim == 1) {
      il = static_cast<int>(idx);
    } else {
      i0 = static_cast<int>(idx / last);
      il = static_cast<int>(idx % last);
    }
    const double k0 = s.dim == 2 ? spectral::wavenumber(i0, n) : 0;
    const double k1 = spectral::wavenumber(il, n);
    const double kn = std::sqrt(k0 * k0 + k1 * k1);
    const double mult = (il == 0 || il == n / 2) ? 1.0 : 2.0;
    total += mult * std::abs(s.coeffs[idx]) * std::pow(delta, kn);
  }
  return total;
}

}  // namespace vpme
