#include "vpme/penrose.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "vpme/error.hpp"
#include "vpme/grid.hpp"

namespace vpme {
namespace {

using cplx = std::complex<double>;

/// Precomputed quadrature of the Penrose integral at fixed ξ; valid for any
/// γ ≥ gamma_min and |τ| ≤ tau_max.
class PenroseEvaluator {
 public:
  PenroseEvaluator(const VelocityProfile& g0, double xi, double gamma_min, double tau_max) {
    const std::size_t n = g0.size();
    // g0′ by spectral differentiation on the periodic velocity box.
    const double length = g0.dv * static_cast<double>(n);
    PeriodicGrid grid(1, static_cast<int>(n));
    for (std::size_t k = 0; k < n; ++k) grid[k] = g0.g[k];
    PeriodicGrid dg = spectral::derivative(grid, 0);
    for (double& x : dg.values()) x /= length;

    const double vmax = std::max(std::abs(g0.v_min), std::abs(g0.v(n - 1)));
    const double axi = std::abs(xi);
    const double horizon = std::min(40.0 / gamma_min, std::numbers::pi / (g0.dv * axi));
    const double rate = tau_max + axi * vmax + 1.0;
    const auto panels = static_cast<std::size_t>(std::ceil(horizon * rate / 2.0));
    const double hp = horizon / static_cast<double>(panels);

    using GL = boost::math::quadrature::gauss<double, 8>;
    const auto& xa = GL::abscissa();
    const auto& wa = GL::weights();
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = (static_cast<double>(p) + 0.5) * hp;
      for (std::size_t q = 0; q < xa.size(); ++q) {
        for (int sgn : {-1, 1}) {
          s_.push_back(mid + sgn * 0.5 * hp * xa[q]);
          w_.push_back(0.5 * hp * wa[q]);
        }
      }
    }
    // F_v[g0′](sξ) by direct summation using a rotation recurrence.
    const cplx pref = cplx(0.0, xi / (1.0 + xi * xi));
    f_.resize(s_.size());
    for (std::size_t q = 0; q < s_.size(); ++q) {
      const double eta = s_[q] * xi;
      cplx rot = std::polar(1.0, -eta * g0.dv);
      cplx phase = std::polar(1.0, -eta * g0.v_min);
      cplx acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        acc += dg[k] * phase;
        phase *= rot;
      }
      f_[q] = pref * acc * g0.dv * w_[q];
    }
  }

  double value(double gamma, double tau) const {
    cplx integral = 0.0;
    const cplx z(-gamma, -tau);
    for (std::size_t q = 0; q < s_.size(); ++q) integral += std::exp(z * s_[q]) * f_[q];
    return std::abs(1.0 - integral);
  }

 private:
  std::vector<double> s_, w_;
  std::vector<cplx> f_;
};

void check_profile(const VelocityProfile& g0) {
  if (g0.size() < 8 || g0.size() % 2 != 0) fail(ErrorCode::InvalidArgument, "velocity profile needs an even size >= 8");
  if (!(g0.dv > 0.0)) fail(ErrorCode::InvalidArgument, "velocity spacing must be positive");
}

}  // namespace

VelocityProfile VelocityProfile::sample(const std::function<double(double)>& fn, double vmax, int n) {
  if (n < 8 || n % 2 != 0 || !(vmax > 0.0)) fail(ErrorCode::InvalidArgument, "invalid velocity grid");
  VelocityProfile p;
  p.v_min = -vmax;
  p.dv = 2.0 * vmax / n;
  p.g.resize(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < p.g.size(); ++k) p.g[k] = fn(p.v(k));
  return p;
}

VelocityProfile maxwellian_profile(double sigma, double vmax, int n) {
  const double c = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  return VelocityProfile::sample([&](double v) { return c * std::exp(-0.5 * v * v / (sigma * sigma)); }, vmax, n);
}

VelocityProfile double_bump_profile(double vb, double sigma, double vmax, int n) {
  const double c = 0.5 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  return VelocityProfile::sample(
      [&](double v) {
        const double a = (v - vb) / sigma, b = (v + vb) / sigma;
        return c * (std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b));
      },
      vmax, n);
}

double penrose_functional(const VelocityProfile& g0, double xi, double gamma, double tau) {
  check_profile(g0);
  if (xi == 0.0 || !std::isfinite(xi)) fail(ErrorCode::InvalidArgument, "xi must be nonzero");
  if (!(gamma > 0.0)) fail(ErrorCode::InvalidArgument, "gamma must be positive");
  return PenroseEvaluator(g0, xi, gamma, std::abs(tau)).value(gamma, tau);
}

PenroseGrid PenroseGrid::standard() {
  PenroseGrid g;
  for (int i = 0; i < 12; ++i) g.gamma.push_back(0.05 * std::pow(40.0, i / 11.0));
  for (int i = 0; i <= 32; ++i) g.tau.push_back(-4.0 + 0.25 * i);
  for (int i = 0; i < 9; ++i) g.xi.push_back(0.25 * std::pow(16.0, i / 8.0));
  return g;
}

PenroseSweep penrose_sweep(const VelocityProfile& g0, const PenroseGrid& grid) {
  check_profile(g0);
  if (grid.gamma.empty() || grid.tau.empty() || grid.xi.empty()) {
    fail(ErrorCode::InvalidArgument, "empty Penrose parameter grid");
  }
  double gmin = grid.gamma.front(), tmax = 0.0;
  for (double g : grid.gamma) {
    if (!(g > 0.0)) fail(ErrorCode::InvalidArgument, "gamma must be positive");
    gmin = std::min(gmin, g);
  }
  for (double t : grid.tau) tmax = std::max(tmax, std::abs(t));
  PenroseSweep out;
  out.infimum = std::numeric_limits<double>::infinity();
  const std::size_t ng = grid.gamma.size(), nt = grid.tau.size();
  std::vector<double> vals(ng * nt);
  for (double xi : grid.xi) {
    if (xi == 0.0) fail(ErrorCode::InvalidArgument, "xi must be nonzero");
    const PenroseEvaluator ev(g0, xi, gmin, tmax);
    for (std::size_t a = 0; a < ng; ++a) {
      for (std::size_t b = 0; b < nt; ++b) {
        const double v = ev.value(grid.gamma[a], grid.tau[b]);
        vals[a * nt + b] = v;
        ++out.evaluations;
        if (v < out.infimum) {
          out.infimum = v;
          out.gamma = grid.gamma[a];
          out.tau = grid.tau[b];
          out.xi = xi;
        }
      }
    }
    for (std::size_t a = 0; a < ng; ++a) {
      for (std::size_t b = 0; b < nt; ++b) {
        if (a + 1 < ng) {
          const double step = std::abs(grid.gamma[a + 1] - grid.gamma[a]);
          if (step > 0.0) out.lipschitz = std::max(out.lipschitz, std::abs(vals[(a + 1) * nt + b] - vals[a * nt + b]) / step);
        }
        if (b + 1 < nt) {
          const double step = std::abs(grid.tau[b + 1] - grid.tau[b]);
          if (step > 0.0) out.lipschitz = std::max(out.lipschitz, std::abs(vals[a * nt + b + 1] - vals[a * nt + b]) / step);
        }
      }
    }
  }
  return out;
}

}  // namespace vpme
