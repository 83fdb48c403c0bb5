#include "vpme/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "vpme/error.hpp"

namespace vpme {

PeriodicGrid::PeriodicGrid(int dim, int n, double fill) : dim_(dim), n_(n) {
  if (dim < 1 || dim > 2) fail(ErrorCode::DimensionMismatch, "grids support d in {1,2}, got " + std::to_string(dim));
  if (n < 2 || (n % 2) != 0) fail(ErrorCode::InvalidArgument, "grid resolution must be even and >= 2");
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
  values_.assign(total, fill);
}

double PeriodicGrid::cell_volume() const noexcept {
  double v = 1.0;
  for (int i = 0; i < dim_; ++i) v *= spacing();
  return v;
}

double PeriodicGrid::node_coord(std::size_t idx, int axis) const noexcept {
  const auto n = static_cast<std::size_t>(n_);
  std::size_t j = idx;
  if (dim_ == 2) j = axis == 0 ? idx / n : idx % n;
  return -0.5 + static_cast<double>(j) / n_;
}

std::size_t PeriodicGrid::flat_index(int i0, int i1) const noexcept {
  const auto wrapi = [this](int i) { return static_cast<std::size_t>(((i % n_) + n_) % n_); };
  if (dim_ == 1) return wrapi(i0);
  return wrapi(i0) * static_cast<std::size_t>(n_) + wrapi(i1);
}

double PeriodicGrid::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * cell_volume();
}

double PeriodicGrid::mean() const { return integral(); }

double PeriodicGrid::max() const { return *std::max_element(values_.begin(), values_.end()); }
double PeriodicGrid::min() const { return *std::min_element(values_.begin(), values_.end()); }

double PeriodicGrid::lp_norm(double p) const {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  if (p < 1.0) fail(ErrorCode::InvalidArgument, "lp_norm requires p >= 1");
  double s = 0.0;
  for (double v : values_) s += std::pow(std::abs(v), p);
  return std::pow(s * cell_volume(), 1.0 / p);
}

namespace spectral {
namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Plans() {
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuf = std::unique_ptr<double, FftwDeleter>;
using CplxBuf = std::unique_ptr<fftw_complex, FftwDeleter>;

std::size_t real_size(int dim, int n) { return dim == 1 ? std::size_t(n) : std::size_t(n) * n; }
std::size_t cplx_size(int dim, int n) {
  return dim == 1 ? std::size_t(n / 2 + 1) : std::size_t(n) * (n / 2 + 1);
}

// FFTW planning is not thread-safe; execution on fresh aligned buffers is.
const Plans& plans_for(int dim, int n) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<Plans>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{dim, n}];
  if (!slot) {
    slot = std::make_unique<Plans>();
    RealBuf r(fftw_alloc_real(real_size(dim, n)));
    CplxBuf c(fftw_alloc_complex(cplx_size(dim, n)));
    if (dim == 1) {
      slot->r2c = fftw_plan_dft_r2c_1d(n, r.get(), c.get(), FFTW_ESTIMATE);
      slot->c2r = fftw_plan_dft_c2r_1d(n, c.get(), r.get(), FFTW_ESTIMATE);
    } else {
      slot->r2c = fftw_plan_dft_r2c_2d(n, n, r.get(), c.get(), FFTW_ESTIMATE);
      slot->c2r = fftw_plan_dft_c2r_2d(n, n, c.get(), r.get(), FFTW_ESTIMATE);
    }
  }
  return *slot;
}

// Multiplies each Fourier coefficient by symbol(k0, k1) where k are integer
// wavenumbers and `nyq0/nyq1` flag the Nyquist index along each axis.
template <class Symbol>
PeriodicGrid apply_symbol(const PeriodicGrid& u, Symbol symbol) {
  Spectrum s = forward(u);
  const int n = s.n;
  const std::size_t last = s.last_extent();
  for (std::size_t idx = 0; idx < s.coeffs.size(); ++idx) {
    int i0 = 0, i1 = 0;
    if (s.dim == 1) {
      i0 = static_cast<int>(idx);
    } else {
      i0 = static_cast<int>(idx / last);
      i1 = static_cast<int>(idx % last);
    }
    const int k0 = wavenumber(i0, n);
    const int k1 = s.dim == 2 ? wavenumber(i1, n) : 0;
    const bool nyq0 = (i0 == n / 2);
    const bool nyq1 = s.dim == 2 && (i1 == n / 2);
    s.coeffs[idx] *= symbol(k0, k1, nyq0, nyq1);
  }
  return inverse(s);
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

int wavenumber(int i, int n) noexcept { return i <= n / 2 ? i : i - n; }

Spectrum forward(const PeriodicGrid& g) {
  const int dim = g.dim();
  const int n = g.n();
  const Plans& p = plans_for(dim, n);
  RealBuf r(fftw_alloc_real(real_size(dim, n)));
  CplxBuf c(fftw_alloc_complex(cplx_size(dim, n)));
  std::copy(g.values().begin(), g.values().end(), r.get());
  fftw_execute_dft_r2c(p.r2c, r.get(), c.get());
  Spectrum s;
  s.dim = dim;
  s.n = n;
  s.coeffs.resize(cplx_size(dim, n));
  const double scale = 1.0 / static_cast<double>(real_size(dim, n));
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    s.coeffs[i] = std::complex<double>(c.get()[i][0], c.get()[i][1]) * scale;
  }
  return s;
}

PeriodicGrid inverse(const Spectrum& s) {
  const Plans& p = plans_for(s.dim, s.n);
  RealBuf r(fftw_alloc_real(real_size(s.dim, s.n)));
  CplxBuf c(fftw_alloc_complex(cplx_size(s.dim, s.n)));
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    c.get()[i][0] = s.coeffs[i].real();
    c.get()[i][1] = s.coeffs[i].imag();
  }
  fftw_execute_dft_c2r(p.c2r, c.get(), r.get());
  PeriodicGrid g(s.dim, s.n);
  std::copy(r.get(), r.get() + g.size(), g.values().begin());
  return g;
}

PeriodicGrid laplacian(const PeriodicGrid& u) {
  return apply_symbol(u, [](int k0, int k1, bool, bool) {
    return std::complex<double>(-kTwoPi * kTwoPi * double(k0 * k0 + k1 * k1), 0.0);
  });
}

PeriodicGrid derivative(const PeriodicGrid& u, int axis) {
  return apply_symbol(u, [axis](int k0, int k1, bool nyq0, bool nyq1) {
    const int k = axis == 0 ? k0 : k1;
    const bool nyq = axis == 0 ? nyq0 : nyq1;
    if (nyq) return std::complex<double>(0.0, 0.0);
    return std::complex<double>(0.0, kTwoPi * k);
  });
}

std::vector<PeriodicGrid> gradient(const PeriodicGrid& u) {
  std::vector<PeriodicGrid> out;
  out.reserve(static_cast<std::size_t>(u.dim()));
  for (int a = 0; a < u.dim(); ++a) out.push_back(derivative(u, a));
  return out;
}

PeriodicGrid solve_screened(const PeriodicGrid& rhs, double a, double b) {
  return apply_symbol(rhs, [a, b](int k0, int k1, bool, bool) {
    const double k2 = kTwoPi * kTwoPi * double(k0 * k0 + k1 * k1);
    const double denom = a * k2 + b;
    if (denom == 0.0) return std::complex<double>(0.0, 0.0);
    return std::complex<double>(1.0 / denom, 0.0);
  });
}

namespace {

// Σ over the full spectrum of weight(k)·|c_k|², reconstructing the mirrored
// half of the r2c layout.
template <class Weight>
double full_spectrum_sum(const Spectrum& s, Weight weight) {
  const int n = s.n;
  const std::size_t last = s.last_extent();
  double total = 0.0;
  for (std::size_t idx = 0; idx < s.coeffs.size(); ++idx) {
    int i0 = 0, ilast = 0;
    if (s.dim == 1) {
      ilast = static_cast<int>(idx);
    } else {
      i0 = static_cast<int>(idx / last);
      ilast = static_cast<int>(idx % last);
    }
    const int k_last = wavenumber(ilast, n);
    const int k_first = s.dim == 2 ? wavenumber(i0, n) : 0;
    // Columns 1..n/2-1 of the last axis stand for themselves and their mirror.
    const double mult = (ilast == 0 || ilast == n / 2) ? 1.0 : 2.0;
    total += mult * weight(k_first, k_last) * std::norm(s.coeffs[idx]);
  }
  return total;
}

}  // namespace

double negative_sobolev_norm(const PeriodicGrid& h) {
  const Spectrum s = forward(h);
  const double sum = full_spectrum_sum(s, [](int k0, int k1) {
    const double k2 = kTwoPi * kTwoPi * double(k0 * k0 + k1 * k1);
    return k2 == 0.0 ? 0.0 : 1.0 / k2;
  });
  return std::sqrt(sum);
}

double gradient_energy(const PeriodicGrid& u, double eps) {
  const Spectrum s = forward(u);
  const double sum = full_spectrum_sum(s, [](int k0, int k1) {
    return kTwoPi * kTwoPi * double(k0 * k0 + k1 * k1);
  });
  return 0.5 * eps * eps * sum;
}

}  // namespace spectral
}  // namespace vpme
