#pragma once

// Periodic scalar grids on [-1/2, 1/2)^d and the spectral operators used by
// the field solver. Nodes sit at x_j = -1/2 + j/n along each axis; storage
// is row-major with the first coordinate varying slowest.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace vpme {

class PeriodicGrid {
 public:
  PeriodicGrid() = default;
  PeriodicGrid(int dim, int n, double fill = 0.0);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return values_.size(); }
  double spacing() const noexcept { return 1.0 / n_; }
  double cell_volume() const noexcept;

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Node coordinate along `axis` for flat index `idx`.
  double node_coord(std::size_t idx, int axis) const noexcept;
  std::size_t flat_index(int i0, int i1 = 0) const noexcept;

  /// Periodic rectangle rule, exact for trigonometric polynomials below Nyquist.
  double integral() const;
  double mean() const;
  double max() const;
  double min() const;
  /// Continuous L^p norm under the rectangle rule; p = +inf gives the sup.
  double lp_norm(double p) const;

  bool same_shape(const PeriodicGrid& other) const noexcept {
    return dim_ == other.dim_ && n_ == other.n_;
  }

 private:
  std::vector<double> values_;
  int dim_ = 0;
  int n_ = 0;
};

/// Fourier-side representation produced by `spectral::forward`: the r2c
/// half-spectrum, coefficients normalised so that c_0 equals the grid mean.
struct Spectrum {
  int dim = 0;
  int n = 0;
  std::vector<std::complex<double>> coeffs;

  std::size_t last_extent() const noexcept { return static_cast<std::size_t>(n / 2 + 1); }
};

namespace spectral {

Spectrum forward(const PeriodicGrid& g);
PeriodicGrid inverse(const Spectrum& s);

/// Integer wavenumber for FFT index i on an axis of length n.
int wavenumber(int i, int n) noexcept;

PeriodicGrid laplacian(const PeriodicGrid& u);
/// Component `axis` of the spectral gradient (Nyquist mode dropped).
PeriodicGrid derivative(const PeriodicGrid& u, int axis);
std::vector<PeriodicGrid> gradient(const PeriodicGrid& u);

/// Solves (-a Δ + b) u = rhs. With b == 0 the zero mode of rhs is ignored and
/// the zero-mean solution is returned.
PeriodicGrid solve_screened(const PeriodicGrid& rhs, double a, double b);

/// ||∇ Δ^{-1} h||_{L^2} for a (mean-zero part of) h.
double negative_sobolev_norm(const PeriodicGrid& h);

/// ε²/2 ∫|∇u|² evaluated on the Fourier side, including the Nyquist row so
/// that it matches the spectral Laplacian.
double gradient_energy(const PeriodicGrid& u, double eps);

}  // namespace spectral
}  // namespace vpme
