#include "vpme/geometry.hpp"

#include <cmath>
#include <string>

#include "vpme/error.hpp"

namespace vpme {
namespace {

void check_dim(std::size_t n) {
  if (n == 0 || n > static_cast<std::size_t>(kMaxDim)) {
    fail(ErrorCode::DimensionMismatch, "coordinate count " + std::to_string(n) +
                                           " outside [1, " + std::to_string(kMaxDim) + "]");
  }
}

std::int64_t nearest_shift(double x) noexcept {
  return static_cast<std::int64_t>(std::floor(x + 0.5));
}

}  // namespace

double wrap_coord(double x) noexcept {
  double y = x - std::floor(x + 0.5);
  // floor(x + 0.5) can round up for x just below a half-integer.
  if (y >= 0.5) y -= 1.0;
  if (y < -0.5) y += 1.0;
  return y;
}

double torus_delta(double a, double b) noexcept { return wrap_coord(a - b); }

TorusPoint::TorusPoint(std::span<const double> coords) {
  check_dim(coords.size());
  dim_ = static_cast<int>(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!std::isfinite(coords[i])) fail(ErrorCode::NonFinite, "torus coordinate is not finite");
    c_[i] = wrap_coord(coords[i]);
  }
}

LiftedPoint LiftedPoint::from(std::span<const double> coords) {
  check_dim(coords.size());
  LiftedPoint p;
  p.dim = static_cast<int>(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) p.c[i] = coords[i];
  return p;
}

double torus_distance_sq(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::DimensionMismatch, "torus_distance between dimensions " +
                                           std::to_string(a.size()) + " and " +
                                           std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = torus_delta(a[i], b[i]);
    s += d * d;
  }
  return s;
}

double torus_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(torus_distance_sq(a, b));
}

double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  return torus_distance(a.coords(), b.coords());
}

Wrapped wrap(const LiftedPoint& p) {
  check_dim(static_cast<std::size_t>(p.dim));
  Wrapped out;
  std::array<double, kMaxDim> c{};
  for (int i = 0; i < p.dim; ++i) {
    const double x = p.c[static_cast<std::size_t>(i)];
    if (!std::isfinite(x)) fail(ErrorCode::NonFinite, "lifted coordinate is not finite");
    std::int64_t w = nearest_shift(x);
    double y = x - static_cast<double>(w);
    if (y >= 0.5) {
      y -= 1.0;
      ++w;
    } else if (y < -0.5) {
      y += 1.0;
      --w;
    }
    c[static_cast<std::size_t>(i)] = y;
    out.winding[static_cast<std::size_t>(i)] = w;
  }
  out.point = TorusPoint(std::span<const double>(c.data(), static_cast<std::size_t>(p.dim)));
  return out;
}

LiftedPoint unwrap(const TorusPoint& p, std::span<const std::int64_t> winding) {
  if (static_cast<int>(winding.size()) != p.dim()) {
    fail(ErrorCode::DimensionMismatch, "winding length does not match point dimension");
  }
  LiftedPoint out;
  out.dim = p.dim();
  for (int i = 0; i < p.dim(); ++i) {
    out.c[static_cast<std::size_t>(i)] = p[i] + static_cast<double>(winding[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace vpme
