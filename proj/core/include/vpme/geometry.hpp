#pragma once

// Flat torus T^d identified with the box [-1/2, 1/2)^d, plus lifted
// (unwrapped) coordinates that remember how often a path wrapped around.

#include <array>
#include <cstdint>
#include <span>

namespace vpme {

inline constexpr int kMaxDim = 3;

/// A point of T^d, every coordinate in [-1/2, 1/2).
class TorusPoint {
 public:
  TorusPoint() = default;
  /// Normalizes `coords` onto the canonical box; throws on non-finite input.
  explicit TorusPoint(std::span<const double> coords);

  int dim() const noexcept { return dim_; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const noexcept {
    return {c_.data(), static_cast<std::size_t>(dim_)};
  }

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

/// Unconstrained coordinates in R^d tracking winding.
struct LiftedPoint {
  std::array<double, kMaxDim> c{};
  int dim = 0;

  static LiftedPoint from(std::span<const double> coords);
  std::span<const double> coords() const noexcept {
    return {c.data(), static_cast<std::size_t>(dim)};
  }
};

struct Wrapped {
  TorusPoint point;
  std::array<std::int64_t, kMaxDim> winding{};
};

/// Canonical representative of a real coordinate in [-1/2, 1/2).
double wrap_coord(double x) noexcept;

/// Signed minimal-image difference a - b in [-1/2, 1/2).
double torus_delta(double a, double b) noexcept;

/// |a - b|_{T^d} = inf over integer shifts of the Euclidean distance.
double torus_distance(const TorusPoint& a, const TorusPoint& b);
/// Same metric on raw coordinate spans (assumed normalized or not; the
/// minimal-image convention handles both).
double torus_distance(std::span<const double> a, std::span<const double> b);
double torus_distance_sq(std::span<const double> a, std::span<const double> b);

/// p = wrapped.point + wrapped.winding componentwise.
Wrapped wrap(const LiftedPoint& p);
LiftedPoint unwrap(const TorusPoint& p, std::span<const std::int64_t> winding);

}  // namespace vpme
