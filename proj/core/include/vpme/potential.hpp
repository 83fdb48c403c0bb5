#pragma once

#include <vector>

#include "vpme/grid.hpp"

namespace vpme {

/// Solution of ε²ΔU = e^U − ρ on a periodic grid, with E = −∇U.
struct PotentialField {
  PeriodicGrid U;
  std::vector<PeriodicGrid> E;
  double epsilon = 0.0;
  double residual_norm = 0.0;  // sup-norm of ε²ΔU − e^U + ρ
  int iterations = 0;
  /// L² residual after each accepted Newton step (starting with the guess).
  std::vector<double> residual_history;

  int dim() const noexcept { return U.dim(); }
};

}  // namespace vpme
