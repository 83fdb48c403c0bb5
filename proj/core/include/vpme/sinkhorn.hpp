#pragma once

// Log-domain Sinkhorn with a geometric regularisation schedule. Levels that
// stall are finished by Newton steps on the entropic dual (conjugate gradients
// on Hessian-vector products, Armijo backtracking). The returned plan is rounded onto the transport polytope, so its cost is an upper bound
// on the exact value; the c-transformed duals give a lower bound.

#include <span>
#include <vector>

#include "vpme/network_simplex.hpp"

namespace vpme {

/// Regularisation levels are multiples of max|c_ij|.
struct SinkhornOptions {
  double reg_start = 1e-1;
  double reg_end = 1e-3;
  double reg_factor = 0.5;
  double marginal_tol = 1e-8;
  int max_iterations_per_level = 20000;
  /// Sinkhorn sweeps per level before switching to Newton steps on the dual.
  int newton_after = 200;
  int max_newton_steps = 40;
};

struct SinkhornResult {
  double primal = 0.0;  // cost of the rounded plan
  double dual = 0.0;    // c-transform dual value
  double gap = 0.0;     // primal − dual
  double marginal_violation = 0.0;  // before rounding
  int iterations = 0;
  int newton_steps = 0;
  bool converged = false;
  std::vector<PlanEntry> plan;
};

SinkhornResult sinkhorn(std::span<const double> a, std::span<const double> b,
                        std::span<const double> cost, const SinkhornOptions& opts = {});

}  // namespace vpme
