#pragma once

// Primal network simplex for the dense transportation problem
//   min Σ c_ij π_ij  s.t.  Σ_j π_ij = a_i, Σ_i π_ij = b_j, π ≥ 0,
// on the complete bipartite graph with an artificial root. Block-search
// pricing and the strongly feasible leaving-arc rule keep it cycling-free.

#include <cstddef>
#include <span>
#include <vector>

namespace vpme {

struct PlanEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double mass = 0.0;
};

struct NetworkSimplexResult {
  double cost = 0.0;
  std::vector<PlanEntry> plan;
  /// Dual potentials with c_ij − u_i − v_j ≥ 0 up to roundoff.
  std::vector<double> u;
  std::vector<double> v;
  std::size_t pivots = 0;
};

/// `cost` is row-major n×m. Masses must be nonnegative with equal totals
/// (within 1e-12 relative); throws Error on size or balance violations.
NetworkSimplexResult network_simplex(std::span<const double> a, std::span<const double> b,
                                     std::span<const double> cost);

}  // namespace vpme
