#pragma once

// Wasserstein distances on T^d × R^d between particle ensembles, with the
// ground cost |x − y|^p_{T^d} + |v − w|^p.

#include <cstddef>
#include <span>
#include <vector>

#include "vpme/measures.hpp"
#include "vpme/network_simplex.hpp"
#include "vpme/sinkhorn.hpp"

namespace vpme {

enum class OtMethod { Exact, Entropic };

/// Exact solves are limited to this many cost entries.
inline constexpr std::size_t kMaxExactPairs = 4'000'000;

struct TransportPlan {
  std::vector<PlanEntry> pairs;
  double cost_p1 = 0.0;  // Σ π |x−y|_T + |v−w|
  double cost_p2 = 0.0;  // Σ π |x−y|²_T + |v−w|²

  /// Largest absolute marginal error against the given weights.
  double marginal_error(std::span<const double> a, std::span<const double> b) const;
};

struct WassersteinResult {
  double value = 0.0;  // W_p
  int order = 1;
  OtMethod method = OtMethod::Exact;
  /// Entropic only: bounds on the transport cost W_p^p.
  double cost_upper = 0.0;
  double cost_lower = 0.0;
  double gap = 0.0;
  TransportPlan plan;
};

/// Phase-space ground cost between particle i of `a` and particle j of `b`.
double ground_cost(const ParticleEnsemble& a, std::size_t i, const ParticleEnsemble& b, std::size_t j,
                   int order);
/// Dense row-major cost matrix.
std::vector<double> cost_matrix(const ParticleEnsemble& a, const ParticleEnsemble& b, int order);

WassersteinResult wasserstein(const ParticleEnsemble& mu, const ParticleEnsemble& nu, int order,
                              OtMethod method = OtMethod::Exact, const SinkhornOptions& opts = {});

/// Fills cost_p1/cost_p2 of a plan from the ensembles it couples.
void price_plan(TransportPlan& plan, const ParticleEnsemble& a, const ParticleEnsemble& b);
/// Index-matched coupling π = Σ w_i δ_(i,i); requires equal sizes and weights.
TransportPlan identity_plan(const ParticleEnsemble& a, const ParticleEnsemble& b);

/// W₁ between two weighted point sets on the circle T¹ (positions only), via
/// the closed form inf_c ∫|F − G − c|.
double circle_w1(std::span<const double> xa, std::span<const double> wa, std::span<const double> xb,
                 std::span<const double> wb);

/// `count` evenly spaced particles with weights renormalised to mass 1.
ParticleEnsemble subsample(const ParticleEnsemble& f, std::size_t count);

struct WpInequalityReport {
  double k = 4.0;
  double w1 = 0.0;
  double w2 = 0.0;
  double moment_ck = 0.0;     // max of the bare k-th moments
  double first_rhs = 0.0;     // √2 W₂
  bool first_holds = false;   // W₁ ≤ √2 W₂
  double second_rhs = 0.0;    // 3(1 + 2C_k)^{1/(k−1)} W₁^{(k−2)/(k−1)}
  bool second_holds = false;  // W₂ ≤ second_rhs
  bool squared_holds = false; // W₂² ≤ second_rhs
};

/// Both cross-order inequalities with exact OT.
WpInequalityReport verify_wp_inequalities(const ParticleEnsemble& mu, const ParticleEnsemble& nu, double k);

}  // namespace vpme
