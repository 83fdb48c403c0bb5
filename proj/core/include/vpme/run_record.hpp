#pragma once

// Time series of run diagnostics plus the verdicts derived from them.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace vpme {

struct Checkpoint {
  double time = 0.0;
  std::int64_t step = 0;
  double kinetic = 0.0;
  double gradient = 0.0;   // (ε²/2)∫|∇U|², the electric field energy
  double entropy = 0.0;    // ∫ U e^U
  double total_energy = 0.0;
  double moment_k = 0.0;      // ∫(1+|v|^k) f at this time
  double moment_k_sup = 0.0;  // sup over [0, t]
  double rho_sup = 0.0;       // ‖ρ‖_∞ of the deposited density
  double rho_sup_running = 0.0;
  double rho_lq = 0.0;        // ‖ρ‖_{L^{(d+2)/d}}
  double q_star = 0.0;        // max_i |V_i(t) − v_i|
  double q_star_running = 0.0;
  double q_tt = 0.0;          // Q(t, t)
  double mass = 0.0;
  double field_residual = 0.0;
  int newton_iterations = 0;
  /// Named extra series (distances, envelopes) attached by experiments.
  std::map<std::string, double> extra;
};

struct Verdict {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double fitted_c = 0.0;
  double slack = 0.0;
  bool holds = false;
  /// False for verdicts that only log a fitted relation.
  bool asserted = true;
};

struct RunRecord {
  static constexpr int kSchemaVersion = 1;

  std::string config_hash;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  int dim = 1;
  double epsilon = 1.0;
  std::string label;
  std::vector<Checkpoint> checkpoints;
  std::vector<Verdict> verdicts;

  /// Throws Error(CheckpointMismatch) unless checkpoint times strictly increase.
  void validate() const;
  bool all_asserted_pass() const;
  const Checkpoint& at_time(double t, double tol = 1e-9) const;
};

}  // namespace vpme
