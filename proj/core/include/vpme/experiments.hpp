#pragma once

// Experiment suites over an ε ladder: stability of perturbed data against the
// unperturbed run, and the Cauchy-in-ε proxy for the quasineutral limit.

#include <string>
#include <vector>

#include "vpme/config.hpp"
#include "vpme/io.hpp"
#include "vpme/run_record.hpp"

namespace vpme {

struct LadderRow {
  double epsilon = 0.0;
  double eta = 0.0;       // requested perturbation (partner ε for the Cauchy proxy)
  double w1_initial = 0.0;
  double sup_w1 = 0.0;
  std::vector<double> times;
  std::vector<double> w1;
  double fitted_c = 0.0;
  std::string verdict;    // "holds", "fails" or "logged"
  double field_energy_initial = 0.0;
  double field_energy_max = 0.0;
};

struct ExperimentReport {
  std::string kind;
  std::string config_hash;
  std::vector<LadderRow> rows;
  /// Run records of every simulation, labelled by rung.
  std::vector<RunRecord> records;
  /// Ladder-level verdicts (trend checks).
  std::vector<Verdict> verdicts;

  bool all_asserted_pass() const;
  std::vector<SummaryRow> summary() const;
};

/// Largest step ≤ min(dt, 0.1 ε) that divides t_end.
double fitted_dt(double t_end, double dt, double epsilon);

/// max_t (ε²/2)∫|∇U|² divided by its t = 0 value.
double field_energy_growth(const RunRecord& record);

ExperimentReport run_stability_experiment(const ExperimentConfig& config);
ExperimentReport run_quasineutral_cauchy(const ExperimentConfig& config);

/// One Cauchy rung: W₁(f_{ε₁}(t), f_{ε₂}(t)) from identical initial particles.
LadderRow cauchy_pair(const ExperimentConfig& config, double eps1, double eps2);

/// Writes run.json, one NDJSON record per simulation and summary.csv into `dir`.
void write_report(const std::string& dir, const ExperimentReport& report, const ExperimentConfig& config);

}  // namespace vpme
