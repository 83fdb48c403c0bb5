#pragma once

// Persistence.
//
// Binary snapshot layout (little-endian):
//   char[4] "VPME" | u32 version | u32 kind | u32 d | u64 count | f64 ε | f64 time
// followed by f64 columns:
//   kind 0 (ensemble):  positions[count·d], velocities[count·d], weights[count]
//   kind 1 (density):   ρ[count], count = n^d
//   kind 2 (potential): U[count], E_0[count], …, E_{d−1}[count]
//
// RunRecord NDJSON: one "run" header object, one "checkpoint" object per
// checkpoint, one "verdict" object per verdict.

#include <cstdint>
#include <string>
#include <vector>

#include "vpme/measures.hpp"
#include "vpme/network_simplex.hpp"
#include "vpme/ot.hpp"
#include "vpme/run_record.hpp"

namespace vpme {

inline constexpr std::uint32_t kSnapshotVersion = 1;

enum class SnapshotKind : std::uint32_t { Ensemble = 0, Density = 1, Potential = 2 };

struct SnapshotHeader {
  std::uint32_t version = kSnapshotVersion;
  SnapshotKind kind = SnapshotKind::Ensemble;
  std::uint32_t dim = 1;
  std::uint64_t count = 0;
  double epsilon = 0.0;
  double time = 0.0;
};

SnapshotHeader read_snapshot_header(const std::string& path);

void write_ensemble(const std::string& path, const ParticleEnsemble& f);
ParticleEnsemble read_ensemble(const std::string& path);

void write_density(const std::string& path, const GridDensity& rho, double epsilon, double time = 0.0);
/// `epsilon` receives the stored ε when non-null.
GridDensity read_density(const std::string& path, double* epsilon = nullptr);

void write_potential(const std::string& path, const PotentialField& U, double time = 0.0);
PotentialField read_potential(const std::string& path);

/// One JSON object per particle: {"x":[…],"v":[…],"w":…}.
std::string ensemble_ndjson(const ParticleEnsemble& f);

std::string run_record_ndjson(const RunRecord& record);
void write_run_record(const std::string& path, const RunRecord& record);
RunRecord parse_run_record(const std::string& ndjson);
RunRecord read_run_record(const std::string& path);

/// run.json: schema version, config hash, seed and the canonical config text.
void write_run_manifest(const std::string& path, const std::string& config_text, const std::string& config_hash,
                        std::uint64_t seed);

struct SummaryRow {
  double epsilon = 0.0;
  double eta = 0.0;
  double sup_w1 = 0.0;
  std::string verdict;
  double fitted_c = 0.0;
};

/// Columns: epsilon, eta, sup_W1, verdict, fitted_C.
std::string summary_csv(const std::vector<SummaryRow>& rows);
/// Columns: i, j, mass.
std::string plan_csv(const TransportPlan& plan);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace vpme
