#include "vpme/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <limits>
#include <sstream>

#include "vpme/dynamics.hpp"
#include "vpme/error.hpp"
#include "vpme/initial_data.hpp"
#include "vpme/ot.hpp"
#include "vpme/stability.hpp"

namespace vpme {

namespace {

std::string eps_label(double e) {
  std::ostringstream o;
  o << "eps=" << e;
  return o.str();
}

// Rung parameters: dt fitted to the smaller ε, checkpoint spacing preserved.
SimParams rung_params(const ExperimentConfig& c, double eps, double eps_min) {
  SimParams p = c.sim;
  p.epsilon = eps;
  p.dt = fitted_dt(p.t_end, c.sim.dt, eps_min);
  const double spacing = c.sim.dt * c.sim.checkpoint_stride;
  p.checkpoint_stride = static_cast<int>(std::max<long long>(1, std::llround(spacing / p.dt)));
  p.store_stride = p.checkpoint_stride;
  return p;
}

std::vector<double> ladder_of(const ExperimentConfig& c) {
  return c.epsilon_ladder.empty() ? std::vector<double>{c.sim.epsilon} : c.epsilon_ladder;
}

template <class Fn>
std::vector<LadderRow> run_rungs(const ExperimentConfig& c, const std::vector<double>& ladder, Fn fn) {
  std::vector<LadderRow> rows(ladder.size());
  if (c.threads <= 1) {
    for (std::size_t i = 0; i < ladder.size(); ++i) rows[i] = fn(ladder[i]);
    return rows;
  }
  std::vector<std::future<LadderRow>> jobs;
  for (double e : ladder) jobs.push_back(std::async(std::launch::async, fn, e));
  for (std::size_t i = 0; i < jobs.size(); ++i) rows[i] = jobs[i].get();
  return rows;
}

// Distances at checkpoints k with k % cadence == 0 and at the last one.
void distance_series(LadderRow& row, const SimulationResult& a, const SimulationResult& b, const ExperimentConfig& c) {
  const auto& cs = a.record.checkpoints;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    if (k % static_cast<std::size_t>(c.distance_cadence) != 0 && k + 1 != cs.size()) continue;
    row.times.push_back(cs[k].time);
    row.w1.push_back(snapshot_distance(a.snapshots[k], b.snapshots[k], 1, c.distances));
  }
}

void finish_row(LadderRow& row, const RunRecord& reference) {
  row.w1_initial = row.w1.empty() ? 0.0 : row.w1.front();
  row.sup_w1 = row.w1.empty() ? 0.0 : *std::max_element(row.w1.begin(), row.w1.end());
  const auto& cs = reference.checkpoints;
  row.field_energy_initial = cs.front().gradient;
  for (const auto& ck : cs) row.field_energy_max = std::max(row.field_energy_max, ck.gradient);
}

void attach_distances(RunRecord& r, const LadderRow& row) {
  for (std::size_t k = 0; k < row.times.size(); ++k) {
    for (auto& ck : r.checkpoints) {
      if (std::abs(ck.time - row.times[k]) <= 1e-9) ck.extra["W1"] = row.w1[k];
    }
  }
}

struct RungOutput {
  LadderRow row;
  std::vector<RunRecord> records;
};

RungOutput stability_rung(const ExperimentConfig& c, double eps) {
  const SimParams p = rung_params(c, eps, eps);
  InitialDataSpec spec = c.initial;
  spec.epsilon = eps;
  const ParticleEnsemble g0 = make_initial_data(spec, c.n_particles, p.seed).ensemble;
  RungOutput out;
  LadderRow& row = out.row;
  row.epsilon = eps;
  ParticleEnsemble f0 = g0;
  if (c.perturbation != PerturbKind::None) {
    row.eta = c.rate.eta_at(eps);
    const auto mode = c.perturbation == PerturbKind::VelocityShift ? PerturbMode::VelocityShift
                      : c.perturbation == PerturbKind::Jitter      ? PerturbMode::Jitter
                                                                   : PerturbMode::RoughResample;
    f0 = perturb(g0, row.eta, mode, p.seed + 1, &spec, 0).ensemble;
  }

  MonitorSet mon;
  mon.trajectories = false;
  mon.snapshots = true;
  SimulationResult run_g = simulate(g0, p, mon);
  SimulationResult run_f = simulate(f0, p, mon);

  Verdict v;
  v.asserted = false;
  if (p.dim == 1) {
    const auto ws = weak_strong_bound_1d(run_f, run_g, eps, c.distances);
    row.times = ws.times;
    row.w1 = ws.measured_w1;
    row.fitted_c = ws.fitted_c;
    v.name = "weak_strong_bound";
    v.holds = ws.holds;
    v.fitted_c = ws.fitted_c;
    v.lhs = *std::max_element(ws.measured_w1.begin(), ws.measured_w1.end());
    double worst = 0.0;
    for (std::size_t k = 0; k < ws.rhs.size(); ++k) {
      if (ws.rhs[k] > 0.0) worst = std::max(worst, ws.measured_w1[k] / ws.rhs[k]);
    }
    v.rhs = worst;  // largest measured/bound ratio
    v.slack = 1e-12;
  } else {
    distance_series(row, run_f, run_g, c);
    TransportPlan pi0;
    if (c.coupling == "optimal") {
      pi0 = wasserstein(f0, g0, 2).plan;
    } else {
      pi0 = identity_plan(f0, g0);
    }
    const auto mon2 = stability_monitor_2d(run_f, run_g, pi0, eps, c.distances);
    row.fitted_c = mon2.fitted_cd;
    v.name = "stability_envelope";
    v.holds = mon2.holds;
    v.fitted_c = mon2.fitted_cd;
    v.lhs = *std::max_element(mon2.measured_w2.begin(), mon2.measured_w2.end());
    v.rhs = *std::max_element(mon2.envelope_w2.begin(), mon2.envelope_w2.end());
    v.slack = 1e-9;
  }
  row.verdict = v.holds ? "holds" : "fails";
  finish_row(row, run_g.record);

  run_g.record.label = eps_label(eps) + "/unperturbed";
  run_f.record.label = eps_label(eps) + "/perturbed";
  attach_distances(run_f.record, row);
  run_f.record.verdicts.push_back(v);
  out.records.push_back(std::move(run_g.record));
  out.records.push_back(std::move(run_f.record));
  return out;
}

RungOutput cauchy_rung(const ExperimentConfig& c, double eps1, double eps2) {
  const SimParams p1 = rung_params(c, eps1, std::min(eps1, eps2));
  SimParams p2 = p1;
  p2.epsilon = eps2;
  InitialDataSpec spec = c.initial;
  spec.epsilon = eps1;
  const ParticleEnsemble f0 = make_initial_data(spec, c.n_particles, p1.seed).ensemble;
  MonitorSet mon;
  mon.trajectories = false;
  mon.snapshots = true;
  SimulationResult a = simulate(f0, p1, mon);
  SimulationResult b = simulate(f0, p2, mon);
  RungOutput out;
  out.row.epsilon = eps1;
  out.row.eta = eps2;
  distance_series(out.row, a, b, c);
  finish_row(out.row, a.record);
  out.row.verdict = "logged";
  a.record.label = eps_label(eps1) + "/cauchy";
  b.record.label = eps_label(eps2) + "/cauchy";
  attach_distances(a.record, out.row);
  out.records.push_back(std::move(a.record));
  out.records.push_back(std::move(b.record));
  return out;
}

template <class Rung>
ExperimentReport assemble(const ExperimentConfig& c, const std::string& kind, Rung rung) {
  c.validate();
  const auto ladder = ladder_of(c);
  std::vector<RungOutput> outs(ladder.size());
  std::vector<LadderRow> rows = run_rungs(c, ladder, [&](double e) {
    // Each job owns its slot; rows are copied out afterwards.
    const std::size_t i = static_cast<std::size_t>(std::find(ladder.begin(), ladder.end(), e) - ladder.begin());
    try {
      outs[i] = rung(e);
    } catch (const Error& err) {
      fail(err.code(), eps_label(e) + ": " + err.message());
    }
    return outs[i].row;
  });
  ExperimentReport r;
  r.kind = kind;
  r.config_hash = c.hash();
  r.rows = std::move(rows);
  for (auto& o : outs) {
    for (auto& rec : o.records) {
      rec.config_hash = r.config_hash;
      r.records.push_back(std::move(rec));
    }
  }
  return r;
}

Verdict monotone_verdict(const std::vector<LadderRow>& rows, bool strict, const std::string& name) {
  Verdict v;
  v.name = name;
  v.holds = true;
  v.slack = strict ? 0.0 : 1e-12;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double prev = rows[i - 1].sup_w1, cur = rows[i].sup_w1;
    const bool ok = strict ? cur < prev : cur <= prev * (1.0 + v.slack);
    if (!ok) v.holds = false;
    if (prev > 0.0) worst = std::max(worst, cur / prev);
  }
  v.lhs = std::isfinite(worst) ? worst : 0.0;  // largest consecutive ratio
  v.rhs = 1.0;
  return v;
}

}  // namespace

bool ExperimentReport::all_asserted_pass() const {
  for (const auto& v : verdicts) {
    if (v.asserted && !v.holds) return false;
  }
  for (const auto& rec : records) {
    if (!rec.all_asserted_pass()) return false;
  }
  return true;
}

std::vector<SummaryRow> ExperimentReport::summary() const {
  std::vector<SummaryRow> out;
  for (const auto& row : rows) out.push_back({row.epsilon, row.eta, row.sup_w1, row.verdict, row.fitted_c});
  return out;
}

double fitted_dt(double t_end, double dt, double epsilon) {
  if (!(t_end > 0.0) || !(dt > 0.0) || !(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "invalid step parameters");
  const double cap = std::min(dt, 0.1 * epsilon);
  const double steps = std::ceil(t_end / cap - 1e-9);
  return t_end / steps;
}

double field_energy_growth(const RunRecord& record) {
  if (record.checkpoints.empty()) fail(ErrorCode::MissingHistory, "run record has no checkpoints");
  const double e0 = record.checkpoints.front().gradient;
  double m = e0;
  for (const auto& c : record.checkpoints) m = std::max(m, c.gradient);
  if (!(e0 > 0.0)) fail(ErrorCode::InvalidArgument, "initial field energy is zero");
  return m / e0;
}

ExperimentReport run_stability_experiment(const ExperimentConfig& config) {
  auto r = assemble(config, "stability", [&](double e) { return stability_rung(config, e); });
  // Field-energy growth of the unperturbed runs separates the two regimes.
  double growth = 0.0;
  for (const auto& row : r.rows) {
    if (row.field_energy_initial > 0.0) growth = std::max(growth, row.field_energy_max / row.field_energy_initial);
  }
  Verdict v;
  v.lhs = growth;
  if (config.initial.family == Family::DoubleBump) {
    v.name = "instability_growth";
    v.rhs = 10.0;
    v.holds = growth >= v.rhs;
  } else {
    v.name = "field_energy_bounded";
    v.rhs = 2.0;
    v.holds = growth <= v.rhs;
    r.verdicts.push_back(monotone_verdict(r.rows, false, "sup_distance_nonincreasing"));
  }
  r.verdicts.push_back(v);
  return r;
}

ExperimentReport run_quasineutral_cauchy(const ExperimentConfig& config) {
  auto r = assemble(config, "cauchy", [&](double e) { return cauchy_rung(config, e, 0.5 * e); });
  r.verdicts.push_back(monotone_verdict(r.rows, true, "cauchy_column_decreasing"));
  for (auto& row : r.rows) row.verdict = r.verdicts.back().holds ? "holds" : "fails";
  return r;
}

LadderRow cauchy_pair(const ExperimentConfig& config, double eps1, double eps2) {
  config.validate();
  return cauchy_rung(config, eps1, eps2).row;
}

void write_report(const std::string& dir, const ExperimentReport& report, const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create '" + dir + "': " + ec.message());
  write_run_manifest((fs::path(dir) / "run.json").string(), config.canonical(), report.config_hash, config.sim.seed);
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    std::ostringstream name;
    name << "record_" << i << ".ndjson";
    write_run_record((fs::path(dir) / name.str()).string(), report.records[i]);
  }
  RunRecord ladder;
  ladder.config_hash = report.config_hash;
  ladder.seed = config.sim.seed;
  ladder.dim = config.sim.dim;
  ladder.epsilon = config.sim.epsilon;
  ladder.label = report.kind + "/ladder";
  ladder.verdicts = report.verdicts;
  write_run_record((fs::path(dir) / "ladder.ndjson").string(), ladder);
  write_text((fs::path(dir) / "summary.csv").string(), summary_csv(report.summary()));
}

}  // namespace vpme
