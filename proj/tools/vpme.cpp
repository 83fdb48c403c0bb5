// vpme: command line front end for the simulation and verification library.
// Exit status is 0 iff every asserted verdict holds, 1 when one fails and 2
// on usage or runtime errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "vpme/config.hpp"
#include "vpme/dynamics.hpp"
#include "vpme/error.hpp"
#include "vpme/experiments.hpp"
#include "vpme/field.hpp"
#include "vpme/initial_data.hpp"
#include "vpme/io.hpp"
#include "vpme/ot.hpp"
#include "vpme/penrose.hpp"
#include "vpme/verify_suite.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json verdict_json(const vpme::Verdict& v) {
  return {{"name", v.name}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"fitted_C", v.fitted_c},
          {"holds", v.holds}, {"asserted", v.asserted}};
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

std::string numbered(const fs::path& dir, const char* stem, std::size_t k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu.bin", stem, k);
  return (dir / buf).string();
}

vpme::ParticleEnsemble initial_from(const vpme::ExperimentConfig& c) {
  vpme::InitialDataSpec spec = c.initial;
  spec.epsilon = c.sim.epsilon;
  spec.dim = c.sim.dim;
  auto f = vpme::make_initial_data(spec, c.n_particles, c.sim.seed).ensemble;
  if (c.perturbation == vpme::PerturbKind::None) return f;
  const auto mode = c.perturbation == vpme::PerturbKind::VelocityShift ? vpme::PerturbMode::VelocityShift
                    : c.perturbation == vpme::PerturbKind::Jitter      ? vpme::PerturbMode::Jitter
                                                                       : vpme::PerturbMode::RoughResample;
  return vpme::perturb(f, c.rate.eta_at(c.sim.epsilon), mode, c.sim.seed + 1, &spec, 0).ensemble;
}

int cmd_solve_field(const std::string& rho_path, double eps, double tol, const std::string& out) {
  const auto rho = vpme::read_density(rho_path);
  const auto U = vpme::solve_poisson_boltzmann(rho, eps, tol);
  if (!out.empty()) vpme::write_potential(out, U);
  const auto e = vpme::field_energy(U);
  print({{"epsilon", eps}, {"n", U.U.n()}, {"dim", U.dim()}, {"residual", U.residual_norm},
         {"iterations", U.iterations}, {"gradient_energy", e.gradient}, {"entropy", e.entropy}});
  return U.residual_norm <= tol ? 0 : 1;
}

int cmd_simulate(const std::string& config_path, const std::string& out) {
  const auto c = vpme::load_config(config_path);
  c.validate();
  const fs::path dir(out);
  fs::create_directories(dir);
  vpme::MonitorSet mon;
  mon.trajectories = false;
  mon.snapshots = c.snapshots;
  mon.fields = c.fields;
  auto run = vpme::simulate(initial_from(c), c.sim, mon);
  run.record.config_hash = c.hash();
  run.record.label = std::string(vpme::to_string(c.initial.family));
  vpme::write_run_manifest((dir / "run.json").string(), c.canonical(), run.record.config_hash, c.sim.seed);
  vpme::write_run_record((dir / "record.ndjson").string(), run.record);
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) vpme::write_ensemble(numbered(dir, "ensemble", k), run.snapshots[k]);
  for (std::size_t k = 0; k < run.fields.size(); ++k)
    vpme::write_potential(numbered(dir, "potential", k), run.fields[k], run.record.checkpoints[k].time);
  json verdicts = json::array();
  for (const auto& v : run.record.verdicts) verdicts.push_back(verdict_json(v));
  const auto& last = run.record.checkpoints.back();
  print({{"config_hash", run.record.config_hash}, {"checkpoints", run.record.checkpoints.size()},
         {"final_energy", last.total_energy}, {"initial_energy", run.record.checkpoints.front().total_energy},
         {"wall_seconds", run.record.wall_seconds}, {"verdicts", verdicts}});
  return run.record.all_asserted_pass() ? 0 : 1;
}

int cmd_distance(const std::string& a, const std::string& b, int order, const std::string& method,
                 const std::string& plan_csv) {
  const auto mu = vpme::read_ensemble(a);
  const auto nu = vpme::read_ensemble(b);
  const auto m = method == "entropic" ? vpme::OtMethod::Entropic : vpme::OtMethod::Exact;
  const auto w = vpme::wasserstein(mu, nu, order, m);
  if (!plan_csv.empty()) vpme::write_text(plan_csv, vpme::plan_csv(w.plan));
  json j{{"order", order}, {"method", method}, {"value", w.value}, {"plan_entries", w.plan.pairs.size()},
         {"marginal_error", w.plan.marginal_error(mu.weights, nu.weights)}};
  if (m == vpme::OtMethod::Entropic) {
    j["cost_upper"] = w.cost_upper;
    j["cost_lower"] = w.cost_lower;
    j["gap"] = w.gap;
  }
  print(j);
  return 0;
}

int cmd_experiment(const std::string& kind, const std::string& config_path, const std::string& out) {
  const auto c = vpme::load_config(config_path);
  const auto report = kind == "cauchy" ? vpme::run_quasineutral_cauchy(c) : vpme::run_stability_experiment(c);
  if (!out.empty()) vpme::write_report(out, report, c);
  json rows = json::array(), verdicts = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"epsilon", r.epsilon}, {"eta", r.eta}, {"sup_W1", r.sup_w1}, {"verdict", r.verdict},
                    {"fitted_C", r.fitted_c}, {"field_energy_growth",
                                               r.field_energy_initial > 0 ? r.field_energy_max / r.field_energy_initial : 0.0}});
  }
  for (const auto& v : report.verdicts) verdicts.push_back(verdict_json(v));
  print({{"kind", report.kind}, {"config_hash", report.config_hash}, {"rows", rows}, {"verdicts", verdicts}});
  return report.all_asserted_pass() ? 0 : 1;
}

int cmd_verify(bool quick, std::uint64_t seed) {
  vpme::SuiteOptions o;
  o.quick = quick;
  o.seed = seed;
  bool ok = true;
  for (const auto& r : vpme::run_verify_suite(o)) {
    std::printf("%-34s %s  trials=%zu failures=%zu worst=%.6g  %.2fs%s%s\n", r.name.c_str(),
                r.holds() ? "PASS" : "FAIL", r.trials, r.failures, r.worst, r.seconds,
                r.detail.empty() ? "" : "  ", r.detail.c_str());
    ok = ok && r.holds();
  }
  return ok ? 0 : 1;
}

int cmd_init(const std::string& config_path, const std::string& out) {
  const auto c = vpme::load_config(config_path);
  c.validate();
  const auto f = initial_from(c);
  vpme::write_ensemble(out, f);
  print({{"particles", f.size()}, {"dim", f.dim}, {"epsilon", f.epsilon}, {"config_hash", c.hash()}});
  return 0;
}

int cmd_deposit(const std::string& in, int grid, const std::string& out) {
  const auto f = vpme::read_ensemble(in);
  const auto rho = vpme::deposit_density(f, grid);
  vpme::write_density(out, rho, f.epsilon, f.time);
  print({{"n", grid}, {"mass", rho.rho.integral()}, {"rho_sup", rho.rho.max()}});
  return 0;
}

int cmd_penrose(const std::string& profile, double sigma, double beam) {
  const auto g0 = profile == "double_bump" ? vpme::double_bump_profile(beam, sigma) : vpme::maxwellian_profile(sigma);
  const auto s = vpme::penrose_sweep(g0, vpme::PenroseGrid::standard());
  print({{"profile", profile}, {"infimum", s.infimum}, {"gamma", s.gamma}, {"tau", s.tau}, {"xi", s.xi},
         {"lipschitz", s.lipschitz}, {"evaluations", s.evaluations}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VPME kinetic plasma simulation and verification lab"};
  app.require_subcommand(1);
  int status = 0;

  std::string rho_path, out, config, a, b, method = "exact", plan, kind, profile = "maxwellian";
  double eps = 1.0, tol = 1e-10, sigma = 1.0, beam = 2.0;
  int order = 1, grid = 64;
  bool quick = false;
  std::uint64_t seed = vpme::SuiteOptions{}.seed;

  auto* solve = app.add_subcommand("solve-field", "solve the Poisson-Boltzmann equation for a density snapshot");
  solve->add_option("--rho", rho_path, "density snapshot")->required()->check(CLI::ExistingFile);
  solve->add_option("--epsilon", eps, "Debye length")->required();
  solve->add_option("--tol", tol, "sup-norm residual target");
  solve->add_option("--out", out, "potential snapshot to write");
  solve->callback([&] { status = cmd_solve_field(rho_path, eps, tol, out); });

  auto* sim = app.add_subcommand("simulate", "run one simulation from a config file");
  sim->add_option("--config", config)->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "output directory")->required();
  sim->callback([&] { status = cmd_simulate(config, out); });

  auto* dist = app.add_subcommand("distance", "Wasserstein distance between two ensemble snapshots");
  dist->add_option("--a", a)->required()->check(CLI::ExistingFile);
  dist->add_option("--b", b)->required()->check(CLI::ExistingFile);
  dist->add_option("--order", order)->check(CLI::IsMember({1, 2}));
  dist->add_option("--method", method)->check(CLI::IsMember({"exact", "entropic"}));
  dist->add_option("--plan-csv", plan, "write the transport plan as i,j,mass");
  dist->callback([&] { status = cmd_distance(a, b, order, method, plan); });

  auto* exp = app.add_subcommand("experiment", "run an epsilon-ladder experiment");
  exp->add_option("kind", kind)->required()->check(CLI::IsMember({"stability", "cauchy"}));
  exp->add_option("--config", config)->required()->check(CLI::ExistingFile);
  exp->add_option("--out", out, "report directory");
  exp->callback([&] { status = cmd_experiment(kind, config, out); });

  auto* ver = app.add_subcommand("verify", "run the inequality suite on synthetic data");
  ver->add_option("suite", kind, "only 'all' is defined")->check(CLI::IsMember({"all"}));
  ver->add_flag("--quick", quick, "one fifth of the trial counts");
  ver->add_option("--seed", seed);
  ver->callback([&] { status = cmd_verify(quick, seed); });

  auto* init = app.add_subcommand("init", "sample the configured initial data into a snapshot");
  init->add_option("--config", config)->required()->check(CLI::ExistingFile);
  init->add_option("--out", out)->required();
  init->callback([&] { status = cmd_init(config, out); });

  auto* dep = app.add_subcommand("deposit", "cloud-in-cell density of an ensemble snapshot");
  dep->add_option("--ensemble", a)->required()->check(CLI::ExistingFile);
  dep->add_option("--grid", grid);
  dep->add_option("--out", out)->required();
  dep->callback([&] { status = cmd_deposit(a, grid, out); });

  auto* pen = app.add_subcommand("penrose", "Penrose functional sweep for a velocity profile");
  pen->add_option("--profile", profile)->check(CLI::IsMember({"maxwellian", "double_bump"}));
  pen->add_option("--sigma", sigma);
  pen->add_option("--beam", beam);
  pen->callback([&] { status = cmd_penrose(profile, sigma, beam); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const vpme::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return status;
}
