#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "vpme/config.hpp"
#include "vpme/experiments.hpp"
#include "vpme/io.hpp"

using namespace vpme;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(const char* family, std::vector<double> ladder) {
  ExperimentConfig c;
  c.sim.dt = 0.01;
  c.sim.t_end = 0.2;
  c.sim.grid_resolution = 32;
  c.sim.checkpoint_stride = 5;
  c.n_particles = 1500;
  c.initial.family = parse_family(family);
  c.initial.amplitude = 0.2;
  c.epsilon_ladder = std::move(ladder);
  c.sim.epsilon = c.epsilon_ladder.front();
  c.initial.epsilon = c.sim.epsilon;
  c.distances.max_particles = 200;
  return c;
}

}  // namespace

TEST_CASE("fitted steps respect the cap and divide the horizon") {
  std::mt19937_64 rng(80);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const double T = 0.1 + 5.0 * u(rng), dt = 1e-3 + 0.1 * u(rng), eps = 0.01 + u(rng);
    const double h = fitted_dt(T, dt, eps);
    CHECK(h <= std::min(dt, 0.1 * eps) * (1 + 1e-12));
    const double steps = T / h;
    CHECK(std::abs(steps - std::round(steps)) < 1e-9 * steps);
    // Largest such step: one fewer step would break the cap.
    CHECK(T / (std::round(steps) - 1.0) > std::min(dt, 0.1 * eps) * (1 - 1e-12));
  }
}

TEST_CASE("the Cauchy proxy shrinks along a ladder below the response peak") {
  auto c = small_config("analytic_perturbed", {0.2, 0.1, 0.05});
  c.n_particles = 4000;
  const auto r = run_quasineutral_cauchy(c);
  REQUIRE(r.rows.size() == 3);
  for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].sup_w1 < r.rows[i - 1].sup_w1);
  for (const auto& row : r.rows) CHECK(row.w1_initial == 0.0);
}

TEST_CASE("a stability ladder writes a consistent report") {
  auto c = small_config("single_bump", {0.4, 0.2});
  c.perturbation = PerturbKind::VelocityShift;
  c.rate.kind = RateKind::Fixed;
  c.rate.eta = 1e-3;
  c.validate();
  const auto r = run_stability_experiment(c);
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) {
    CHECK(row.eta == 1e-3);
    CHECK(row.w1_initial == doctest::Approx(1e-3).epsilon(1e-6));
    CHECK(row.sup_w1 >= row.w1_initial * (1 - 1e-9));
    CHECK(row.times.size() == row.w1.size());
  }
  CHECK(r.config_hash == c.hash());

  const auto dir = fs::temp_directory_path() / "vpme_integration_report";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_report(dir.string(), r, c);
  CHECK(fs::exists(dir / "run.json"));
  CHECK(fs::exists(dir / "summary.csv"));
  const auto csv = read_text((dir / "summary.csv").string());
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto rec = read_run_record((dir / ("record_" + std::to_string(i) + ".ndjson")).string());
    CHECK(rec.checkpoints.size() == r.records[i].checkpoints.size());
  }
}
