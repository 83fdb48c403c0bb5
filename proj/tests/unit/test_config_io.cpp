#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "vpme/config.hpp"
#include "vpme/error.hpp"
#include "vpme/io.hpp"
#include "vpme/verify_suite.hpp"

using namespace vpme;
namespace fs = std::filesystem;

namespace {

const char* kBase = R"(
[run]
d = 1
epsilon = 0.4
dt = 0.02
t_end = 1
N_particles = 500
grid = 32
force = cubic_spline

[initial_data]
family = single_bump
amplitude = 0.2

[experiment]
epsilon_ladder = 0.4, 0.2
perturbation = velocity_shift
rate = polynomial
scale = 0.1
power = 1.5
)";

ErrorCode config_error(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error for: " << text);
  return ErrorCode::Io;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "vpme_unit_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("the canonical form is a fixed point of parsing") {
  const auto c = parse_config(kBase);
  CHECK(c.sim.force == ForceScheme::CubicSpline);
  CHECK(c.epsilon_ladder == std::vector<double>{0.4, 0.2});
  CHECK(c.rate.eta_at(0.2) == doctest::Approx(0.1 * std::pow(0.2, 1.5)));
  const auto again = parse_config(c.canonical());
  CHECK(again.canonical() == c.canonical());
  CHECK(again.hash() == c.hash());
  CHECK(c.hash().size() == 16);
}

TEST_CASE("any changed value changes the hash") {
  const auto base = parse_config(kBase).hash();
  std::string t = kBase;
  t.replace(t.find("amplitude = 0.2"), 15, "amplitude = 0.21");
  CHECK(parse_config(t).hash() != base);
  // Comments and spacing do not.
  CHECK(parse_config(std::string("# note\n") + kBase + "\n\n").hash() == base);
}

TEST_CASE("typos and inconsistent values are configuration errors") {
  const std::string base = kBase;
  CHECK(config_error(base + "\n[run]\nepsilom = 0.3\n") == ErrorCode::Config);
  CHECK(config_error(base + "\n[plots]\nx = 1\n") == ErrorCode::Config);
  std::string t = base;
  t.replace(t.find("grid = 32"), 9, "grid = 3x");
  CHECK(config_error(t) == ErrorCode::Config);
  t = base;
  t.replace(t.find("0.4, 0.2"), 8, "0.2, 0.4");
  CHECK(config_error(t) == ErrorCode::Config);
  t = base;
  t.replace(t.find("force = cubic_spline"), 20, "force = quintic");
  CHECK(config_error(t) == ErrorCode::Config);
}

TEST_CASE("fnv1a matches its published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("binary snapshots preserve every bit") {
  std::mt19937_64 rng(70);
  auto f = random_ensemble(2, 123, rng, 0.37, true);
  f.time = 1.25;
  const auto path = scratch("ens.bin").string();
  write_ensemble(path, f);
  const auto h = read_snapshot_header(path);
  CHECK(h.kind == SnapshotKind::Ensemble);
  CHECK(h.count == 123);
  CHECK(h.dim == 2);
  const auto g = read_ensemble(path);
  CHECK(g.positions == f.positions);
  CHECK(g.velocities == f.velocities);
  CHECK(g.weights == f.weights);
  CHECK(g.epsilon == f.epsilon);
  CHECK(g.time == f.time);

  const auto rho = random_smooth_density(2, 16, rng, 1.0);
  const auto rpath = scratch("rho.bin").string();
  write_density(rpath, rho, 0.3, 2.0);
  double eps = 0.0;
  const auto back = read_density(rpath, &eps);
  CHECK(eps == 0.3);
  const auto a = back.rho.values(), b = rho.rho.values();
  CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
}

TEST_CASE("wrong kinds and truncated files are I/O errors") {
  std::mt19937_64 rng(71);
  const auto rpath = scratch("rho2.bin").string();
  write_density(rpath, random_smooth_density(1, 16, rng, 1.0), 0.3);
  try {
    (void)read_ensemble(rpath);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
  const auto path = scratch("trunc.bin").string();
  write_ensemble(path, random_ensemble(1, 50, rng));
  fs::resize_file(path, fs::file_size(path) - 8);
  CHECK_THROWS_AS((void)read_ensemble(path), Error);
  CHECK_THROWS_AS((void)read_ensemble(scratch("missing.bin").string()), Error);
}

TEST_CASE("run records survive NDJSON, with non-finite values as null") {
  RunRecord r;
  r.config_hash = "0123456789abcdef";
  r.seed = 9;
  r.dim = 2;
  r.epsilon = 0.25;
  for (int k = 0; k < 3; ++k) {
    Checkpoint c;
    c.time = 0.5 * k;
    c.step = 10 * k;
    c.kinetic = 1.0 / 3.0 + k;
    c.mass = 1.0;
    c.extra["w1"] = k == 1 ? INFINITY : 1e-3 * k;
    r.checkpoints.push_back(c);
  }
  r.verdicts.push_back({"check", 1.0, 2.0, 0.5, 0.0, true, false});
  const auto text = run_record_ndjson(r);
  CHECK(text.find("null") != std::string::npos);
  const auto back = parse_run_record(text);
  CHECK(back.config_hash == r.config_hash);
  CHECK(back.checkpoints.size() == 3);
  CHECK(back.checkpoints[2].kinetic == r.checkpoints[2].kinetic);
  CHECK(std::isnan(back.checkpoints[1].extra.at("w1")));
  CHECK(back.verdicts.size() == 1);
  CHECK_FALSE(back.verdicts[0].asserted);
  CHECK(back.all_asserted_pass());
}

TEST_CASE("CSV outputs carry their fixed headers") {
  const auto csv = summary_csv({{0.5, 1e-3, 2e-3, "holds", 0.1}});
  CHECK(csv.rfind("epsilon,eta,sup_W1,verdict,fitted_C\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}
