#include "vpme/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "vpme/error.hpp"

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace vpme {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'V', 'P', 'M', 'E'};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(std::istream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) fail(ErrorCode::Io, "truncated snapshot '" + path + "'");
  return v;
}

void put_doubles(std::ostream& out, std::span<const double> xs) {
  out.write(reinterpret_cast<const char*>(xs.data()), static_cast<std::streamsize>(xs.size_bytes()));
}

std::vector<double> take_doubles(std::istream& in, std::size_t n, const std::string& path) {
  std::vector<double> xs(n);
  in.read(reinterpret_cast<char*>(xs.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) fail(ErrorCode::Io, "truncated snapshot '" + path + "'");
  return xs;
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  return out;
}

void write_header(std::ostream& out, const SnapshotHeader& h) {
  out.write(kMagic, 4);
  put(out, h.version);
  put(out, static_cast<std::uint32_t>(h.kind));
  put(out, h.dim);
  put(out, h.count);
  put(out, h.epsilon);
  put(out, h.time);
}

SnapshotHeader read_header(std::istream& in, const std::string& path) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) fail(ErrorCode::Io, "'" + path + "' is not a VPME snapshot");
  SnapshotHeader h;
  h.version = take<std::uint32_t>(in, path);
  if (h.version != kSnapshotVersion) fail(ErrorCode::Io, "unsupported snapshot version in '" + path + "'");
  const auto kind = take<std::uint32_t>(in, path);
  if (kind > 2) fail(ErrorCode::Io, "unknown snapshot kind in '" + path + "'");
  h.kind = static_cast<SnapshotKind>(kind);
  h.dim = take<std::uint32_t>(in, path);
  if (h.dim < 1 || h.dim > 2) fail(ErrorCode::DimensionMismatch, "snapshot dimension must be 1 or 2");
  h.count = take<std::uint64_t>(in, path);
  h.epsilon = take<double>(in, path);
  h.time = take<double>(in, path);
  return h;
}

std::ifstream open_snapshot(const std::string& path, SnapshotKind expected, SnapshotHeader& h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  h = read_header(in, path);
  if (h.kind != expected) fail(ErrorCode::Io, "'" + path + "' holds a different snapshot kind");
  return in;
}

int side_length(std::uint64_t count, std::uint32_t dim, const std::string& path) {
  const auto n = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(count), 1.0 / dim)));
  std::uint64_t c = 1;
  for (std::uint32_t a = 0; a < dim; ++a) c *= n;
  if (c != count) fail(ErrorCode::Io, "grid size in '" + path + "' is not a perfect power");
  return static_cast<int>(n);
}

PeriodicGrid grid_from(int dim, int n, std::vector<double> values) {
  PeriodicGrid g(dim, n);
  std::copy(values.begin(), values.end(), g.values().begin());
  return g;
}

// JSON has no inf/NaN; they travel as null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double num_of(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::Io, std::string("run record field '") + key + "' missing");
  if (it->is_null()) return std::numeric_limits<double>::quiet_NaN();
  return it->get<double>();
}

}  // namespace

SnapshotHeader read_snapshot_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  return read_header(in, path);
}

void write_ensemble(const std::string& path, const ParticleEnsemble& f) {
  f.validate();
  auto out = open_out(path, true);
  write_header(out, {kSnapshotVersion, SnapshotKind::Ensemble, static_cast<std::uint32_t>(f.dim), f.size(),
                     f.epsilon, f.time});
  put_doubles(out, f.positions);
  put_doubles(out, f.velocities);
  put_doubles(out, f.weights);
  if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

ParticleEnsemble read_ensemble(const std::string& path) {
  SnapshotHeader h;
  auto in = open_snapshot(path, SnapshotKind::Ensemble, h);
  ParticleEnsemble f;
  f.dim = static_cast<int>(h.dim);
  f.epsilon = h.epsilon;
  f.time = h.time;
  f.positions = take_doubles(in, h.count * h.dim, path);
  f.velocities = take_doubles(in, h.count * h.dim, path);
  f.weights = take_doubles(in, h.count, path);
  f.winding.assign(f.positions.size(), 0);
  f.validate();
  return f;
}

void write_density(const std::string& path, const GridDensity& rho, double epsilon, double time) {
  auto out = open_out(path, true);
  write_header(out, {kSnapshotVersion, SnapshotKind::Density, static_cast<std::uint32_t>(rho.dim()), rho.rho.size(),
                     epsilon, time});
  put_doubles(out, rho.rho.values());
  if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

GridDensity read_density(const std::string& path, double* epsilon) {
  SnapshotHeader h;
  auto in = open_snapshot(path, SnapshotKind::Density, h);
  const int n = side_length(h.count, h.dim, path);
  GridDensity g{grid_from(static_cast<int>(h.dim), n, take_doubles(in, h.count, path)), 0.0};
  g.mass = g.rho.integral();
  if (epsilon) *epsilon = h.epsilon;
  return g;
}

void write_potential(const std::string& path, const PotentialField& U, double time) {
  auto out = open_out(path, true);
  write_header(out, {kSnapshotVersion, SnapshotKind::Potential, static_cast<std::uint32_t>(U.dim()), U.U.size(),
                     U.epsilon, time});
  put_doubles(out, U.U.values());
  for (const auto& e : U.E) put_doubles(out, e.values());
  if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

PotentialField read_potential(const std::string& path) {
  SnapshotHeader h;
  auto in = open_snapshot(path, SnapshotKind::Potential, h);
  const int n = side_length(h.count, h.dim, path);
  const int d = static_cast<int>(h.dim);
  PotentialField p;
  p.epsilon = h.epsilon;
  p.U = grid_from(d, n, take_doubles(in, h.count, path));
  for (int a = 0; a < d; ++a) p.E.push_back(grid_from(d, n, take_doubles(in, h.count, path)));
  return p;
}

std::string ensemble_ndjson(const ParticleEnsemble& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = f.x(i), v = f.v(i);
    json j{{"x", std::vector<double>(x.begin(), x.end())},
           {"v", std::vector<double>(v.begin(), v.end())},
           {"w", f.weights[i]}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string run_record_ndjson(const RunRecord& r) {
  std::string out;
  json head{{"type", "run"},           {"schema_version", RunRecord::kSchemaVersion},
            {"config_hash", r.config_hash}, {"seed", r.seed},
            {"wall_seconds", num(r.wall_seconds)}, {"dim", r.dim},
            {"epsilon", num(r.epsilon)},   {"label", r.label}};
  out += head.dump() + '\n';
  for (const auto& c : r.checkpoints) {
    json j{{"type", "checkpoint"},
           {"time", num(c.time)},
           {"step", c.step},
           {"kinetic", num(c.kinetic)},
           {"gradient", num(c.gradient)},
           {"entropy", num(c.entropy)},
           {"total_energy", num(c.total_energy)},
           {"moment_k", num(c.moment_k)},
           {"moment_k_sup", num(c.moment_k_sup)},
           {"rho_sup", num(c.rho_sup)},
           {"rho_sup_running", num(c.rho_sup_running)},
           {"rho_lq", num(c.rho_lq)},
           {"q_star", num(c.q_star)},
           {"q_star_running", num(c.q_star_running)},
           {"q_tt", num(c.q_tt)},
           {"mass", num(c.mass)},
           {"field_residual", num(c.field_residual)},
           {"newton_iterations", c.newton_iterations}};
    json extra = json::object();
    for (const auto& [k, v] : c.extra) extra[k] = num(v);
    j["extra"] = extra;
    out += j.dump() + '\n';
  }
  for (const auto& v : r.verdicts) {
    json j{{"type", "verdict"}, {"name", v.name},   {"lhs", num(v.lhs)},   {"rhs", num(v.rhs)},
           {"fitted_c", num(v.fitted_c)}, {"slack", num(v.slack)}, {"holds", v.holds}, {"asserted", v.asserted}};
    out += j.dump() + '\n';
  }
  return out;
}

void write_run_record(const std::string& path, const RunRecord& record) {
  write_text(path, run_record_ndjson(record));
}

RunRecord parse_run_record(const std::string& ndjson) {
  RunRecord r;
  std::istringstream in(ndjson);
  bool have_head = false;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorCode::Io, "run record line " + std::to_string(lineno) + ": " + e.what());
    }
    const auto type = j.value("type", std::string{});
    if (type == "run") {
      if (j.value("schema_version", -1) != RunRecord::kSchemaVersion)
        fail(ErrorCode::Io, "unsupported run record schema version");
      r.config_hash = j.value("config_hash", std::string{});
      r.seed = j.value("seed", std::uint64_t{0});
      r.wall_seconds = num_of(j, "wall_seconds");
      r.dim = j.value("dim", 1);
      r.epsilon = num_of(j, "epsilon");
      r.label = j.value("label", std::string{});
      have_head = true;
    } else if (type == "checkpoint") {
      Checkpoint c;
      c.time = num_of(j, "time");
      c.step = j.value("step", std::int64_t{0});
      c.kinetic = num_of(j, "kinetic");
      c.gradient = num_of(j, "gradient");
      c.entropy = num_of(j, "entropy");
      c.total_energy = num_of(j, "total_energy");
      c.moment_k = num_of(j, "moment_k");
      c.moment_k_sup = num_of(j, "moment_k_sup");
      c.rho_sup = num_of(j, "rho_sup");
      c.rho_sup_running = num_of(j, "rho_sup_running");
      c.rho_lq = num_of(j, "rho_lq");
      c.q_star = num_of(j, "q_star");
      c.q_star_running = num_of(j, "q_star_running");
      c.q_tt = num_of(j, "q_tt");
      c.mass = num_of(j, "mass");
      c.field_residual = num_of(j, "field_residual");
      c.newton_iterations = j.value("newton_iterations", 0);
      if (const auto it = j.find("extra"); it != j.end()) {
        for (const auto& [k, v] : it->items()) c.extra[k] = v.is_null() ? std::nan("") : v.get<double>();
      }
      r.checkpoints.push_back(std::move(c));
    } else if (type == "verdict") {
      Verdict v;
      v.name = j.value("name", std::string{});
      v.lhs = num_of(j, "lhs");
      v.rhs = num_of(j, "rhs");
      v.fitted_c = num_of(j, "fitted_c");
      v.slack = num_of(j, "slack");
      v.holds = j.value("holds", false);
      v.asserted = j.value("asserted", true);
      r.verdicts.push_back(std::move(v));
    } else {
      fail(ErrorCode::Io, "run record line " + std::to_string(lineno) + " has unknown type '" + type + "'");
    }
  }
  if (!have_head) fail(ErrorCode::Io, "run record has no header line");
  r.validate();
  return r;
}

RunRecord read_run_record(const std::string& path) { return parse_run_record(read_text(path)); }

void write_run_manifest(const std::string& path, const std::string& config_text, const std::string& config_hash,
                        std::uint64_t seed) {
  json j{{"schema_version", RunRecord::kSchemaVersion},
         {"snapshot_version", kSnapshotVersion},
         {"config_hash", config_hash},
         {"seed", seed},
         {"config", config_text}};
  write_text(path, j.dump(2) + '\n');
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream o;
  o.precision(17);
  o << "epsilon,eta,sup_W1,verdict,fitted_C\n";
  for (const auto& r : rows) o << r.epsilon << ',' << r.eta << ',' << r.sup_w1 << ',' << r.verdict << ',' << r.fitted_c << '\n';
  return o.str();
}

std::string plan_csv(const TransportPlan& plan) {
  std::ostringstream o;
  o.precision(17);
  o << "i,j,mass\n";
  for (const auto& p : plan.pairs) o << p.i << ',' << p.j << ',' << p.mass << '\n';
  return o.str();
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path, false);
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace vpme
