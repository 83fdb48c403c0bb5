#include "vpme/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "vpme/error.hpp"

namespace vpme {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run",
       {"d", "epsilon", "dt", "t_end", "N_particles", "grid", "seed", "k0", "j0", "m0", "store_stride",
        "checkpoint_stride", "force", "solver_tol"}},
      {"initial_data", {"family", "sigma", "amplitude", "mode", "beam_velocity", "sampling", "analytic_delta"}},
      {"experiment", {"epsilon_ladder", "perturbation", "rate", "eta", "c_star", "zeta", "scale", "power", "threads"}},
      {"distances", {"method", "max_particles", "cadence", "coupling"}},
      {"monitors", {"snapshots", "fields"}},
  };
  return keys;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
T get(const pt::ptree& tree, const std::string& path, T fallback) {
  const auto node = tree.get_child_optional(path);
  if (!node) return fallback;
  try {
    return node->get_value<T>();
  } catch (const pt::ptree_error&) {
    fail(ErrorCode::Config, "bad value for '" + path + "'");
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorCode::Config, "bad number '" + item + "' in epsilon_ladder");
    }
  }
  return out;
}

ForceScheme parse_force(const std::string& s) {
  if (s == "spectral") return ForceScheme::Spectral;
  if (s == "potential_gradient") return ForceScheme::PotentialGradient;
  if (s == "cubic_spline") return ForceScheme::CubicSpline;
  fail(ErrorCode::Config, "unknown force scheme '" + s + "'");
}

PerturbKind parse_perturb(const std::string& s) {
  if (s == "none") return PerturbKind::None;
  if (s == "velocity_shift") return PerturbKind::VelocityShift;
  if (s == "jitter") return PerturbKind::Jitter;
  if (s == "rough_resample") return PerturbKind::RoughResample;
  fail(ErrorCode::Config, "unknown perturbation '" + s + "'");
}

RateKind parse_rate(const std::string& s) {
  if (s == "fixed") return RateKind::Fixed;
  if (s == "exponential") return RateKind::Exponential;
  if (s == "polynomial") return RateKind::Polynomial;
  fail(ErrorCode::Config, "unknown rate '" + s + "'");
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(ErrorCode::Config, "bad boolean for '" + key + "'");
}

}  // namespace

std::string_view to_string(PerturbKind k) {
  switch (k) {
    case PerturbKind::None: return "none";
    case PerturbKind::VelocityShift: return "velocity_shift";
    case PerturbKind::Jitter: return "jitter";
    case PerturbKind::RoughResample: return "rough_resample";
  }
  return "?";
}

std::string_view to_string(RateKind k) {
  switch (k) {
    case RateKind::Fixed: return "fixed";
    case RateKind::Exponential: return "exponential";
    case RateKind::Polynomial: return "polynomial";
  }
  return "?";
}

std::string_view to_string(ForceScheme s) {
  switch (s) {
    case ForceScheme::Spectral: return "spectral";
    case ForceScheme::PotentialGradient: return "potential_gradient";
    case ForceScheme::CubicSpline: return "cubic_spline";
  }
  return "?";
}

double RateParams::eta_at(double epsilon) const {
  switch (kind) {
    case RateKind::Fixed: return eta;
    case RateKind::Exponential: return scale * std::exp(-c_star * std::pow(epsilon, -zeta));
    case RateKind::Polynomial: return scale * std::pow(epsilon, power);
  }
  return eta;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void ExperimentConfig::validate() const {
  try {
    sim.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Config, std::string("run: ") + e.what());
  }
  if (sim.dim != initial.dim) fail(ErrorCode::Config, "run.d and initial data dimension differ");
  if (sim.dim < 1 || sim.dim > 2) fail(ErrorCode::Config, "d must be 1 or 2");
  if (n_particles == 0) fail(ErrorCode::Config, "N_particles must be positive");
  for (std::size_t i = 0; i < epsilon_ladder.size(); ++i) {
    if (!(epsilon_ladder[i] > 0.0)) fail(ErrorCode::Config, "epsilon_ladder entries must be positive");
    if (i > 0 && !(epsilon_ladder[i] < epsilon_ladder[i - 1]))
      fail(ErrorCode::Config, "epsilon_ladder must be strictly decreasing");
  }
  if (perturbation != PerturbKind::None) {
    for (double e : epsilon_ladder.empty() ? std::vector<double>{sim.epsilon} : epsilon_ladder) {
      const double eta = rate.eta_at(e);
      if (!(eta > 0.0) || !std::isfinite(eta))
        fail(ErrorCode::Config, "perturbation size must be positive at epsilon " + fmt(e));
    }
  }
  if (distance_cadence < 1) fail(ErrorCode::Config, "distances.cadence must be >= 1");
  if (coupling != "identity" && coupling != "optimal") fail(ErrorCode::Config, "coupling must be identity or optimal");
  if (threads < 1) fail(ErrorCode::Config, "threads must be >= 1");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream o;
  o << "[run]\n"
    << "d = " << sim.dim << "\n"
    << "epsilon = " << fmt(sim.epsilon) << "\n"
    << "dt = " << fmt(sim.dt) << "\n"
    << "t_end = " << fmt(sim.t_end) << "\n"
    << "N_particles = " << n_particles << "\n"
    << "grid = " << sim.grid_resolution << "\n"
    << "seed = " << sim.seed << "\n"
    << "k0 = " << fmt(sim.k0) << "\n"
    << "j0 = " << fmt(j0) << "\n"
    << "m0 = " << fmt(m0) << "\n"
    << "store_stride = " << sim.store_stride << "\n"
    << "checkpoint_stride = " << sim.checkpoint_stride << "\n"
    << "force = " << to_string(sim.force) << "\n"
    << "solver_tol = " << fmt(sim.solver_tol) << "\n"
    << "[initial_data]\n"
    << "family = " << to_string(initial.family) << "\n"
    << "sigma = " << fmt(initial.sigma) << "\n"
    << "amplitude = " << fmt(initial.amplitude) << "\n"
    << "mode = " << initial.mode << "\n"
    << "beam_velocity = " << fmt(initial.beam_velocity) << "\n"
    << "sampling = " << (initial.quasi_random ? "quasi" : "pseudo") << "\n"
    << "analytic_delta = " << fmt(initial.analytic_delta) << "\n"
    << "[experiment]\n"
    << "epsilon_ladder = ";
  for (std::size_t i = 0; i < epsilon_ladder.size(); ++i) o << (i ? "," : "") << fmt(epsilon_ladder[i]);
  o << "\n"
    << "perturbation = " << to_string(perturbation) << "\n"
    << "rate = " << to_string(rate.kind) << "\n"
    << "eta = " << fmt(rate.eta) << "\n"
    << "c_star = " << fmt(rate.c_star) << "\n"
    << "zeta = " << fmt(rate.zeta) << "\n"
    << "scale = " << fmt(rate.scale) << "\n"
    << "power = " << fmt(rate.power) << "\n"
    << "threads = " << threads << "\n"
    << "[distances]\n"
    << "method = " << (distances.method == OtMethod::Exact ? "exact" : "entropic") << "\n"
    << "max_particles = " << distances.max_particles << "\n"
    << "cadence = " << distance_cadence << "\n"
    << "coupling = " << coupling << "\n"
    << "[monitors]\n"
    << "snapshots = " << (snapshots ? "true" : "false") << "\n"
    << "fields = " << (fields ? "true" : "false") << "\n";
  return o.str();
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

ExperimentConfig parse_config(std::string_view text) {
  // '#' comments are accepted in addition to the ini parser's ';'.
  std::istringstream in{std::string(text)};
  std::ostringstream cleaned;
  for (std::string line; std::getline(in, line);) {
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line[first] == '#') continue;
    cleaned << line << '\n';
  }
  pt::ptree tree;
  try {
    std::istringstream src(cleaned.str());
    pt::read_ini(src, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::Config, std::string("config syntax: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) fail(ErrorCode::Config, "unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) fail(ErrorCode::Config, "key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) fail(ErrorCode::Config, "unknown key '" + section + "." + key + "'");
    }
  }

  ExperimentConfig c;
  auto& s = c.sim;
  s.dim = get(tree, "run.d", s.dim);
  s.epsilon = get(tree, "run.epsilon", s.epsilon);
  s.dt = get(tree, "run.dt", s.dt);
  s.t_end = get(tree, "run.t_end", s.t_end);
  c.n_particles = get<std::size_t>(tree, "run.N_particles", c.n_particles);
  s.grid_resolution = get(tree, "run.grid", s.grid_resolution);
  s.seed = get<std::uint64_t>(tree, "run.seed", s.seed);
  s.k0 = get(tree, "run.k0", s.k0);
  c.j0 = get(tree, "run.j0", c.j0);
  c.m0 = get(tree, "run.m0", c.m0);
  s.store_stride = get(tree, "run.store_stride", s.store_stride);
  s.checkpoint_stride = get(tree, "run.checkpoint_stride", s.checkpoint_stride);
  s.force = parse_force(get<std::string>(tree, "run.force", "spectral"));
  s.solver_tol = get(tree, "run.solver_tol", s.solver_tol);

  auto& g = c.initial;
  try {
    g.family = parse_family(get<std::string>(tree, "initial_data.family", "equilibrium"));
  } catch (const Error& e) {
    fail(ErrorCode::UnknownFamily, e.message());
  }
  g.dim = s.dim;
  g.epsilon = s.epsilon;
  g.k0 = s.k0;
  g.sigma = get(tree, "initial_data.sigma", g.sigma);
  g.amplitude = get(tree, "initial_data.amplitude", g.amplitude);
  g.mode = get(tree, "initial_data.mode", g.mode);
  g.beam_velocity = get(tree, "initial_data.beam_velocity", g.beam_velocity);
  const auto sampling = get<std::string>(tree, "initial_data.sampling", "quasi");
  if (sampling != "quasi" && sampling != "pseudo") fail(ErrorCode::Config, "sampling must be quasi or pseudo");
  g.quasi_random = sampling == "quasi";
  g.analytic_delta = get(tree, "initial_data.analytic_delta", g.analytic_delta);

  if (auto ladder = tree.get_optional<std::string>("experiment.epsilon_ladder"); ladder && !ladder->empty())
    c.epsilon_ladder = parse_list(*ladder);
  c.perturbation = parse_perturb(get<std::string>(tree, "experiment.perturbation", "none"));
  c.rate.kind = parse_rate(get<std::string>(tree, "experiment.rate", "fixed"));
  c.rate.eta = get(tree, "experiment.eta", c.rate.eta);
  c.rate.c_star = get(tree, "experiment.c_star", c.rate.c_star);
  c.rate.zeta = get(tree, "experiment.zeta", c.rate.zeta);
  c.rate.scale = get(tree, "experiment.scale", c.rate.scale);
  c.rate.power = get(tree, "experiment.power", c.rate.power);
  c.threads = get(tree, "experiment.threads", c.threads);

  const auto method = get<std::string>(tree, "distances.method", "exact");
  if (method != "exact" && method != "entropic") fail(ErrorCode::Config, "distances.method must be exact or entropic");
  c.distances.method = method == "exact" ? OtMethod::Exact : OtMethod::Entropic;
  c.distances.max_particles = get(tree, "distances.max_particles", c.distances.max_particles);
  c.distance_cadence = get(tree, "distances.cadence", c.distance_cadence);
  c.coupling = get<std::string>(tree, "distances.coupling", c.coupling);

  c.snapshots = parse_bool(get<std::string>(tree, "monitors.snapshots", "true"), "monitors.snapshots");
  c.fields = parse_bool(get<std::string>(tree, "monitors.fields", "false"), "monitors.fields");

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace vpme
