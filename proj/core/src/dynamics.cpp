#include "vpme/dynamics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "vpme/error.hpp"

namespace vpme {

std::int64_t SimParams::steps() const { return static_cast<std::int64_t>(std::llround(t_end / dt)); }

void SimParams::validate() const {
  if (dim != 1 && dim != 2) fail(ErrorCode::InvalidArgument, "simulation dimension must be 1 or 2");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) fail(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1]");
  if (!(dt > 0.0) || !(t_end > 0.0)) fail(ErrorCode::InvalidArgument, "dt and t_end must be positive");
  if (dt > dt_cap_factor * epsilon * (1.0 + 1e-12)) {
    fail(ErrorCode::InvalidArgument, "dt = " + std::to_string(dt) + " exceeds the stability cap " +
                                         std::to_string(dt_cap_factor) + " * epsilon");
  }
  const double ratio = t_end / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    fail(ErrorCode::InvalidArgument, "t_end / dt must be an integer");
  }
  if (grid_resolution < 8 || (grid_resolution & (grid_resolution - 1)) != 0) {
    fail(ErrorCode::ResolutionNotPowerOfTwo, "grid resolution must be a power of two >= 8");
  }
  if (store_stride < 1 || checkpoint_stride < 1) fail(ErrorCode::InvalidArgument, "strides must be >= 1");
  if (!(k0 > dim)) fail(ErrorCode::InvalidArgument, "moment exponent k0 must exceed d");
}

std::size_t TrajectorySet::index_at(double t) const {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
  }
  fail(ErrorCode::OutOfRange, "time " + std::to_string(t) + " is not a stored trajectory step");
}

ParticleEnsemble TrajectorySet::ensemble_at(std::size_t k, const std::vector<double>& weights, double epsilon) const {
  if (k >= times.size()) fail(ErrorCode::OutOfRange, "stored step index out of range");
  ParticleEnsemble f;
  f.dim = dim;
  f.epsilon = epsilon;
  f.time = times[k];
  f.weights = weights;
  f.velocities = velocities[k];
  const auto& lp = lifted_positions[k];
  f.positions.resize(lp.size());
  f.winding.resize(lp.size());
  for (std::size_t i = 0; i < lp.size(); ++i) {
    const double w = std::floor(lp[i] + 0.5);
    double x = lp[i] - w;
    auto wi = static_cast<std::int64_t>(w);
    if (x >= 0.5) {
      x -= 1.0;
      ++wi;
    }
    f.positions[i] = x;
    f.winding[i] = wi;
  }
  return f;
}

namespace {

struct Cell {
  int j;
  double frac;
};

Cell locate(double x, int n) {
  const double s = (x + 0.5) * n;
  const double fl = std::floor(s);
  int j = static_cast<int>(fl);
  j = ((j % n) + n) % n;
  return {j, s - fl};
}

// Cubic B-spline M4 on node offsets t ∈ (−2, 2) and its derivative.
double bspline3(double t) {
  t = std::abs(t);
  if (t < 1.0) return 2.0 / 3.0 - t * t + 0.5 * t * t * t;
  if (t < 2.0) return (2.0 - t) * (2.0 - t) * (2.0 - t) / 6.0;
  return 0.0;
}

double bspline3_prime(double t) {
  const double s = t < 0.0 ? -1.0 : 1.0;
  t = std::abs(t);
  if (t < 1.0) return s * (-2.0 * t + 1.5 * t * t);
  if (t < 2.0) return -0.5 * s * (2.0 - t) * (2.0 - t);
  return 0.0;
}

// The four nodes j with |t − j| < 2 for grid coordinate t = (x + ½)n.
struct Stencil {
  int j0;
  double k[4], dk[4];
};

Stencil stencil(double x, int n) {
  const double t = (x + 0.5) * n;
  Stencil st;
  st.j0 = static_cast<int>(std::floor(t)) - 1;
  for (int m = 0; m < 4; ++m) {
    const double off = t - (st.j0 + m);
    st.k[m] = bspline3(off);
    st.dk[m] = bspline3_prime(off);
  }
  return st;
}

GridDensity deposit_cubic(const ParticleEnsemble& f, int n) {
  GridDensity out{PeriodicGrid(f.dim, n), 0.0};
  PeriodicGrid& g = out.rho;
  const double cell = std::pow(static_cast<double>(n), f.dim);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = f.weights[i] * cell;
    out.mass += f.weights[i];
    if (f.dim == 1) {
      const Stencil s = stencil(f.positions[i], n);
      for (int a = 0; a < 4; ++a) g[g.flat_index(s.j0 + a)] += w * s.k[a];
    } else {
      const Stencil s0 = stencil(f.positions[2 * i], n), s1 = stencil(f.positions[2 * i + 1], n);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) g[g.flat_index(s0.j0 + a, s1.j0 + b)] += w * s0.k[a] * s1.k[b];
    }
  }
  return out;
}

void drift(ParticleEnsemble& f, double dt) {
  for (std::size_t k = 0; k < f.positions.size(); ++k) {
    double x = f.positions[k] + dt * f.velocities[k];
    const double w = std::floor(x + 0.5);
    x -= w;
    auto wi = static_cast<std::int64_t>(w);
    if (x >= 0.5) {
      x -= 1.0;
      ++wi;
    } else if (x < -0.5) {
      x += 1.0;
      --wi;
    }
    f.positions[k] = x;
    f.winding[k] += wi;
  }
}

void kick(ParticleEnsemble& f, const std::vector<double>& a, double h) {
  for (std::size_t k = 0; k < f.velocities.size(); ++k) f.velocities[k] += h * a[k];
}

PotentialField solve_for(const ParticleEnsemble& f, const SimParams& p, const PeriodicGrid* guess,
                         GridDensity* rho_out = nullptr) {
  GridDensity rho = deposit_for(f, p.grid_resolution, p.force);
  SolverOptions opts;
  opts.tol = p.solver_tol;
  try {
    PotentialField U = solve_poisson_boltzmann(rho.rho, p.epsilon, opts, guess);
    if (rho_out) *rho_out = std::move(rho);
    return U;
  } catch (const Error& e) {
    fail(e.code(), "field solve failed at t = " + std::to_string(f.time) + ": " + e.message());
  }
}

void prepare(ParticleEnsemble& f, const SimParams& p) {
  if (f.dim != p.dim) fail(ErrorCode::DimensionMismatch, "ensemble and parameters disagree on dimension");
  if (f.winding.size() != f.positions.size()) f.winding.assign(f.positions.size(), 0);
  f.epsilon = p.epsilon;
}

double norm_at(const std::vector<double>& a, std::size_t i, int d) {
  if (d == 1) return std::abs(a[i]);
  return std::hypot(a[2 * i], a[2 * i + 1]);
}

}  // namespace

GridDensity deposit_for(const ParticleEnsemble& f, int resolution, ForceScheme scheme) {
  if (scheme != ForceScheme::CubicSpline) return deposit_density(f, resolution);
  if (resolution < 8 || (resolution & (resolution - 1)) != 0) {
    fail(ErrorCode::ResolutionNotPowerOfTwo, "grid resolution must be a power of two >= 8");
  }
  return deposit_cubic(f, resolution);
}

std::vector<double> particle_field(const ParticleEnsemble& f, const PotentialField& U, ForceScheme scheme) {
  const int d = f.dim;
  if (U.dim() != d) fail(ErrorCode::DimensionMismatch, "field and ensemble dimensions differ");
  const int n = U.U.n();
  std::vector<double> a(f.positions.size());
  if (scheme == ForceScheme::Spectral) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (int ax = 0; ax < d; ++ax) a[i * d + ax] = interpolate_cic(U.E[static_cast<std::size_t>(ax)], f.x(i));
    }
    return a;
  }
  const PeriodicGrid& u = U.U;
  const double inv_h = static_cast<double>(n);
  if (scheme == ForceScheme::CubicSpline) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (d == 1) {
        const Stencil s = stencil(f.positions[i], n);
        double g = 0.0;
        for (int m = 0; m < 4; ++m) g += u[u.flat_index(s.j0 + m)] * s.dk[m];
        a[i] = -g * inv_h;
      } else {
        const Stencil s0 = stencil(f.positions[2 * i], n), s1 = stencil(f.positions[2 * i + 1], n);
        double g0 = 0.0, g1 = 0.0;
        for (int p = 0; p < 4; ++p) {
          for (int q = 0; q < 4; ++q) {
            const double uv = u[u.flat_index(s0.j0 + p, s1.j0 + q)];
            g0 += uv * s0.dk[p] * s1.k[q];
            g1 += uv * s0.k[p] * s1.dk[q];
          }
        }
        a[2 * i] = -g0 * inv_h;
        a[2 * i + 1] = -g1 * inv_h;
      }
    }
    return a;
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (d == 1) {
      const Cell c = locate(f.positions[i], n);
      a[i] = -(u[u.flat_index(c.j + 1)] - u[u.flat_index(c.j)]) * inv_h;
    } else {
      const Cell c0 = locate(f.positions[2 * i], n);
      const Cell c1 = locate(f.positions[2 * i + 1], n);
      const double u00 = u[u.flat_index(c0.j, c1.j)], u10 = u[u.flat_index(c0.j + 1, c1.j)];
      const double u01 = u[u.flat_index(c0.j, c1.j + 1)], u11 = u[u.flat_index(c0.j + 1, c1.j + 1)];
      a[2 * i] = -((1.0 - c1.frac) * (u10 - u00) + c1.frac * (u11 - u01)) * inv_h;
      a[2 * i + 1] = -((1.0 - c0.frac) * (u01 - u00) + c0.frac * (u11 - u10)) * inv_h;
    }
  }
  return a;
}

ParticleEnsemble step(const ParticleEnsemble& f0, const SimParams& p) {
  ParticleEnsemble f = f0;
  prepare(f, p);
  const PotentialField U0 = solve_for(f, p, nullptr);
  kick(f, particle_field(f, U0, p.force), 0.5 * p.dt);
  drift(f, p.dt);
  f.time += p.dt;
  const PotentialField U1 = solve_for(f, p, &U0.U);
  kick(f, particle_field(f, U1, p.force), 0.5 * p.dt);
  return f;
}

SimulationResult simulate(const ParticleEnsemble& f0, const SimParams& p, const MonitorSet& monitors) {
  p.validate();
  f0.validate();
  const auto start = std::chrono::steady_clock::now();
  ParticleEnsemble f = f0;
  prepare(f, p);
  f.time = 0.0;
  const int d = p.dim;
  const std::size_t n = f.size();
  const std::int64_t steps = p.steps();

  SimulationResult out;
  out.record.dim = d;
  out.record.epsilon = p.epsilon;
  out.record.seed = p.seed;
  TrajectorySet& traj = out.trajectories;
  traj.dim = d;
  traj.particles = n;
  traj.v0 = f.velocities;

  GridDensity rho{PeriodicGrid(d, p.grid_resolution), 1.0};
  PotentialField U = solve_for(f, p, nullptr, &rho);
  std::vector<double> acc = particle_field(f, U, p.force);
  std::vector<double> qint(n, 0.0);
  double moment_sup = 0.0, rho_sup_run = 0.0, q_run = 0.0;

  auto store = [&]() {
    if (!monitors.trajectories) return;
    traj.times.push_back(f.time);
    std::vector<double> lifted(f.positions.size());
    for (std::size_t k = 0; k < lifted.size(); ++k) lifted[k] = f.positions[k] + static_cast<double>(f.winding[k]);
    traj.lifted_positions.push_back(std::move(lifted));
    traj.velocities.push_back(f.velocities);
    std::vector<double> mag(n);
    for (std::size_t i = 0; i < n; ++i) mag[i] = norm_at(acc, i, d);
    traj.field_magnitude.push_back(std::move(mag));
  };

  auto checkpoint = [&](std::int64_t s) {
    Checkpoint c;
    c.time = f.time;
    c.step = s;
    const EnergyTerms e = energy(f, U);
    c.kinetic = e.kinetic;
    c.gradient = e.gradient;
    c.entropy = e.entropy;
    c.total_energy = e.total();
    c.moment_k = moment(f, p.k0).value;
    moment_sup = std::max(moment_sup, c.moment_k);
    c.moment_k_sup = moment_sup;
    c.rho_sup = rho.rho.max();
    rho_sup_run = std::max(rho_sup_run, c.rho_sup);
    c.rho_sup_running = rho_sup_run;
    c.rho_lq = rho.rho.lp_norm((d + 2.0) / d);
    double qs = 0.0, qt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dv2 = 0.0;
      for (int ax = 0; ax < d; ++ax) {
        const double dv = f.velocities[i * d + ax] - traj.v0[i * d + ax];
        dv2 += dv * dv;
      }
      qs = std::max(qs, std::sqrt(dv2));
      qt = std::max(qt, qint[i]);
    }
    c.q_star = qs;
    q_run = std::max(q_run, qs);
    c.q_star_running = q_run;
    c.q_tt = qt;
    double mass = 0.0;
    for (double w : f.weights) mass += w;
    c.mass = mass;
    c.field_residual = U.residual_norm;
    c.newton_iterations = U.iterations;
    if (monitors.on_checkpoint) monitors.on_checkpoint(f, c);
    out.record.checkpoints.push_back(std::move(c));
    if (monitors.snapshots) out.snapshots.push_back(f);
    if (monitors.fields) out.fields.push_back(U);
  };

  store();
  checkpoint(0);
  const double h = 0.5 * p.dt;
  for (std::int64_t s = 1; s <= steps; ++s) {
    kick(f, acc, h);
    drift(f, p.dt);
    f.time = static_cast<double>(s) * p.dt;
    const std::vector<double> old = acc;
    U = solve_for(f, p, &U.U, &rho);
    acc = particle_field(f, U, p.force);
    kick(f, acc, h);
    for (std::size_t i = 0; i < n; ++i) qint[i] += h * (norm_at(old, i, d) + norm_at(acc, i, d));
    if (s % p.store_stride == 0 || s == steps) store();
    if (s % p.checkpoint_stride == 0 || s == steps) checkpoint(s);
  }
  out.final_state = f;
  out.record.verdicts = run_invariants(out.record);
  out.record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<Verdict> run_invariants(const RunRecord& record, double slack) {
  Verdict order, mass;
  order.name = "q_tt_dominates_q_star";
  order.slack = slack;
  order.holds = true;
  mass.name = "mass_conserved";
  mass.holds = !record.checkpoints.empty();
  const double m0 = mass.holds ? record.checkpoints.front().mass : 0.0;
  for (const auto& c : record.checkpoints) {
    // lhs: worst Q_* − Q(t,t), rhs: allowed slack at that scale.
    const double gap = c.q_star - c.q_tt, allowed = slack * std::max(1.0, c.q_star);
    if (gap > allowed) order.holds = false;
    if (gap - allowed > order.lhs - order.rhs || &c == &record.checkpoints.front()) {
      order.lhs = gap;
      order.rhs = allowed;
    }
    if (c.mass != m0) mass.holds = false;
    mass.lhs = std::max(mass.lhs, std::abs(c.mass - m0));
  }
  return {order, mass};
}

double q_star(const TrajectorySet& traj, double t) {
  if (traj.times.empty()) fail(ErrorCode::MissingHistory, "no stored trajectories");
  const std::size_t k = traj.index_at(t);
  const auto& v = traj.velocities[k];
  const int d = traj.dim;
  double q = 0.0;
  for (std::size_t i = 0; i < traj.particles; ++i) {
    double s = 0.0;
    for (int ax = 0; ax < d; ++ax) {
      const double dv = v[i * d + ax] - traj.v0[i * d + ax];
      s += dv * dv;
    }
    q = std::max(q, std::sqrt(s));
  }
  return q;
}

double q_star_running(const TrajectorySet& traj, double t) {
  const std::size_t k = traj.index_at(t);
  double q = 0.0;
  for (std::size_t j = 0; j <= k; ++j) q = std::max(q, q_star(traj, traj.times[j]));
  return q;
}

double q_increment(const TrajectorySet& traj, double t, double delta) {
  if (traj.field_magnitude.empty()) fail(ErrorCode::MissingHistory, "field history was not stored");
  if (!(delta >= 0.0) || delta > t * (1.0 + 1e-12) + 1e-15) {
    fail(ErrorCode::InvalidArgument, "q_increment needs 0 <= delta <= t");
  }
  const std::size_t hi = traj.index_at(t);
  const double lo_t = t - delta;
  double q = 0.0;
  for (std::size_t i = 0; i < traj.particles; ++i) {
    double integral = 0.0;
    for (std::size_t k = hi; k > 0; --k) {
      const double t1 = traj.times[k], t0 = traj.times[k - 1];
      if (t1 <= lo_t + 1e-15) break;
      const double e1 = traj.field_magnitude[k][i], e0 = traj.field_magnitude[k - 1][i];
      if (t0 >= lo_t - 1e-15) {
        integral += 0.5 * (t1 - t0) * (e0 + e1);
      } else {
        const double theta = (lo_t - t0) / (t1 - t0);
        const double elo = e0 + theta * (e1 - e0);
        integral += 0.5 * (t1 - lo_t) * (elo + e1);
      }
    }
    q = std::max(q, integral);
  }
  return q;
}

}  // namespace vpme
