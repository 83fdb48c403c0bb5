#include "vpme/ot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vpme/error.hpp"
#include "vpme/geometry.hpp"

namespace vpme {

double TransportPlan::marginal_error(std::span<const double> a, std::span<const double> b) const {
  std::vector<double> ra(a.size(), 0.0), rb(b.size(), 0.0);
  for (const auto& p : pairs) {
    ra[p.i] += p.mass;
    rb[p.j] += p.mass;
  }
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(ra[i] - a[i]));
  for (std::size_t j = 0; j < b.size(); ++j) e = std::max(e, std::abs(rb[j] - b[j]));
  return e;
}

double ground_cost(const ParticleEnsemble& a, std::size_t i, const ParticleEnsemble& b, std::size_t j,
                   int order) {
  const double dx2 = torus_distance_sq(a.x(i), b.x(j));
  double dv2 = 0.0;
  const auto va = a.v(i), vb = b.v(j);
  for (std::size_t k = 0; k < va.size(); ++k) dv2 += (va[k] - vb[k]) * (va[k] - vb[k]);
  if (order == 2) return dx2 + dv2;
  return std::sqrt(dx2) + std::sqrt(dv2);
}

std::vector<double> cost_matrix(const ParticleEnsemble& a, const ParticleEnsemble& b, int order) {
  if (a.dim != b.dim) fail(ErrorCode::DimensionMismatch, "ensembles have different dimensions");
  std::vector<double> c(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) c[i * b.size() + j] = ground_cost(a, i, b, j, order);
  }
  return c;
}

void price_plan(TransportPlan& plan, const ParticleEnsemble& a, const ParticleEnsemble& b) {
  plan.cost_p1 = 0.0;
  plan.cost_p2 = 0.0;
  for (const auto& p : plan.pairs) {
    plan.cost_p1 += p.mass * ground_cost(a, p.i, b, p.j, 1);
    plan.cost_p2 += p.mass * ground_cost(a, p.i, b, p.j, 2);
  }
}

TransportPlan identity_plan(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  if (a.size() != b.size() || a.dim != b.dim) {
    fail(ErrorCode::DimensionMismatch, "identity coupling needs ensembles of equal size and dimension");
  }
  TransportPlan plan;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.weights[i] - b.weights[i]) > 1e-15) {
      fail(ErrorCode::UnequalMass, "identity coupling needs matching weights");
    }
    plan.pairs.push_back({i, i, a.weights[i]});
  }
  price_plan(plan, a, b);
  return plan;
}

WassersteinResult wasserstein(const ParticleEnsemble& mu, const ParticleEnsemble& nu, int order,
                              OtMethod method, const SinkhornOptions& opts) {
  if (order != 1 && order != 2) fail(ErrorCode::InvalidArgument, "order must be 1 or 2");
  if (mu.dim != nu.dim) fail(ErrorCode::DimensionMismatch, "ensembles have different dimensions");
  WassersteinResult out;
  out.order = order;
  out.method = method;
  if (method == OtMethod::Exact && mu.size() * nu.size() > kMaxExactPairs) {
    fail(ErrorCode::ProblemTooLarge, std::to_string(mu.size()) + " x " + std::to_string(nu.size()) +
                                         " exceeds the exact-solver limit; use the entropic method");
  }
  const std::vector<double> c = cost_matrix(mu, nu, order);
  double cost = 0.0;
  if (method == OtMethod::Exact) {
    NetworkSimplexResult r = network_simplex(mu.weights, nu.weights, c);
    cost = r.cost;
    out.plan.pairs = std::move(r.plan);
    out.cost_upper = out.cost_lower = cost;
  } else {
    SinkhornResult r = sinkhorn(mu.weights, nu.weights, c, opts);
    if (!r.converged) {
      fail(ErrorCode::NotConverged, "Sinkhorn marginal violation " + std::to_string(r.marginal_violation) +
                                        " above tolerance; duality gap " + std::to_string(r.gap));
    }
    cost = r.primal;
    out.cost_upper = r.primal;
    out.cost_lower = r.dual;
    out.gap = r.gap;
    out.plan.pairs = std::move(r.plan);
  }
  cost = std::max(0.0, cost);
  out.value = order == 2 ? std::sqrt(cost) : cost;
  price_plan(out.plan, mu, nu);
  return out;
}

double circle_w1(std::span<const double> xa, std::span<const double> wa, std::span<const double> xb,
                 std::span<const double> wb) {
  if (xa.size() != wa.size() || xb.size() != wb.size()) {
    fail(ErrorCode::DimensionMismatch, "positions and weights differ in length");
  }
  struct Event {
    double x;
    double dm;
  };
  std::vector<Event> ev;
  ev.reserve(xa.size() + xb.size());
  for (std::size_t i = 0; i < xa.size(); ++i) ev.push_back({wrap_coord(xa[i]), wa[i]});
  for (std::size_t i = 0; i < xb.size(); ++i) ev.push_back({wrap_coord(xb[i]), -wb[i]});
  if (ev.empty()) return 0.0;
  std::sort(ev.begin(), ev.end(), [](const Event& p, const Event& q) { return p.x < q.x; });
  // Piecewise-constant D = F_a − F_b between consecutive events; the last
  // interval wraps around to the first event.
  std::vector<std::pair<double, double>> pieces;  // (value, length)
  double D = 0.0;
  for (std::size_t k = 0; k < ev.size(); ++k) {
    D += ev[k].dm;
    const double next = k + 1 < ev.size() ? ev[k + 1].x : ev[0].x + 1.0;
    const double len = next - ev[k].x;
    if (len > 0.0) pieces.emplace_back(D, len);
  }
  std::vector<std::pair<double, double>> sorted = pieces;
  std::sort(sorted.begin(), sorted.end());
  double acc = 0.0, median = sorted.empty() ? 0.0 : sorted.front().first;
  for (const auto& [v, len] : sorted) {
    acc += len;
    if (acc >= 0.5) {
      median = v;
      break;
    }
  }
  double w1 = 0.0;
  for (const auto& [v, len] : pieces) w1 += len * std::abs(v - median);
  return w1;
}

ParticleEnsemble subsample(const ParticleEnsemble& f, std::size_t count) {
  if (count == 0) fail(ErrorCode::InvalidArgument, "subsample size must be positive");
  if (count >= f.size()) return f;
  ParticleEnsemble s;
  s.dim = f.dim;
  s.epsilon = f.epsilon;
  s.time = f.time;
  const auto d = static_cast<std::size_t>(f.dim);
  double total = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = k * f.size() / count;
    for (std::size_t a = 0; a < d; ++a) {
      s.positions.push_back(f.positions[i * d + a]);
      s.velocities.push_back(f.velocities[i * d + a]);
      s.winding.push_back(f.winding.empty() ? 0 : f.winding[i * d + a]);
    }
    s.weights.push_back(f.weights[i]);
    total += f.weights[i];
  }
  for (double& w : s.weights) w /= total;
  return s;
}

WpInequalityReport verify_wp_inequalities(const ParticleEnsemble& mu, const ParticleEnsemble& nu, double k) {
  if (!(k > 2.0)) fail(ErrorCode::InvalidArgument, "moment order k must exceed 2");
  WpInequalityReport r;
  r.k = k;
  r.moment_ck = std::max(bare_moment(mu, k), bare_moment(nu, k));
  if (!std::isfinite(r.moment_ck) || r.moment_ck > 1e100) {
    fail(ErrorCode::OutOfRange, "k-th moment is numerically divergent");
  }
  r.w1 = wasserstein(mu, nu, 1).value;
  r.w2 = wasserstein(mu, nu, 2).value;
  constexpr double kRound = 1e-12;
  r.first_rhs = std::sqrt(2.0) * r.w2;
  r.first_holds = r.w1 <= r.first_rhs * (1.0 + kRound) + kRound;
  r.second_rhs = 3.0 * std::pow(1.0 + 2.0 * r.moment_ck, 1.0 / (k - 1.0)) * std::pow(r.w1, (k - 2.0) / (k - 1.0));
  r.second_holds = r.w2 <= r.second_rhs * (1.0 + kRound) + kRound;
  r.squared_holds = r.w2 * r.w2 <= r.second_rhs * (1.0 + kRound) + kRound;
  return r;
}

}  // namespace vpme
