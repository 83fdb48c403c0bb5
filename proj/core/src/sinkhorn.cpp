#include "vpme/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vpme/error.hpp"

namespace vpme {
namespace {

double row_violation(std::span<const double> a, std::span<const double> cost, const std::vector<double>& f,
                     const std::vector<double>& g, double reg) {
  const std::size_t n = a.size(), m = g.size();
  double viol = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < m; ++j) r += std::exp((f[i] + g[j] - cost[i * m + j]) / reg);
    viol += std::abs(r - a[i]);
  }
  return viol;
}


// Entropic dual Φ(f, g) = ⟨a,f⟩ + ⟨b,g⟩ − reg Σ exp((f_i + g_j − c_ij)/reg);
// fills the kernel P and its marginals as a side effect.
double dual_objective(std::span<const double> a, std::span<const double> b, std::span<const double> cost,
                      const std::vector<double>& f, const std::vector<double>& g, double reg, std::vector<double>& P,
                      std::vector<double>& rows, std::vector<double>& cols) {
  const std::size_t n = a.size(), m = b.size();
  std::fill(rows.begin(), rows.end(), 0.0);
  std::fill(cols.begin(), cols.end(), 0.0);
  double phi = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    phi += a[i] * f[i];
    for (std::size_t j = 0; j < m; ++j) {
      const double p = std::exp((f[i] + g[j] - cost[i * m + j]) / reg);
      P[i * m + j] = p;
      rows[i] += p;
      cols[j] += p;
      mass += p;
    }
  }
  for (std::size_t j = 0; j < m; ++j) phi += b[j] * g[j];
  return std::isfinite(mass) ? phi - reg * mass : -std::numeric_limits<double>::infinity();
}

// Newton ascent on Φ. The Hessian is −[[diag(P1), P], [Pᵀ, diag(Pᵀ1)]]/reg,
// singular only along (1, −1), which the gradient never excites. Returns the
// final row violation.
double newton_polish(std::span<const double> a, std::span<const double> b, std::span<const double> cost,
                     std::vector<double>& f, std::vector<double>& g, double reg, double tol, int max_steps,
                     int& steps_taken) {
  const std::size_t n = a.size(), m = b.size(), k = n + m;
  std::vector<double> P(n * m), rows(n), cols(m), P2(n * m), rows2(n), cols2(m);
  std::vector<double> grad(k), x(k), r(k), z(k), p(k), q(k), f2(n), g2(m);
  double phi = dual_objective(a, b, cost, f, g, reg, P, rows, cols);
  auto violation = [&] {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += std::abs(a[i] - rows[i]);
    return v;
  };
  auto hess = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = rows[i] * v[i];
    for (std::size_t j = 0; j < m; ++j) out[n + j] = cols[j] * v[n + j];
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        s += P[i * m + j] * v[n + j];
        out[n + j] += P[i * m + j] * v[i];
      }
      out[i] += s;
    }
  };
  double viol = violation();
  for (int step = 0; step < max_steps && viol > tol; ++step) {
    ++steps_taken;
    for (std::size_t i = 0; i < n; ++i) grad[i] = a[i] - rows[i];
    for (std::size_t j = 0; j < m; ++j) grad[n + j] = b[j] - cols[j];
    // Jacobi-preconditioned CG for H̃x = reg·grad.
    std::fill(x.begin(), x.end(), 0.0);
    double rhs_norm = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
      r[t] = reg * grad[t];
      rhs_norm += r[t] * r[t];
    }
    auto diag = [&](std::size_t t) { return std::max(t < n ? rows[t] : cols[t - n], 1e-300); };
    double rz = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
      z[t] = r[t] / diag(t);
      p[t] = z[t];
      rz += r[t] * z[t];
    }
    for (std::size_t it = 0; it < 2 * k && rz > 0.0; ++it) {
      hess(p, q);
      double pq = 0.0;
      for (std::size_t t = 0; t < k; ++t) pq += p[t] * q[t];
      if (!(pq > 0.0)) break;
      const double alpha = rz / pq;
      double rr = 0.0, rz_new = 0.0;
      for (std::size_t t = 0; t < k; ++t) {
        x[t] += alpha * p[t];
        r[t] -= alpha * q[t];
        rr += r[t] * r[t];
        z[t] = r[t] / diag(t);
        rz_new += r[t] * z[t];
      }
      if (rr <= 1e-24 * rhs_norm) break;
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t t = 0; t < k; ++t) p[t] = z[t] + beta * p[t];
    }
    double slope = 0.0;
    for (std::size_t t = 0; t < k; ++t) slope += grad[t] * x[t];
    if (!(slope > 0.0)) break;
    bool accepted = false;
    for (double t = 1.0; t > 1e-10; t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) f2[i] = f[i] + t * x[i];
      for (std::size_t j = 0; j < m; ++j) g2[j] = g[j] + t * x[n + j];
      const double phi2 = dual_objective(a, b, cost, f2, g2, reg, P2, rows2, cols2);
      if (phi2 >= phi + 1e-4 * t * slope) {
        f.swap(f2);
        g.swap(g2);
        P.swap(P2);
        rows.swap(rows2);
        cols.swap(cols2);
        phi = phi2;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    viol = violation();
  }
  return viol;
}

}  // namespace

SinkhornResult sinkhorn(std::span<const double> a, std::span<const double> b,
                        std::span<const double> cost, const SinkhornOptions& opts) {
  const std::size_t n = a.size(), m = b.size();
  if (n == 0 || m == 0) fail(ErrorCode::InvalidArgument, "transport problem with an empty side");
  if (cost.size() != n * m) fail(ErrorCode::DimensionMismatch, "cost matrix size does not match marginals");
  for (double x : a) {
    if (!(x > 0.0)) fail(ErrorCode::InvalidArgument, "entropic solver requires positive masses");
  }
  for (double x : b) {
    if (!(x > 0.0)) fail(ErrorCode::InvalidArgument, "entropic solver requires positive masses");
  }
  if (!(opts.reg_start >= opts.reg_end && opts.reg_end > 0.0 && opts.reg_factor > 0.0 && opts.reg_factor < 1.0)) {
    fail(ErrorCode::InvalidArgument, "invalid regularisation schedule");
  }

  std::vector<double> f(n, 0.0), g(m, 0.0), buf(std::max(n, m));
  std::vector<double> loga(n), logb(m);
  for (std::size_t i = 0; i < n; ++i) loga[i] = std::log(a[i]);
  for (std::size_t j = 0; j < m; ++j) logb[j] = std::log(b[j]);

  // The schedule is relative to the cost scale so that it is unit free.
  double scale = 0.0;
  for (double c : cost) scale = std::max(scale, std::abs(c));
  if (!std::isfinite(scale)) fail(ErrorCode::NonFinite, "cost matrix has non-finite entries");
  if (scale == 0.0) scale = 1.0;
  const double reg_end = opts.reg_end * scale;

  SinkhornResult out;
  double reg = opts.reg_start * scale;
  for (;;) {
    const bool last = reg <= reg_end * (1.0 + 1e-12);
    const double tol = last ? opts.marginal_tol : std::max(opts.marginal_tol, 1e-4);
    double viol = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iterations_per_level; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
          buf[j] = (g[j] - cost[i * m + j]) / reg;
          mx = std::max(mx, buf[j]);
        }
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += std::exp(buf[j] - mx);
        f[i] = reg * (loga[i] - mx - std::log(s));
      }
      for (std::size_t j = 0; j < m; ++j) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
          buf[i] = (f[i] - cost[i * m + j]) / reg;
          mx = std::max(mx, buf[i]);
        }
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::exp(buf[i] - mx);
        g[j] = reg * (logb[j] - mx - std::log(s));
      }
      ++out.iterations;
      if (it % 10 == 9 || it + 1 == opts.max_iterations_per_level) {
        viol = row_violation(a, cost, f, g, reg);
        if (viol <= tol) break;
      }
      if (it + 1 == opts.newton_after) {
        viol = newton_polish(a, b, cost, f, g, reg, tol, opts.max_newton_steps, out.newton_steps);
        if (viol <= tol) break;
      }
    }
    if (last) {
      out.marginal_violation = viol;
      out.converged = viol <= opts.marginal_tol;
      break;
    }
    reg = std::max(reg_end, reg * opts.reg_factor);
  }

  // Rounding onto the polytope.
  std::vector<double> P(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) P[i * m + j] = std::exp((f[i] + g[j] - cost[i * m + j]) / reg);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < m; ++j) r += P[i * m + j];
    const double x = r > 0.0 ? std::min(1.0, a[i] / r) : 1.0;
    for (std::size_t j = 0; j < m; ++j) P[i * m + j] *= x;
  }
  std::vector<double> col(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) col[j] += P[i * m + j];
  }
  for (std::size_t j = 0; j < m; ++j) {
    const double y = col[j] > 0.0 ? std::min(1.0, b[j] / col[j]) : 1.0;
    for (std::size_t i = 0; i < n; ++i) P[i * m + j] *= y;
  }
  std::vector<double> er(n), ec(m, 0.0);
  double er_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      r += P[i * m + j];
      ec[j] += P[i * m + j];
    }
    er[i] = std::max(0.0, a[i] - r);
    er_sum += er[i];
  }
  for (std::size_t j = 0; j < m; ++j) ec[j] = std::max(0.0, b[j] - ec[j]);
  if (er_sum > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) P[i * m + j] += er[i] * ec[j] / er_sum;
    }
  }
  double primal = 0.0;
  for (std::size_t k = 0; k < n * m; ++k) {
    if (P[k] > 0.0) {
      primal += P[k] * cost[k];
      out.plan.push_back({k / m, k % m, P[k]});
    }
  }

  // c-transforms: g̃_j = min_i (c_ij − f_i), f̃_i = min_j (c_ij − g̃_j).
  std::vector<double> gt(m, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) gt[j] = std::min(gt[j], cost[i * m + j] - f[i]);
  }
  double dual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double ft = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) ft = std::min(ft, cost[i * m + j] - gt[j]);
    dual += a[i] * ft;
  }
  for (std::size_t j = 0; j < m; ++j) dual += b[j] * gt[j];

  out.primal = primal;
  out.dual = dual;
  out.gap = std::max(0.0, primal - dual);
  return out;
}

}  // namespace vpme
