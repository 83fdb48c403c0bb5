#include "vpme/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "vpme/error.hpp"

namespace vpme {
namespace {

constexpr int kStateTree = 0;
constexpr int kStateLower = 1;
constexpr int kDirUp = 1;
constexpr int kDirDown = -1;

class Solver {
 public:
  Solver(std::span<const double> a, std::span<const double> b, std::span<const double> cost)
      : n1_(static_cast<int>(a.size())),
        n2_(static_cast<int>(b.size())),
        node_num_(n1_ + n2_),
        arc_num_(static_cast<std::int64_t>(n1_) * n2_),
        cost_in_(cost) {
    const int all_nodes = node_num_ + 1;
    const std::int64_t all_arcs = arc_num_ + node_num_;
    supply_.resize(static_cast<std::size_t>(all_nodes));
    for (int i = 0; i < n1_; ++i) supply_[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)];
    for (int j = 0; j < n2_; ++j) supply_[static_cast<std::size_t>(n1_ + j)] = -b[static_cast<std::size_t>(j)];
    flow_.assign(static_cast<std::size_t>(all_arcs), 0.0);
    state_.assign(static_cast<std::size_t>(all_arcs), static_cast<std::int8_t>(kStateLower));
    art_source_.resize(static_cast<std::size_t>(node_num_));
    art_target_.resize(static_cast<std::size_t>(node_num_));
    art_cost_.resize(static_cast<std::size_t>(node_num_));
    parent_.resize(static_cast<std::size_t>(all_nodes));
    pred_.resize(static_cast<std::size_t>(all_nodes));
    thread_.resize(static_cast<std::size_t>(all_nodes));
    rev_thread_.resize(static_cast<std::size_t>(all_nodes));
    succ_num_.resize(static_cast<std::size_t>(all_nodes));
    last_succ_.resize(static_cast<std::size_t>(all_nodes));
    pred_dir_.resize(static_cast<std::size_t>(all_nodes));
    pi_.resize(static_cast<std::size_t>(all_nodes));
    double max_cost = 0.0;
    for (double c : cost) max_cost = std::max(max_cost, std::abs(c));
    tol_ = 1e-14 * std::max(1.0, max_cost);
    art_ = (max_cost + 1.0) * static_cast<double>(node_num_);
  }

  NetworkSimplexResult run() {
    init();
    block_ = std::max<std::int64_t>(10, static_cast<std::int64_t>(std::ceil(std::sqrt(double(arc_num_)))));
    std::size_t pivots = 0;
    while (find_entering_arc()) {
      find_join_node();
      find_leaving_arc();
      change_flow();
      update_tree_structure();
      update_potential();
      ++pivots;
    }
    NetworkSimplexResult out;
    out.pivots = pivots;
    double total = 0.0;
    for (std::int64_t e = 0; e < arc_num_; ++e) {
      const double f = flow_[static_cast<std::size_t>(e)];
      if (f > 0.0) {
        const auto i = static_cast<std::size_t>(e / n2_);
        const auto j = static_cast<std::size_t>(e % n2_);
        out.plan.push_back({i, j, f});
        total += f * cost_in_[static_cast<std::size_t>(e)];
      }
    }
    out.cost = total;
    out.u.resize(static_cast<std::size_t>(n1_));
    out.v.resize(static_cast<std::size_t>(n2_));
    for (int i = 0; i < n1_; ++i) out.u[static_cast<std::size_t>(i)] = -pi_[static_cast<std::size_t>(i)];
    for (int j = 0; j < n2_; ++j) out.v[static_cast<std::size_t>(j)] = pi_[static_cast<std::size_t>(n1_ + j)];
    return out;
  }

 private:
  int source(std::int64_t e) const {
    return e < arc_num_ ? static_cast<int>(e / n2_) : art_source_[static_cast<std::size_t>(e - arc_num_)];
  }
  int target(std::int64_t e) const {
    return e < arc_num_ ? n1_ + static_cast<int>(e % n2_) : art_target_[static_cast<std::size_t>(e - arc_num_)];
  }
  double cost(std::int64_t e) const {
    return e < arc_num_ ? cost_in_[static_cast<std::size_t>(e)] : art_cost_[static_cast<std::size_t>(e - arc_num_)];
  }
  double reduced(std::int64_t e) const {
    return cost(e) + pi_[static_cast<std::size_t>(source(e))] - pi_[static_cast<std::size_t>(target(e))];
  }
  template <class V>
  static auto& at(V& v, std::int64_t i) { return v[static_cast<std::size_t>(i)]; }

  void init() {
    root_ = node_num_;
    double sum = 0.0;
    for (int u = 0; u < node_num_; ++u) sum += supply_[static_cast<std::size_t>(u)];
    at(supply_, root_) = -sum;
    at(parent_, root_) = -1;
    at(pred_, root_) = -1;
    at(thread_, root_) = 0;
    at(rev_thread_, 0) = root_;
    at(succ_num_, root_) = node_num_ + 1;
    at(last_succ_, root_) = root_ - 1;
    at(pi_, root_) = 0.0;
    for (int u = 0; u < node_num_; ++u) {
      const std::int64_t e = arc_num_ + u;
      at(parent_, u) = root_;
      at(pred_, u) = e;
      at(thread_, u) = u + 1;
      at(rev_thread_, u + 1) = u;
      at(succ_num_, u) = 1;
      at(last_succ_, u) = u;
      at(state_, e) = kStateTree;
      if (at(supply_, u) >= 0.0) {
        at(pred_dir_, u) = kDirUp;
        at(pi_, u) = 0.0;
        at(art_source_, u) = u;
        at(art_target_, u) = root_;
        at(flow_, e) = at(supply_, u);
        at(art_cost_, u) = 0.0;
      } else {
        at(pred_dir_, u) = kDirDown;
        at(pi_, u) = art_;
        at(art_source_, u) = root_;
        at(art_target_, u) = u;
        at(flow_, e) = -at(supply_, u);
        at(art_cost_, u) = art_;
      }
    }
  }

  bool find_entering_arc() {
    double min = -tol_;
    bool found = false;
    std::int64_t cnt = block_;
    std::int64_t e = next_arc_;
    auto scan = [&](std::int64_t lo, std::int64_t hi) {
      for (e = lo; e != hi; ++e) {
        const double c = at(state_, e) * reduced(e);
        if (c < min) {
          min = c;
          in_arc_ = e;
          found = true;
        }
        if (--cnt == 0) {
          if (found) return true;
          cnt = block_;
        }
      }
      return false;
    };
    if (scan(next_arc_, arc_num_) || scan(0, next_arc_)) {
      next_arc_ = e;
      return true;
    }
    if (!found) return false;
    next_arc_ = e;
    return true;
  }

  void find_join_node() {
    int u = source(in_arc_);
    int v = target(in_arc_);
    while (u != v) {
      if (at(succ_num_, u) < at(succ_num_, v)) {
        u = at(parent_, u);
      } else {
        v = at(parent_, v);
      }
    }
    join_ = u;
  }

  void find_leaving_arc() {
    const int first = source(in_arc_);
    const int second = target(in_arc_);
    const double inf = std::numeric_limits<double>::infinity();
    delta_ = inf;
    int result = 0;
    for (int u = first; u != join_; u = at(parent_, u)) {
      if (at(pred_dir_, u) == kDirDown) continue;
      const double d = std::max(0.0, at(flow_, at(pred_, u)));
      if (d < delta_) {
        delta_ = d;
        u_out_ = u;
        result = 1;
      }
    }
    for (int u = second; u != join_; u = at(parent_, u)) {
      if (at(pred_dir_, u) == kDirUp) continue;
      const double d = std::max(0.0, at(flow_, at(pred_, u)));
      if (d <= delta_) {
        delta_ = d;
        u_out_ = u;
        result = 2;
      }
    }
    if (result == 0) fail(ErrorCode::NotConverged, "network simplex: unbounded cycle");
    if (result == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
  }

  void change_flow() {
    if (delta_ > 0.0) {
      const double val = delta_;
      at(flow_, in_arc_) += val;
      for (int u = source(in_arc_); u != join_; u = at(parent_, u)) {
        double& f = at(flow_, at(pred_, u));
        f = std::max(0.0, f - at(pred_dir_, u) * val);
      }
      for (int u = target(in_arc_); u != join_; u = at(parent_, u)) {
        double& f = at(flow_, at(pred_, u));
        f = std::max(0.0, f + at(pred_dir_, u) * val);
      }
    }
    at(state_, in_arc_) = kStateTree;
    const std::int64_t out = at(pred_, u_out_);
    at(flow_, out) = 0.0;
    at(state_, out) = kStateLower;
  }

  void update_tree_structure() {
    const int old_rev_thread = at(rev_thread_, u_out_);
    const int old_succ_num = at(succ_num_, u_out_);
    const int old_last_succ = at(last_succ_, u_out_);
    v_out_ = at(parent_, u_out_);

    if (u_in_ == u_out_) {
      at(parent_, u_in_) = v_in_;
      at(pred_, u_in_) = in_arc_;
      at(pred_dir_, u_in_) = u_in_ == source(in_arc_) ? kDirUp : kDirDown;
      if (at(thread_, v_in_) != u_out_) {
        int after = at(thread_, old_last_succ);
        at(thread_, old_rev_thread) = after;
        at(rev_thread_, after) = old_rev_thread;
        after = at(thread_, v_in_);
        at(thread_, v_in_) = u_out_;
        at(rev_thread_, u_out_) = v_in_;
        at(thread_, old_last_succ) = after;
        at(rev_thread_, after) = old_last_succ;
      }
    } else {
      const int thread_continue =
          old_rev_thread == v_in_ ? at(thread_, old_last_succ) : at(thread_, v_in_);
      int stem = u_in_;
      int par_stem = v_in_;
      int last = at(last_succ_, u_in_);
      int after = at(thread_, last);
      at(thread_, v_in_) = u_in_;
      dirty_revs_.clear();
      dirty_revs_.push_back(v_in_);
      while (stem != u_out_) {
        const int next_stem = at(parent_, stem);
        at(thread_, last) = next_stem;
        dirty_revs_.push_back(last);
        const int before = at(rev_thread_, stem);
        at(thread_, before) = after;
        at(rev_thread_, after) = before;
        at(parent_, stem) = par_stem;
        par_stem = stem;
        stem = next_stem;
        last = at(last_succ_, stem) == at(last_succ_, par_stem) ? at(rev_thread_, par_stem)
                                                                 : at(last_succ_, stem);
        after = at(thread_, last);
      }
      at(parent_, u_out_) = par_stem;
      at(thread_, last) = thread_continue;
      at(rev_thread_, thread_continue) = last;
      at(last_succ_, u_out_) = last;
      if (old_rev_thread != v_in_) {
        at(thread_, old_rev_thread) = after;
        at(rev_thread_, after) = old_rev_thread;
      }
      for (int u : dirty_revs_) at(rev_thread_, at(thread_, u)) = u;

      int tmp_sc = 0;
      const int tmp_ls = at(last_succ_, u_out_);
      for (int u = u_out_, p = at(parent_, u); u != u_in_; u = p, p = at(parent_, u)) {
        at(pred_, u) = at(pred_, p);
        at(pred_dir_, u) = -at(pred_dir_, p);
        tmp_sc += at(succ_num_, u) - at(succ_num_, p);
        at(succ_num_, u) = tmp_sc;
        at(last_succ_, p) = tmp_ls;
      }
      at(pred_, u_in_) = in_arc_;
      at(pred_dir_, u_in_) = u_in_ == source(in_arc_) ? kDirUp : kDirDown;
      at(succ_num_, u_in_) = old_succ_num;
    }

    const int up_limit_out = at(last_succ_, join_) == v_in_ ? join_ : -1;
    const int last_succ_out = at(last_succ_, u_out_);
    for (int u = v_in_; u != -1 && at(last_succ_, u) == v_in_; u = at(parent_, u)) {
      at(last_succ_, u) = last_succ_out;
    }
    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (int u = v_out_; u != up_limit_out && at(last_succ_, u) == old_last_succ; u = at(parent_, u)) {
        at(last_succ_, u) = old_rev_thread;
      }
    } else if (last_succ_out != old_last_succ) {
      for (int u = v_out_; u != up_limit_out && at(last_succ_, u) == old_last_succ; u = at(parent_, u)) {
        at(last_succ_, u) = last_succ_out;
      }
    }
    for (int u = v_in_; u != join_; u = at(parent_, u)) at(succ_num_, u) += old_succ_num;
    for (int u = v_out_; u != join_; u = at(parent_, u)) at(succ_num_, u) -= old_succ_num;
  }

  void update_potential() {
    const double sigma = at(pi_, v_in_) - at(pi_, u_in_) - at(pred_dir_, u_in_) * cost(in_arc_);
    const int end = at(thread_, at(last_succ_, u_in_));
    for (int u = u_in_; u != end; u = at(thread_, u)) at(pi_, u) += sigma;
  }

  int n1_, n2_, node_num_;
  std::int64_t arc_num_;
  std::span<const double> cost_in_;
  double tol_ = 0.0;
  double art_ = 0.0;

  std::vector<double> supply_;
  std::vector<double> flow_;
  std::vector<std::int8_t> state_;
  std::vector<int> art_source_, art_target_;
  std::vector<double> art_cost_;

  std::vector<int> parent_;
  std::vector<std::int64_t> pred_;
  std::vector<int> thread_, rev_thread_, succ_num_, last_succ_, pred_dir_;
  std::vector<double> pi_;
  std::vector<int> dirty_revs_;

  int root_ = 0;
  std::int64_t in_arc_ = 0;
  std::int64_t next_arc_ = 0;
  std::int64_t block_ = 10;
  int join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0, v_out_ = 0;
  double delta_ = 0.0;
};

}  // namespace

NetworkSimplexResult network_simplex(std::span<const double> a, std::span<const double> b,
                                     std::span<const double> cost) {
  if (a.empty() || b.empty()) fail(ErrorCode::InvalidArgument, "transport problem with an empty side");
  if (cost.size() != a.size() * b.size()) {
    fail(ErrorCode::DimensionMismatch, "cost matrix size does not match marginals");
  }
  double sa = 0.0, sb = 0.0;
  for (double x : a) {
    if (!(x >= 0.0) || !std::isfinite(x)) fail(ErrorCode::InvalidArgument, "negative or non-finite source mass");
    sa += x;
  }
  for (double x : b) {
    if (!(x >= 0.0) || !std::isfinite(x)) fail(ErrorCode::InvalidArgument, "negative or non-finite target mass");
    sb += x;
  }
  if (std::abs(sa - sb) > 1e-12 * std::max(1.0, sa)) {
    fail(ErrorCode::UnequalMass, "marginal masses differ: " + std::to_string(sa) + " vs " + std::to_string(sb));
  }
  for (double c : cost) {
    if (!std::isfinite(c)) fail(ErrorCode::NonFinite, "cost matrix has non-finite entries");
  }
  Solver s(a, b, cost);
  return s.run();
}

}  // namespace vpme
