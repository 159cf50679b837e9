#pragma once

// Balanced discrete optimal transport.
//
// transport_solve runs the transportation simplex (a network simplex on the
// complete bipartite graph): least-cost initial basis, dual potentials on the
// basis tree, Dantzig pricing with a switch to Bland's rule while pivots stay
// degenerate. sinkhorn_solve is the entropic approximation, rounded back onto
// the feasible set so its plan satisfies the marginals exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "intent_eval/error.hpp"

namespace intent_eval {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> data() const { return data_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct TransportPlan {
  Matrix flow;
  double cost = 0.0;
  std::size_t iterations = 0;
};

enum class TransportSolver { exact, sinkhorn };

inline std::string_view to_string(TransportSolver s) { return s == TransportSolver::exact ? "exact" : "sinkhorn"; }

namespace detail {

inline void validate_transport(const Matrix& cost, std::span<const double> supply, std::span<const double> demand) {
  if (cost.rows() != supply.size() || cost.cols() != demand.size()) {
    fail(errc::dimension_mismatch, "transport: cost matrix shape does not match supply/demand sizes");
  }
  if (supply.empty() || demand.empty()) fail(errc::unbalanced_mass, "transport: empty supply or demand");
  for (double c : cost.data()) {
    if (!std::isfinite(c) || c < 0.0) fail(errc::non_finite_cost, "transport: cost entries must be finite and >= 0");
  }
  double s = 0.0, d = 0.0;
  for (double x : supply) {
    if (!std::isfinite(x) || x < 0.0) fail(errc::unbalanced_mass, "transport: supply entries must be finite and >= 0");
    s += x;
  }
  for (double x : demand) {
    if (!std::isfinite(x) || x < 0.0) fail(errc::unbalanced_mass, "transport: demand entries must be finite and >= 0");
    d += x;
  }
  if (std::abs(s - d) > 1e-9 * std::max(1.0, std::max(s, d))) {
    fail(errc::unbalanced_mass, "transport: total supply " + std::to_string(s) + " != total demand " + std::to_string(d));
  }
  if (s <= 0.0) fail(errc::unbalanced_mass, "transport: total mass must be positive");
}

inline double plan_cost(const Matrix& flow, const Matrix& cost) {
  double total = 0.0;
  for (std::size_t i = 0; i < flow.rows(); ++i)
    for (std::size_t j = 0; j < flow.cols(); ++j) total += flow(i, j) * cost(i, j);
  return total;
}

/// Transportation simplex on a problem with strictly positive supplies and
/// demands. Basis cells form a spanning tree over m row nodes and n column
/// nodes (column j is node m + j).
class TransportSimplex {
 public:
  TransportSimplex(const Matrix& cost, std::vector<double> supply, std::vector<double> demand)
      : cost_(cost), m_(supply.size()), n_(demand.size()), flow_(m_, n_, 0.0), basic_(m_ * n_, 0),
        supply_(std::move(supply)), demand_(std::move(demand)) {
    double scale = 0.0;
    for (double c : cost_.data()) scale = std::max(scale, c);
    tolerance_ = 1e-12 * std::max(1.0, scale);
  }

  Matrix solve(std::size_t& iterations) {
    initial_basis();
    std::vector<double> u(m_), v(n_);
    std::size_t degenerate_streak = 0;
    const std::size_t max_iterations = 50 * (m_ + n_) * (m_ + n_) + 1000;
    for (iterations = 0; iterations < max_iterations; ++iterations) {
      potentials(u, v);
      const bool bland = degenerate_streak > m_ + n_;
      std::size_t enter = m_ * n_;
      double best = -tolerance_;
      for (std::size_t i = 0; i < m_ && !(bland && enter < m_ * n_); ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
          if (basic_[i * n_ + j]) continue;
          const double reduced = cost_(i, j) - u[i] - v[j];
          if (reduced < best) {
            best = reduced;
            enter = i * n_ + j;
            if (bland) break;
          }
        }
      }
      if (enter == m_ * n_) return flow_;
      const bool moved = pivot(enter / n_, enter % n_);
      degenerate_streak = moved ? 0 : degenerate_streak + 1;
    }
    fail(errc::domain_error, "transport: simplex iteration limit reached");
  }

 private:
  // Least-cost rule; each allocation closes exactly one row or column (both
  // for the final one) so the m + n - 1 basic cells form a spanning tree.
  void initial_basis() {
    std::vector<std::size_t> order(m_ * n_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cost_(a / n_, a % n_) < cost_(b / n_, b % n_); });
    std::vector<double> s = supply_, d = demand_;
    std::vector<char> row_done(m_, 0), col_done(n_, 0);
    std::size_t open_rows = m_, open_cols = n_;
    for (std::size_t cell : order) {
      if (open_rows == 0 && open_cols == 0) break;
      const std::size_t i = cell / n_, j = cell % n_;
      if (row_done[i] || col_done[j]) continue;
      bool close_row;
      if (open_rows == 1 && open_cols == 1) {
        flow_(i, j) = std::max(s[i], d[j]);
        add_basic(i, j);
        row_done[i] = col_done[j] = 1;
        open_rows = open_cols = 0;
        break;
      } else if (open_rows == 1) {
        close_row = false;
      } else if (open_cols == 1) {
        close_row = true;
      } else {
        close_row = s[i] < d[j];
      }
      const double amount = close_row ? s[i] : d[j];
      flow_(i, j) = std::max(0.0, amount);
      add_basic(i, j);
      s[i] = std::max(0.0, s[i] - amount);
      d[j] = std::max(0.0, d[j] - amount);
      if (close_row) {
        row_done[i] = 1;
        --open_rows;
      } else {
        col_done[j] = 1;
        --open_cols;
      }
    }
  }

  void add_basic(std::size_t i, std::size_t j) {
    basic_[i * n_ + j] = 1;
    basis_.emplace_back(i, j);
  }

  void build_adjacency() {
    adj_.assign(m_ + n_, {});
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      const auto [i, j] = basis_[k];
      adj_[i].push_back(k);
      adj_[m_ + j].push_back(k);
    }
  }

  void potentials(std::vector<double>& u, std::vector<double>& v) {
    build_adjacency();
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    u[0] = 0.0;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t k : adj_[node]) {
        const auto [i, j] = basis_[k];
        const std::size_t other = node < m_ ? m_ + j : i;
        if (seen[other]) continue;
        seen[other] = 1;
        if (node < m_) {
          v[j] = cost_(i, j) - u[i];
        } else {
          u[i] = cost_(i, j) - v[j];
        }
        stack.push_back(other);
      }
    }
  }

  // Tree path from row node `i` to column node `m + j`, as basis indices.
  std::vector<std::size_t> tree_path(std::size_t i, std::size_t j) const {
    const std::size_t target = m_ + j;
    std::vector<std::ptrdiff_t> via(m_ + n_, -1);
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> queue{i};
    seen[i] = 1;
    for (std::size_t head = 0; head < queue.size() && !seen[target]; ++head) {
      const std::size_t node = queue[head];
      for (std::size_t k : adj_[node]) {
        const auto [bi, bj] = basis_[k];
        const std::size_t other = node < m_ ? m_ + bj : bi;
        if (seen[other]) continue;
        seen[other] = 1;
        via[other] = static_cast<std::ptrdiff_t>(k);
        queue.push_back(other);
      }
    }
    std::vector<std::size_t> path;
    for (std::size_t node = target; node != i;) {
      const auto k = static_cast<std::size_t>(via[node]);
      path.push_back(k);
      const auto [bi, bj] = basis_[k];
      node = node == m_ + bj ? bi : m_ + bj;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  // Entering cell (i, j) closes the cycle (i,j) -> path back to row i. Cells
  // at odd positions along the path from row i lose flow.
  bool pivot(std::size_t i, std::size_t j) {
    const std::vector<std::size_t> path = tree_path(i, j);
    // path runs row i -> ... -> column j; the cell adjacent to column j on the
    // path shares that column with the entering cell and must give up flow.
    // Walking from column j back to row i, signs alternate -, +, -, ...
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = basis_.size();
    for (std::size_t step = 0; step < path.size(); ++step) {
      const std::size_t k = path[path.size() - 1 - step];
      if (step % 2 != 0) continue;
      const auto [bi, bj] = basis_[k];
      const double f = flow_(bi, bj);
      const std::size_t cell = bi * n_ + bj;
      if (f < theta || (f == theta && leave < basis_.size() &&
                        cell < basis_[leave].first * n_ + basis_[leave].second)) {
        theta = f;
        leave = k;
      }
    }
    for (std::size_t step = 0; step < path.size(); ++step) {
      const std::size_t k = path[path.size() - 1 - step];
      const auto [bi, bj] = basis_[k];
      flow_(bi, bj) += step % 2 == 0 ? -theta : theta;
      if (flow_(bi, bj) < 0.0) flow_(bi, bj) = 0.0;
    }
    flow_(i, j) = theta;
    const auto [li, lj] = basis_[leave];
    flow_(li, lj) = 0.0;
    basic_[li * n_ + lj] = 0;
    basic_[i * n_ + j] = 1;
    basis_[leave] = {i, j};
    return theta > 0.0;
  }

  const Matrix& cost_;
  std::size_t m_;
  std::size_t n_;
  Matrix flow_;
  std::vector<char> basic_;
  std::vector<std::pair<std::size_t, std::size_t>> basis_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<double> supply_;
  std::vector<double> demand_;
  double tolerance_ = 0.0;
};

}  // namespace detail

/// Exact minimum-cost transport plan. Supply and demand must carry equal
/// total mass (within 1e-9 relative); zero-mass rows/columns are allowed.
inline TransportPlan transport_solve(const Matrix& cost, std::span<const double> supply,
                                     std::span<const double> demand) {
  detail::validate_transport(cost, supply, demand);

  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < supply.size(); ++i)
    if (supply[i] > 0.0) rows.push_back(i);
  for (std::size_t j = 0; j < demand.size(); ++j)
    if (demand[j] > 0.0) cols.push_back(j);

  Matrix reduced(rows.size(), cols.size());
  std::vector<double> s(rows.size()), d(cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    s[a] = supply[rows[a]];
    for (std::size_t b = 0; b < cols.size(); ++b) reduced(a, b) = cost(rows[a], cols[b]);
  }
  for (std::size_t b = 0; b < cols.size(); ++b) d[b] = demand[cols[b]];
  // Put any rounding residue on the last column so the simplex sees an
  // exactly balanced problem.
  const double ds = std::accumulate(s.begin(), s.end(), 0.0) - std::accumulate(d.begin(), d.end(), 0.0);
  d.back() = std::max(0.0, d.back() + ds);

  TransportPlan plan;
  detail::TransportSimplex simplex(reduced, std::move(s), std::move(d));
  const Matrix flow = simplex.solve(plan.iterations);

  plan.flow = Matrix(supply.size(), demand.size(), 0.0);
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) plan.flow(rows[a], cols[b]) = flow(a, b);
  plan.cost = detail::plan_cost(plan.flow, cost);
  return plan;
}

struct SinkhornParams {
  double epsilon = 0.01;
  std::size_t max_iterations = 1000;
  double tolerance = 1e-9;
};

/// Log-domain Sinkhorn iterations followed by the Altschuler-Weed-Rigollet
/// rounding step, which yields a plan with exact marginals.
inline TransportPlan sinkhorn_solve(const Matrix& cost, std::span<const double> supply, std::span<const double> demand,
                                    const SinkhornParams& params = {}) {
  detail::validate_transport(cost, supply, demand);
  const std::size_t m = supply.size(), n = demand.size();
  const double eps = params.epsilon;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> log_a(m), log_b(n);
  for (std::size_t i = 0; i < m; ++i) log_a[i] = supply[i] > 0.0 ? std::log(supply[i]) : neg_inf;
  for (std::size_t j = 0; j < n; ++j) log_b[j] = demand[j] > 0.0 ? std::log(demand[j]) : neg_inf;

  std::vector<double> f(m, 0.0), g(n, 0.0), buf;
  auto logsumexp = [neg_inf](const std::vector<double>& xs) {
    double mx = neg_inf;
    for (double x : xs) mx = std::max(mx, x);
    if (mx == neg_inf) return neg_inf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - mx);
    return mx + std::log(s);
  };

  TransportPlan plan;
  for (plan.iterations = 0; plan.iterations < params.max_iterations; ++plan.iterations) {
    buf.resize(n);
    for (std::size_t i = 0; i < m; ++i) {
      if (log_a[i] == neg_inf) continue;
      for (std::size_t j = 0; j < n; ++j) buf[j] = (g[j] - cost(i, j)) / eps;
      f[i] = eps * (log_a[i] - logsumexp(buf));
    }
    buf.resize(m);
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (log_b[j] == neg_inf) continue;
      for (std::size_t i = 0; i < m; ++i) buf[i] = log_a[i] == neg_inf ? neg_inf : (f[i] - cost(i, j)) / eps;
      const double updated = eps * (log_b[j] - logsumexp(buf));
      err = std::max(err, std::abs(updated - g[j]));
      g[j] = updated;
    }
    if (err < params.tolerance) break;
  }

  Matrix flow(m, n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (log_a[i] == neg_inf) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (log_b[j] == neg_inf) continue;
      flow(i, j) = std::exp((f[i] + g[j] - cost(i, j)) / eps);
    }
  }
  // Rounding: scale rows then columns down to their targets, then distribute
  // the leftover mass as a rank-one correction.
  std::vector<double> row_excess(m), col_excess(n);
  for (std::size_t i = 0; i < m; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += flow(i, j);
    const double scale = r > supply[i] && r > 0.0 ? supply[i] / r : 1.0;
    for (std::size_t j = 0; j < n; ++j) flow(i, j) *= scale;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i) c += flow(i, j);
    const double scale = c > demand[j] && c > 0.0 ? demand[j] / c : 1.0;
    for (std::size_t i = 0; i < m; ++i) flow(i, j) *= scale;
  }
  double total_excess = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += flow(i, j);
    row_excess[i] = std::max(0.0, supply[i] - r);
    total_excess += row_excess[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i) c += flow(i, j);
    col_excess[j] = std::max(0.0, demand[j] - c);
  }
  if (total_excess > 0.0) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) flow(i, j) += row_excess[i] * col_excess[j] / total_excess;
  }
  plan.flow = std::move(flow);
  plan.cost = detail::plan_cost(plan.flow, cost);
  return plan;
}

}  // namespace intent_eval
