#include "robust_trade/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "robust_trade/errors.hpp"

namespace robust_trade {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBalanceTolerance = 1e-9;

}  // namespace

TransportSimplex::TransportSimplex(std::span<const double> supply, std::span<const double> demand,
                                   std::span<const double> cost)
    : rows_(supply.size()),
      cols_(demand.size()),
      real_arcs_(supply.size() * demand.size()),
      root_(static_cast<int>(supply.size() + demand.size())),
      cost_(cost.begin(), cost.end()) {
  if (cost.size() != real_arcs_) throw ValidationError("cost matrix size does not match rows x cols");
  if (rows_ == 0 || cols_ == 0) throw ValidationError("transportation problem needs at least one row and column");
  for (double s : supply) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("supplies must be finite and nonnegative");
  }
  for (double d : demand) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw ValidationError("demands must be finite and nonnegative");
  }
  const double total_supply = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double total_demand = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (std::abs(total_supply - total_demand) > kBalanceTolerance) {
    throw ValidationError("infeasible marginals: supply total " + std::to_string(total_supply) +
                          " differs from demand total " + std::to_string(total_demand));
  }

  const std::size_t nodes = rows_ + cols_;
  supply_.resize(nodes);
  std::copy(supply.begin(), supply.end(), supply_.begin());
  for (std::size_t j = 0; j < cols_; ++j) supply_[rows_ + j] = -demand[j];

  double max_cost = 0.0;
  for (double c : cost_) {
    if (!std::isfinite(c)) throw ValidationError("costs must be finite");
    max_cost = std::max(max_cost, std::abs(c));
  }
  artificial_cost_ = (max_cost + 1.0) * static_cast<double>(nodes + 1);
  entering_tolerance_ = 1e-12 * std::max(1.0, max_cost);

  flow_.assign(real_arcs_ + nodes, 0.0);
  state_.assign(real_arcs_ + nodes, kLower);
  art_source_.resize(nodes);
  art_target_.resize(nodes);

  parent_.assign(nodes + 1, -1);
  pred_.assign(nodes + 1, 0);
  pred_dir_.assign(nodes + 1, kUp);
  depth_.assign(nodes + 1, 0);
  pi_.assign(nodes + 1, 0.0);
  first_child_.assign(nodes + 1, -1);
  next_sibling_.assign(nodes + 1, -1);
  prev_sibling_.assign(nodes + 1, -1);

  // Initial tree: every node hangs off the root through its artificial arc.
  for (std::size_t u = 0; u < nodes; ++u) {
    const std::size_t e = real_arcs_ + u;
    const int node = static_cast<int>(u);
    state_[e] = kTree;
    if (supply_[u] >= 0.0) {
      art_source_[u] = node;
      art_target_[u] = root_;
      pred_dir_[u] = kUp;
      flow_[e] = supply_[u];
      pi_[u] = 0.0;
    } else {
      art_source_[u] = root_;
      art_target_[u] = node;
      pred_dir_[u] = kDown;
      flow_[e] = -supply_[u];
      pi_[u] = artificial_cost_;
    }
    pred_[u] = e;
    depth_[u] = 1;
    attach(node, root_);
  }

  block_size_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(real_arcs_))));
}

int TransportSimplex::source(std::size_t arc) const {
  if (arc < real_arcs_) return static_cast<int>(arc / cols_);
  return art_source_[arc - real_arcs_];
}

int TransportSimplex::target(std::size_t arc) const {
  if (arc < real_arcs_) return static_cast<int>(rows_ + arc % cols_);
  return art_target_[arc - real_arcs_];
}

double TransportSimplex::arc_cost(std::size_t arc) const {
  if (arc < real_arcs_) return cost_[arc];
  return art_source_[arc - real_arcs_] == root_ ? artificial_cost_ : 0.0;
}

double TransportSimplex::reduced_cost(std::size_t arc) const {
  return arc_cost(arc) + pi_[source(arc)] - pi_[target(arc)];
}

void TransportSimplex::detach(int node) {
  const int p = parent_[node];
  if (prev_sibling_[node] >= 0) {
    next_sibling_[prev_sibling_[node]] = next_sibling_[node];
  } else if (p >= 0) {
    first_child_[p] = next_sibling_[node];
  }
  if (next_sibling_[node] >= 0) prev_sibling_[next_sibling_[node]] = prev_sibling_[node];
  next_sibling_[node] = prev_sibling_[node] = -1;
}

void TransportSimplex::attach(int node, int parent) {
  parent_[node] = parent;
  prev_sibling_[node] = -1;
  next_sibling_[node] = first_child_[parent];
  if (first_child_[parent] >= 0) prev_sibling_[first_child_[parent]] = node;
  first_child_[parent] = node;
}

bool TransportSimplex::find_entering_arc() {
  double best = -entering_tolerance_;
  bool found = false;
  std::size_t count = block_size_;
  std::size_t e = next_arc_;
  std::size_t i = e / cols_;
  std::size_t j = e % cols_;
  for (std::size_t scanned = 0; scanned < real_arcs_; ++scanned) {
    if (state_[e] == kLower) {
      const double c = cost_[e] + pi_[i] - pi_[rows_ + j];
      if (c < best) {
        best = c;
        in_arc_ = e;
        found = true;
      }
    }
    ++e;
    if (++j == cols_) {
      j = 0;
      ++i;
    }
    if (e == real_arcs_) {
      e = 0;
      i = 0;
      j = 0;
    }
    if (--count == 0) {
      if (found) break;
      count = block_size_;
    }
  }
  next_arc_ = e;
  return found;
}

void TransportSimplex::find_join_node() {
  int u = source(in_arc_);
  int v = target(in_arc_);
  while (u != v) {
    if (depth_[u] > depth_[v]) {
      u = parent_[u];
    } else if (depth_[v] > depth_[u]) {
      v = parent_[v];
    } else {
      u = parent_[u];
      v = parent_[v];
    }
  }
  join_ = u;
}

bool TransportSimplex::find_leaving_arc() {
  const int first = source(in_arc_);
  const int second = target(in_arc_);
  delta_ = kInf;
  int result = 0;
  // Flow runs from the join node down to `first`: arcs pointing up lose flow.
  for (int u = first; u != join_; u = parent_[u]) {
    const double d = pred_dir_[u] == kUp ? flow_[pred_[u]] : kInf;
    if (d < delta_) {
      delta_ = d;
      u_out_ = u;
      result = 1;
    }
  }
  // Flow runs from `second` up to the join node: arcs pointing down lose flow.
  for (int u = second; u != join_; u = parent_[u]) {
    const double d = pred_dir_[u] == kDown ? flow_[pred_[u]] : kInf;
    if (d <= delta_) {
      delta_ = d;
      u_out_ = u;
      result = 2;
    }
  }
  if (result == 0 || delta_ == kInf) return false;
  if (result == 1) {
    u_in_ = first;
    v_in_ = second;
  } else {
    u_in_ = second;
    v_in_ = first;
  }
  return true;
}

void TransportSimplex::change_flow() {
  if (delta_ > 0.0) {
    flow_[in_arc_] += delta_;
    for (int u = source(in_arc_); u != join_; u = parent_[u]) flow_[pred_[u]] -= pred_dir_[u] * delta_;
    for (int u = target(in_arc_); u != join_; u = parent_[u]) flow_[pred_[u]] += pred_dir_[u] * delta_;
  }
  const std::size_t out_arc = pred_[u_out_];
  flow_[out_arc] = 0.0;
  state_[out_arc] = kLower;
  state_[in_arc_] = kTree;
}

void TransportSimplex::update_tree() {
  // Re-hang the subtree cut off below u_out under v_in, reversing the path
  // u_in -> ... -> u_out.
  auto& path = scratch_;
  path.clear();
  for (int w = u_in_; w != u_out_; w = parent_[w]) path.push_back(w);
  path.push_back(u_out_);
  for (int w : path) detach(w);

  int new_parent = v_in_;
  std::size_t new_pred = in_arc_;
  std::int8_t new_dir = source(in_arc_) == u_in_ ? kUp : kDown;
  for (int w : path) {
    const std::size_t old_pred = pred_[w];
    const std::int8_t old_dir = pred_dir_[w];
    pred_[w] = new_pred;
    pred_dir_[w] = new_dir;
    attach(w, new_parent);
    new_parent = w;
    new_pred = old_pred;
    new_dir = static_cast<std::int8_t>(-old_dir);
  }

  const double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * arc_cost(in_arc_);
  auto& stack = scratch_;
  stack.clear();
  stack.push_back(u_in_);
  while (!stack.empty()) {
    const int w = stack.back();
    stack.pop_back();
    depth_[w] = depth_[parent_[w]] + 1;
    pi_[w] += sigma;
    for (int c = first_child_[w]; c >= 0; c = next_sibling_[c]) stack.push_back(c);
  }
}

TransportSolution TransportSimplex::solve() {
  TransportSolution out;
  const std::size_t max_pivots = 100 * (real_arcs_ + rows_ + cols_) + 1000;
  while (find_entering_arc()) {
    find_join_node();
    if (!find_leaving_arc()) throw NumericalCheckError("transportation problem is unbounded");
    change_flow();
    update_tree();
    if (++out.pivots > max_pivots) throw NumericalCheckError("network simplex exceeded its pivot budget");
  }
  for (std::size_t u = 0; u < rows_ + cols_; ++u) {
    if (flow_[real_arcs_ + u] > kBalanceTolerance) {
      throw ValidationError("infeasible marginals: artificial flow remains at node " + std::to_string(u));
    }
  }
  out.flow.assign(flow_.begin(), flow_.begin() + static_cast<std::ptrdiff_t>(real_arcs_));
  for (std::size_t e = 0; e < real_arcs_; ++e) out.objective += cost_[e] * out.flow[e];
  return out;
}

TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  std::span<const double> cost) {
  TransportSimplex simplex(supply, demand, cost);
  return simplex.solve();
}

}  // namespace robust_trade
