#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace robust_trade {

struct TransportSolution {
  double objective = 0.0;
  /// Row-major rows x cols shipment plan.
  std::vector<double> flow;
  std::size_t pivots = 0;
};

/// Primal network simplex for the dense transportation problem
///
///   minimize   sum_ij cost_ij x_ij
///   subject to sum_j x_ij = supply_i,  sum_i x_ij = demand_j,  x >= 0.
///
/// The spanning tree is kept strongly feasible (leaving arc chosen as the last
/// blocking arc met when walking the pivot cycle from the apex), which rules
/// out cycling under degeneracy. Entering arcs are picked by block search.
/// Supplies and demands must be nonnegative with equal totals up to 1e-9.
class TransportSimplex {
 public:
  TransportSimplex(std::span<const double> supply, std::span<const double> demand,
                   std::span<const double> cost);

  TransportSolution solve();

 private:
  enum : std::int8_t { kTree = 0, kLower = 1 };
  enum : std::int8_t { kDown = -1, kUp = 1 };

  bool find_entering_arc();
  void find_join_node();
  bool find_leaving_arc();
  void change_flow();
  void update_tree();

  int source(std::size_t arc) const;
  int target(std::size_t arc) const;
  double arc_cost(std::size_t arc) const;
  double reduced_cost(std::size_t arc) const;

  void detach(int node);
  void attach(int node, int parent);

  std::size_t rows_;
  std::size_t cols_;
  std::size_t real_arcs_;
  int root_;
  double artificial_cost_ = 0.0;
  double entering_tolerance_ = 0.0;

  std::vector<double> cost_;
  std::vector<double> supply_;

  // Per arc (real arcs first, then one artificial arc per node).
  std::vector<double> flow_;
  std::vector<std::int8_t> state_;
  std::vector<int> art_source_;
  std::vector<int> art_target_;

  // Per node (rows, then columns, then the root).
  std::vector<int> parent_;
  std::vector<std::size_t> pred_;
  std::vector<std::int8_t> pred_dir_;
  std::vector<int> depth_;
  std::vector<double> pi_;
  std::vector<int> first_child_;
  std::vector<int> next_sibling_;
  std::vector<int> prev_sibling_;

  std::size_t block_size_ = 0;
  std::size_t next_arc_ = 0;

  // Current pivot.
  std::size_t in_arc_ = 0;
  int join_ = 0;
  int u_in_ = 0;
  int v_in_ = 0;
  int u_out_ = 0;
  double delta_ = 0.0;

  std::vector<int> scratch_;
};

/// Convenience wrapper around TransportSimplex.
TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  std::span<const double> cost);

}  // namespace robust_trade
