#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace robust_trade {

/// n x n table of per-block values over the unit square of types.
///
/// Block (k, l), 1 <= k, l <= n, is [v_{k-1}, v_k) x (c_{l-1}, c_l] with
/// v_k = c_k = k / n: k indexes the buyer value, l the seller cost.
///
/// Node (v_k, c_l), 0 <= k, l <= n, reads the block containing that point,
/// namely (k + 1, l), clamped to the grid so that the top edge v_n reads
/// block n and the bottom edge c_0 reads block 1.
class BlockTable {
 public:
  BlockTable() = default;
  explicit BlockTable(int n, double fill = 0.0);

  int n() const { return n_; }

  double& operator()(int k, int l) { return data_[index(k, l)]; }
  double operator()(int k, int l) const { return data_[index(k, l)]; }

  double node(int k, int l) const;

  /// Row-major by buyer block k.
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double max_abs() const;

  friend bool operator==(const BlockTable&, const BlockTable&) = default;

 private:
  std::size_t index(int k, int l) const {
    return static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(l - 1);
  }

  int n_ = 0;
  std::vector<double> data_;
};

inline double block_cut(int k, int n) { return static_cast<double>(k) / static_cast<double>(n); }

/// n-block mechanism: allocation and payments constant on each block.
/// t_b is paid by the buyer, t_s received by the seller.
struct BlockMechanism {
  BlockTable q;
  BlockTable t_b;
  BlockTable t_s;

  int n() const { return q.n(); }
};

/// Allocation rule on the unit square, values in [0, 1].
using AllocationRule = std::function<double(double v, double c)>;

/// Block averages of q by midpoint quadrature on an m x m sub-grid per block.
BlockTable block_averages(const AllocationRule& q, int n, int subgrid = 8);

/// Averages q per block, then zeroes blocks with k = 1 or l = n and blocks
/// whose left neighbour (k-1, l) or upper neighbour (k, l+1) has zero
/// average. Neighbour tests read the source averages, not the output.
BlockTable blockify(const AllocationRule& q, int n, int subgrid = 8);

struct MonotonicityReport {
  bool ok = true;
  /// First offending block and a description, when !ok.
  int k = 0;
  int l = 0;
  std::string detail;
};

/// q must be nondecreasing in k along each row and nonincreasing in l along
/// each column (up to `tol`).
MonotonicityReport check_expost_monotone(const BlockTable& q, double tol = 1e-12);

/// Buyer payments with binding local constraints:
/// t_b(k, l) = t_b(k-1, l) + v_{k-1} [q(k, l) - q(k-1, l)], t_b(1, l) = 0.
/// Throws PreconditionError if q is not ex-post monotone.
BlockTable buyer_payments(const BlockTable& q);

/// Seller payments, the dual recursion descending in l:
/// t_s(k, l) = t_s(k, l+1) + c_l [q(k, l) - q(k, l+1)], t_s(k, n) = 0.
/// Throws PreconditionError if q is not ex-post monotone.
BlockTable seller_payments(const BlockTable& q);

/// blockify followed by both payment rules.
BlockMechanism build_block_mechanism(const AllocationRule& q, int n, int subgrid = 8);

/// Largest gain any type can obtain by misreporting its block (buyer along
/// its row, seller along its column), taking the worst type in each block.
/// A value <= tol means DSIC at block granularity.
double check_dsic(const BlockMechanism& m);

/// Smallest ex-post payoff of either agent over all types.
/// A value >= -tol means EIR.
double check_eir(const BlockMechanism& m);

struct BudgetReport {
  BlockTable imbalance;  // t_b - t_s
  double max_abs = 0.0;
  /// Largest violation of the payment/allocation identity at interior nodes:
  /// (t_b - t_s)(v_k, c_l) = (v_k - c_l) q(v_k, c_l)
  ///     - (1/n) [sum_{i<k} q(v_i, c_l) + sum_{i>l} q(v_k, c_i)]
  ///     + t_b(v_0, c_l) - t_s(v_k, c_n).
  double identity_residual = 0.0;
};
BudgetReport budget_report(const BlockMechanism& m);

/// Allocation vanishes at every node (v_k, c_l) with k < l, i.e. on and above
/// the block diagonal.
bool check_obs2(const BlockTable& q, double tol = 0.0);

/// Lower-triangular table r(k, l), 1 <= l < k <= n, in node indices.
class RnTable {
 public:
  RnTable() = default;
  explicit RnTable(int n) : n_(n), data_(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1), 0.0) {}

  int n() const { return n_; }
  double& operator()(int k, int l) { return data_[static_cast<std::size_t>(k) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(l)]; }
  double operator()(int k, int l) const { return data_[static_cast<std::size_t>(k) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(l)]; }

 private:
  int n_ = 0;
  std::vector<double> data_;
};

/// r(l+1, l) = n (t_b - t_s)(v_{l+1}, c_l);
/// r(k, l) = n/(k-l) [(t_b - t_s)(v_k, c_l) + (1/n) sum_{i=l+1}^{k-1} (r(k, i) + r(i, l))],
/// filled in increasing k - l. Under the vanishing pattern of check_obs2 it
/// satisfies q(v_k, c_l) = r(k, l) + sum_{i=l}^{k} q(v_i, c_i).
RnTable rn_table(const BlockMechanism& m);

/// Largest |q(v_k, c_l) - r(k, l) - sum_{i=l}^{k} q(v_i, c_i)| over k > l.
double rn_identity_residual(const BlockMechanism& m, const RnTable& r);

/// Trade probabilities u_i at prices i/n, i = 1..n-1 (stored 0-based).
struct PostedPriceVector {
  std::vector<double> u;

  int n() const { return static_cast<int>(u.size()) + 1; }
  double sum() const;
};

struct ProjectionReport {
  PostedPriceVector u;
  double delta = 0.0;  // r(n, 1) / (n - 1)
  RnTable r;
};

/// u_i = q(v_i, c_i) + r(n, 1) / (n - 1). Requires the check_obs2 pattern
/// (PreconditionError) and throws ValidationError if some u_i < -1e-9.
ProjectionReport project_to_bb(const BlockMechanism& m);

/// Randomized posted price at i/n with probability u_i:
/// q(k, l) = sum_{i=l}^{k-1} u_i and t_b = t_s = sum_{i=l}^{k-1} u_i i/n for
/// k > l, zero otherwise. Throws ValidationError for invalid u.
BlockMechanism u_to_mechanism(const PostedPriceVector& u);

/// Throws ValidationError unless u_i >= 0 and sum u_i <= 1 (both within tol).
void validate_posted_price_vector(const PostedPriceVector& u, double tol = 1e-9);

}  // namespace robust_trade
