#pragma once

#include <cstddef>
#include <vector>

#include "robust_trade/marginals.hpp"

namespace robust_trade {

/// Dense row-major matrix; rows index buyer cells, columns seller cells.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Joint probability masses over buyer-value x seller-cost cells.
struct GridCoupling {
  Matrix mass;
  std::vector<double> row_points;  // buyer values
  std::vector<double> col_points;  // seller costs

  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
  double total() const;

  GridMarginal buyer_marginal() const { return {row_sums(), row_points}; }
  GridMarginal seller_marginal() const { return {col_sums(), col_points}; }
};

/// Trade probability per cell, entries in [0, 1].
struct GridAllocation {
  Matrix q;
};

struct OracleResult {
  double value = 0.0;
  GridCoupling coupling;
};

/// Throws ValidationError unless masses are nonnegative, match their points
/// in length and sum to 1 within 1e-9.
void validate_grid_marginal(const GridMarginal& m, const char* name);

/// Throws ValidationError unless entries are nonnegative and the marginals
/// reproduce `buyer`/`seller` within `tolerance`.
void validate_coupling(const GridCoupling& h, const GridMarginal& buyer, const GridMarginal& seller,
                       double tolerance = 1e-9);

/// sum_ij (v_i - c_j) q_ij h_ij
double expected_gains(const GridCoupling& h, const GridAllocation& q);

/// Exact minimum of expected gains over every coupling with the given
/// marginal masses (transportation simplex). Zero-mass rows and columns are
/// pruned before solving; the returned coupling has full size.
OracleResult min_expected_gains(const GridMarginal& buyer, const GridMarginal& seller, const GridAllocation& q);

/// As min_expected_gains, maximizing instead.
OracleResult max_expected_gains(const GridMarginal& buyer, const GridMarginal& seller, const GridAllocation& q);

/// Quantile-matched coupling: north-west-corner fill of the marginals sorted
/// by point. Reproduces both marginals exactly up to rounding.
GridCoupling comonotone_coupling(const GridMarginal& buyer, const GridMarginal& seller);

}  // namespace robust_trade
