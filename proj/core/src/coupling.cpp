#include "robust_trade/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "robust_trade/errors.hpp"
#include "robust_trade/transport.hpp"

namespace robust_trade {
namespace {

constexpr double kMassTolerance = 1e-9;

std::vector<std::size_t> sorted_order(const std::vector<double>& points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  return order;
}

OracleResult optimize_gains(const GridMarginal& buyer, const GridMarginal& seller, const GridAllocation& q,
                            double sign) {
  validate_grid_marginal(buyer, "buyer");
  validate_grid_marginal(seller, "seller");
  if (q.q.rows() != buyer.size() || q.q.cols() != seller.size()) {
    throw ValidationError("allocation dimensions do not match the marginals");
  }
  const double gap = std::abs(std::accumulate(buyer.masses.begin(), buyer.masses.end(), 0.0) -
                              std::accumulate(seller.masses.begin(), seller.masses.end(), 0.0));
  if (gap > kMassTolerance) throw ValidationError("infeasible marginals: totals differ by " + std::to_string(gap));

  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < buyer.size(); ++i) {
    if (buyer.masses[i] > 0.0) rows.push_back(i);
  }
  for (std::size_t j = 0; j < seller.size(); ++j) {
    if (seller.masses[j] > 0.0) cols.push_back(j);
  }

  std::vector<double> supply(rows.size());
  std::vector<double> demand(cols.size());
  std::vector<double> cost(rows.size() * cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a) supply[a] = buyer.masses[rows[a]];
  for (std::size_t b = 0; b < cols.size(); ++b) demand[b] = seller.masses[cols[b]];
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const double v = buyer.points[rows[a]];
    for (std::size_t b = 0; b < cols.size(); ++b) {
      cost[a * cols.size() + b] = sign * (v - seller.points[cols[b]]) * q.q(rows[a], cols[b]);
    }
  }

  const auto solution = solve_transport(supply, demand, cost);

  OracleResult out;
  out.coupling.mass = Matrix(buyer.size(), seller.size());
  out.coupling.row_points = buyer.points;
  out.coupling.col_points = seller.points;
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b) {
      out.coupling.mass(rows[a], cols[b]) = solution.flow[a * cols.size() + b];
    }
  }
  out.value = sign * solution.objective;
  return out;
}

}  // namespace

std::vector<double> GridCoupling::row_sums() const {
  std::vector<double> out(mass.rows(), 0.0);
  for (std::size_t i = 0; i < mass.rows(); ++i) {
    for (std::size_t j = 0; j < mass.cols(); ++j) out[i] += mass(i, j);
  }
  return out;
}

std::vector<double> GridCoupling::col_sums() const {
  std::vector<double> out(mass.cols(), 0.0);
  for (std::size_t i = 0; i < mass.rows(); ++i) {
    for (std::size_t j = 0; j < mass.cols(); ++j) out[j] += mass(i, j);
  }
  return out;
}

double GridCoupling::total() const { return std::accumulate(mass.data().begin(), mass.data().end(), 0.0); }

void validate_grid_marginal(const GridMarginal& m, const char* name) {
  if (m.masses.empty()) throw ValidationError(std::string(name) + " marginal is empty");
  if (m.masses.size() != m.points.size()) {
    throw ValidationError(std::string(name) + " marginal has " + std::to_string(m.masses.size()) + " masses but " +
                          std::to_string(m.points.size()) + " points");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m.masses.size(); ++i) {
    if (!(m.masses[i] >= 0.0) || !std::isfinite(m.masses[i])) {
      throw ValidationError(std::string(name) + " mass " + std::to_string(i) + " is negative or non-finite");
    }
    if (!std::isfinite(m.points[i])) {
      throw ValidationError(std::string(name) + " point " + std::to_string(i) + " is non-finite");
    }
    total += m.masses[i];
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw ValidationError(std::string(name) + " masses sum to " + std::to_string(total) + ", not 1");
  }
}

void validate_coupling(const GridCoupling& h, const GridMarginal& buyer, const GridMarginal& seller,
                       double tolerance) {
  if (h.mass.rows() != buyer.size() || h.mass.cols() != seller.size()) {
    throw ValidationError("coupling dimensions do not match the marginals");
  }
  for (double m : h.mass.data()) {
    if (!(m >= 0.0)) throw ValidationError("coupling has a negative entry");
  }
  const auto rs = h.row_sums();
  const auto cs = h.col_sums();
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (std::abs(rs[i] - buyer.masses[i]) > tolerance) {
      throw ValidationError("coupling row " + std::to_string(i) + " does not reproduce the buyer marginal");
    }
  }
  for (std::size_t j = 0; j < cs.size(); ++j) {
    if (std::abs(cs[j] - seller.masses[j]) > tolerance) {
      throw ValidationError("coupling column " + std::to_string(j) + " does not reproduce the seller marginal");
    }
  }
}

double expected_gains(const GridCoupling& h, const GridAllocation& q) {
  if (q.q.rows() != h.mass.rows() || q.q.cols() != h.mass.cols()) {
    throw ValidationError("allocation dimensions do not match the coupling");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < h.mass.rows(); ++i) {
    for (std::size_t j = 0; j < h.mass.cols(); ++j) {
      const double m = h.mass(i, j);
      if (m != 0.0) total += (h.row_points[i] - h.col_points[j]) * q.q(i, j) * m;
    }
  }
  return total;
}

OracleResult min_expected_gains(const GridMarginal& buyer, const GridMarginal& seller, const GridAllocation& q) {
  return optimize_gains(buyer, seller, q, 1.0);
}

OracleResult max_expected_gains(const GridMarginal& buyer, const GridMarginal& seller, const GridAllocation& q) {
  return optimize_gains(buyer, seller, q, -1.0);
}

GridCoupling comonotone_coupling(const GridMarginal& buyer, const GridMarginal& seller) {
  validate_grid_marginal(buyer, "buyer");
  validate_grid_marginal(seller, "seller");
  GridCoupling out;
  out.mass = Matrix(buyer.size(), seller.size());
  out.row_points = buyer.points;
  out.col_points = seller.points;

  const auto rows = sorted_order(buyer.points);
  const auto cols = sorted_order(seller.points);
  std::size_t a = 0;
  std::size_t b = 0;
  double row_left = buyer.masses[rows[0]];
  double col_left = seller.masses[cols[0]];
  while (a < rows.size() && b < cols.size()) {
    const double m = std::min(row_left, col_left);
    out.mass(rows[a], cols[b]) += m;
    row_left -= m;
    col_left -= m;
    // Advance whichever side is exhausted; ties advance the row first so the
    // last column absorbs rounding residue.
    if (row_left <= col_left) {
      if (++a < rows.size()) row_left = buyer.masses[rows[a]];
    } else {
      if (++b < cols.size()) col_left = seller.masses[cols[b]];
    }
  }
  return out;
}

}  // namespace robust_trade
