#pragma once

#include <cstddef>
#include <vector>

#include "robust_trade/coupling.hpp"
#include "robust_trade/marginals.hpp"
#include "robust_trade/posted_price.hpp"

namespace robust_trade {

struct PriceValue {
  double price = 0.0;
  double value = 0.0;
};

/// Best posted price against a fixed coupling: maximizes
/// sum_ij (v_i - c_j) 1[v_i > p > c_j] h_ij over the midpoints between
/// consecutive distinct coordinates of the support, its two ends and every
/// price in `extra_prices`. Ties go to the smallest price.
PriceValue best_price_for_coupling(const GridCoupling& h, const std::vector<double>& extra_prices = {});

/// Gains of the posted price p against h.
double posted_price_gains(const GridCoupling& h, double p);

/// How a refinement cell spreads its mass inside the cell. Both keep the
/// cell's marginals equal to the buyer and seller distributions restricted
/// to it.
enum class CellLift {
  kComonotone,  // quantile coupling: v and c share the same rank in the cell
  kProduct,     // v and c independent in the cell
};

/// Gains of the posted price p against a refinement read as a density.
double refined_gains(const WorstDistribution& w, const RefinedCoupling& rc, double p,
                     CellLift lift = CellLift::kComonotone);

/// Best posted price against a refinement read as a density. Gains are
/// smooth between cell edges and marginal knots; each such interval is
/// scanned at `samples` points and the best bracket refined by golden
/// section. Every price in `extra_prices` is evaluated as well.
PriceValue best_price_for_refinement(const WorstDistribution& w, const RefinedCoupling& rc,
                                     const std::vector<double>& extra_prices = {}, int samples = 16,
                                     CellLift lift = CellLift::kComonotone);

struct MaxminResult {
  double value = 0.0;  // analytic optimum A
  double price = 0.0;
  double oracle_value = 0.0;  // transportation minimum at `price` on the grid
  double tolerance = 0.0;
  OracleResult oracle;
};

/// Default cross-check tolerance 2 (|v_hi| + |c_hi|) / grid.
double maxmin_tolerance(const MarginalDistribution& buyer, const MarginalDistribution& seller, std::size_t grid);

/// Optimal robust posted price, cross-checked against the transportation
/// oracle on `grid` cells per marginal. Throws NumericalCheckError if the two
/// disagree by more than `tolerance` (negative: maxmin_tolerance).
MaxminResult maxmin(const MarginalDistribution& buyer, const MarginalDistribution& seller, std::size_t grid,
                    double tolerance = -1.0);

struct MinimaxLevel {
  std::size_t n = 0;
  double value = 0.0;  // best response gains against the level-n coupling
  double best_price = 0.0;
  double value_at_p_star = 0.0;
};

struct MinimaxReport {
  double maxmin_value = 0.0;
  double minmax_value = 0.0;
  double gap = 0.0;
  double price = 0.0;  // p*
  std::size_t witness_level = 0;
  RefinedCoupling witness;
  std::vector<MinimaxLevel> levels;
  double oracle_value = 0.0;
  std::size_t grid = 0;
  double tolerance = 0.0;
};

/// Best-response gains against refine(worst_distribution(p*), n) for each
/// level of the schedule.
std::vector<MinimaxLevel> minmax_levels(const MarginalDistribution& buyer, const MarginalDistribution& seller,
                                        double p_star, const std::vector<std::size_t>& schedule,
                                        CellLift lift = CellLift::kComonotone);

/// maxmin on `grid` cells, then the infimum of minmax_levels.
MinimaxReport minimax(const MarginalDistribution& buyer, const MarginalDistribution& seller, std::size_t grid,
                      const std::vector<std::size_t>& schedule, double tolerance = -1.0,
                      CellLift lift = CellLift::kComonotone);

}  // namespace robust_trade
