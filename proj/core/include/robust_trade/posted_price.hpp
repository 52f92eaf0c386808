#pragma once

#include <cstddef>
#include <vector>

#include "robust_trade/coupling.hpp"
#include "robust_trade/marginals.hpp"

namespace robust_trade {

enum class TieRule { kNoTrade, kTrade };

/// Deterministic posted price: trade at `price` iff v > price and c < price.
/// On ties (v == price or c == price) `tie_rule` decides.
struct PostedPriceMechanism {
  double price = 0.0;
  TieRule tie_rule = TieRule::kNoTrade;

  int allocation(double v, double c) const;
  /// Paid by the buyer and received by the seller.
  double payment(double v, double c) const { return price * allocation(v, c); }
};

/// Grid allocation of a posted price on the given cell points.
GridAllocation posted_price_allocation(const std::vector<double>& buyer_points,
                                       const std::vector<double>& seller_points, const PostedPriceMechanism& m);

/// Prices considered by the optimizer: [min support_lo, max support_hi].
struct PriceRange {
  double lo;
  double hi;
};
PriceRange price_range(const MarginalDistribution& buyer, const MarginalDistribution& seller);

/// Minimum mass any consistent coupling puts in the trade region, G(p) - F(p).
double trade_floor(const MarginalDistribution& buyer, const MarginalDistribution& seller, double p);

struct Thresholds {
  double x;  // G(x) = F(p)
  double y;  // F(y) = G(p)
};
Thresholds thresholds(const MarginalDistribution& buyer, const MarginalDistribution& seller, double p);

/// Worst-case expected gains of the posted price p over all couplings of the
/// two marginals: the integral of v f(v) over [p, y(p)] minus the integral of
/// c g(c) over [x(p), p], and 0 whenever the trade floor is nonpositive.
double robust_efficiency(const MarginalDistribution& buyer, const MarginalDistribution& seller, double p);

/// Per-price diagnostics of the worst-case coupling.
struct RobustAnalysis {
  double price = 0.0;
  double trade_floor = 0.0;
  double x = 0.0;
  double y = 0.0;
  double a = 0.0;  // mass in the trade region
  double b = 0.0;  // mass with v <= p, c <= p
  double d = 0.0;  // mass with v >= p, c >= p
  double z = 0.0;  // mass with v <= p, c >= p
  double efficiency = 0.0;
};
RobustAnalysis analyze(const MarginalDistribution& buyer, const MarginalDistribution& seller, double p);

struct OptimizeResult {
  double price = 0.0;
  double value = 0.0;
  RobustAnalysis analysis;
};

/// Grid scan of robust_efficiency over `grid_size` equally spaced prices,
/// then golden-section refinement inside the bracket of the best scan point
/// down to width `refine_tol`. Throws std::domain_error if grid_size < 2.
OptimizeResult optimize(const MarginalDistribution& buyer, const MarginalDistribution& seller,
                        std::size_t grid_size = 2001, double refine_tol = 1e-10);

struct Rectangle {
  double v_lo = 0.0;
  double v_hi = 0.0;
  double c_lo = 0.0;
  double c_hi = 0.0;
  double mass = 0.0;
};

/// Worst coupling for a posted price, as rectangles filled comonotonically.
/// With a positive trade floor: [lo, p] x [lo, x] (mass b),
/// [p, y] x [x, p] (mass a) and [y, hi] x [p, hi] (mass d). Otherwise the
/// zero-gain configuration [lo, p] x [lo, x] and [p, hi] x [x, hi] with x >= p.
struct WorstDistribution {
  MarginalDistribution buyer;
  MarginalDistribution seller;
  double price = 0.0;
  bool trade_floor_positive = false;
  std::vector<Rectangle> rectangles;
};
WorstDistribution worst_distribution(const MarginalDistribution& buyer, const MarginalDistribution& seller, double p);

/// Member of the refinement family: each rectangle's buyer interval split
/// into n equal-length pieces, seller cut points matching cumulative mass.
/// The coupling puts each sub-rectangle's mass at its conditional means.
struct RefinedCoupling {
  std::size_t level = 0;
  std::vector<Rectangle> cells;
  GridCoupling coupling;
};
RefinedCoupling refine(const WorstDistribution& w, std::size_t n);

/// Half-open index range [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool empty() const { return end <= begin; }
};

/// Cell rectangles A = rows_a x cols_a and D = rows_d x cols_d. The moves go
/// to B = rows_d x cols_a and C = rows_a x cols_d.
struct RedistributionRects {
  IndexRange rows_a;
  IndexRange cols_a;
  IndexRange rows_d;
  IndexRange cols_d;
};

/// Empties A and D, refilling B and C in product form so that every row and
/// column sum is unchanged. A and D must carry equal mass (within 1e-9);
/// throws PreconditionError otherwise or when the ranges overlap.
GridCoupling redistribute(const GridCoupling& h, const RedistributionRects& rects);

}  // namespace robust_trade
