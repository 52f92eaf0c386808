#include "robust_trade/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robust_trade/errors.hpp"
#include "robust_trade/posted_price.hpp"

namespace robust_trade {
namespace {

struct Entry {
  double v;
  double c;
  double mass;
};

std::vector<Entry> support_of(const GridCoupling& h) {
  std::vector<Entry> out;
  for (std::size_t i = 0; i < h.mass.rows(); ++i) {
    for (std::size_t j = 0; j < h.mass.cols(); ++j) {
      if (h.mass(i, j) > 0.0) out.push_back({h.row_points[i], h.col_points[j], h.mass(i, j)});
    }
  }
  return out;
}

double gains_on(const std::vector<Entry>& entries, double p) {
  double g = 0.0;
  for (const auto& e : entries) {
    if (e.v > p && e.c < p) g += (e.v - e.c) * e.mass;
  }
  return g;
}

constexpr double kGolden = 0.6180339887498949;

}  // namespace

double posted_price_gains(const GridCoupling& h, double p) { return gains_on(support_of(h), p); }

PriceValue best_price_for_coupling(const GridCoupling& h, const std::vector<double>& extra_prices) {
  const auto entries = support_of(h);
  std::vector<double> coords;
  for (const auto& e : entries) {
    coords.push_back(e.v);
    coords.push_back(e.c);
  }
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());

  std::vector<double> prices = extra_prices;
  for (std::size_t i = 0; i + 1 < coords.size(); ++i) prices.push_back(0.5 * (coords[i] + coords[i + 1]));
  if (!coords.empty()) {
    prices.push_back(coords.front());
    prices.push_back(coords.back());
  }
  std::sort(prices.begin(), prices.end());

  PriceValue best{prices.empty() ? 0.0 : prices.front(), -std::numeric_limits<double>::infinity()};
  for (double p : prices) {
    const double g = gains_on(entries, p);
    if (g > best.value) best = {p, g};
  }
  if (prices.empty()) best.value = 0.0;
  return best;
}

double refined_gains(const WorstDistribution& w, const RefinedCoupling& rc, double p, CellLift lift) {
  double g = 0.0;
  for (const auto& cell : rc.cells) {
    if (cell.mass <= 0.0) continue;
    const double v_from = std::max(p, cell.v_lo);
    const double c_to = std::min(p, cell.c_hi);
    if (v_from >= cell.v_hi || c_to <= cell.c_lo) continue;
    if (lift == CellLift::kComonotone) {
      // ranks u in (u1, u2) trade: v(u) > p and c(u) < p
      const double f0 = w.buyer.cdf(cell.v_lo);
      const double g0 = w.seller.cdf(cell.c_lo);
      const double u1 = std::clamp(w.buyer.cdf(p) - f0, 0.0, cell.mass);
      const double u2 = std::clamp(w.seller.cdf(p) - g0, 0.0, cell.mass);
      if (u2 <= u1) continue;
      auto v_at = [&](double u) { return std::clamp(w.buyer.quantile(f0 + u), cell.v_lo, cell.v_hi); };
      auto c_at = [&](double u) { return std::clamp(w.seller.quantile(g0 + u), cell.c_lo, cell.c_hi); };
      g += w.buyer.partial_expectation(v_at(u1), v_at(u2)) - w.seller.partial_expectation(c_at(u1), c_at(u2));
      continue;
    }
    const double fv = w.buyer.mass(cell.v_lo, cell.v_hi);
    const double gc = w.seller.mass(cell.c_lo, cell.c_hi);
    if (fv <= 0.0 || gc <= 0.0) continue;
    // E[(v - c) 1{v > p} 1{c < p}] with v, c independent inside the cell
    const double pv = w.buyer.mass(v_from, cell.v_hi) / fv;
    const double pc = w.seller.mass(cell.c_lo, c_to) / gc;
    const double ev = w.buyer.partial_expectation(v_from, cell.v_hi) / fv;
    const double ec = w.seller.partial_expectation(cell.c_lo, c_to) / gc;
    g += cell.mass * (pc * ev - pv * ec);
  }
  return g;
}

PriceValue best_price_for_refinement(const WorstDistribution& w, const RefinedCoupling& rc,
                                     const std::vector<double>& extra_prices, int samples, CellLift lift) {
  const auto range = price_range(w.buyer, w.seller);
  std::vector<double> cuts{range.lo, range.hi, w.price};
  for (const auto& cell : rc.cells) {
    cuts.insert(cuts.end(), {cell.v_lo, cell.v_hi, cell.c_lo, cell.c_hi});
  }
  for (const auto& k : w.buyer.knots()) cuts.push_back(k.point);
  for (const auto& k : w.seller.knots()) cuts.push_back(k.point);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto f = [&](double p) { return refined_gains(w, rc, p, lift); };
  PriceValue best{cuts.front(), f(cuts.front())};
  double step_at_best = 0.0;
  auto consider = [&](double p, double step) {
    const double g = f(p);
    if (g > best.value) {
      best = {p, g};
      step_at_best = step;
    }
  };
  const int m = std::max(samples, 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double step = (cuts[i + 1] - cuts[i]) / m;
    for (int s = 1; s <= m; ++s) consider(s == m ? cuts[i + 1] : cuts[i] + step * s, step);
  }
  for (double p : extra_prices) consider(p, 0.0);

  if (step_at_best > 0.0) {
    double a = std::max(range.lo, best.price - step_at_best);
    double b = std::min(range.hi, best.price + step_at_best);
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > 1e-12) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGolden * (b - a);
        f2 = f(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGolden * (b - a);
        f1 = f(x1);
      }
    }
    consider(0.5 * (a + b), 0.0);
  }
  return best;
}

double maxmin_tolerance(const MarginalDistribution& buyer, const MarginalDistribution& seller, std::size_t grid) {
  return 2.0 * (std::abs(buyer.support_hi()) + std::abs(seller.support_hi())) / static_cast<double>(grid);
}

MaxminResult maxmin(const MarginalDistribution& buyer, const MarginalDistribution& seller, std::size_t grid,
                    double tolerance) {
  if (grid < 2) throw ValidationError("grid must have at least 2 cells");
  MaxminResult r;
  const OptimizeResult opt = optimize(buyer, seller);
  r.value = opt.value;
  r.price = opt.price;
  r.tolerance = tolerance < 0.0 ? maxmin_tolerance(buyer, seller, grid) : tolerance;

  const GridMarginal bg = buyer.discretize(grid);
  const GridMarginal sg = seller.discretize(grid);
  const GridAllocation q = posted_price_allocation(bg.points, sg.points, {opt.price, TieRule::kNoTrade});
  r.oracle = min_expected_gains(bg, sg, q);
  r.oracle_value = r.oracle.value;
  if (std::abs(r.oracle_value - r.value) > r.tolerance) {
    throw NumericalCheckError("maxmin cross-check failed: analytic " + std::to_string(r.value) + " vs oracle " +
                              std::to_string(r.oracle_value) + " at p = " + std::to_string(r.price));
  }
  return r;
}

std::vector<MinimaxLevel> minmax_levels(const MarginalDistribution& buyer, const MarginalDistribution& seller,
                                        double p_star, const std::vector<std::size_t>& schedule, CellLift lift) {
  if (schedule.empty()) throw ValidationError("refinement schedule is empty");
  const WorstDistribution w = worst_distribution(buyer, seller, p_star);
  std::vector<MinimaxLevel> out;
  for (std::size_t n : schedule) {
    if (n == 0) throw ValidationError("refinement levels must be positive");
    const RefinedCoupling rc = refine(w, n);
    const PriceValue best = best_price_for_refinement(w, rc, {p_star}, 16, lift);
    out.push_back({n, best.value, best.price, refined_gains(w, rc, p_star, lift)});
  }
  return out;
}

MinimaxReport minimax(const MarginalDistribution& buyer, const MarginalDistribution& seller, std::size_t grid,
                      const std::vector<std::size_t>& schedule, double tolerance, CellLift lift) {
  const MaxminResult mm = maxmin(buyer, seller, grid, tolerance);
  MinimaxReport rep;
  rep.maxmin_value = mm.value;
  rep.price = mm.price;
  rep.oracle_value = mm.oracle_value;
  rep.grid = grid;
  rep.tolerance = mm.tolerance;
  rep.levels = minmax_levels(buyer, seller, mm.price, schedule, lift);

  std::size_t best = 0;
  for (std::size_t i = 1; i < rep.levels.size(); ++i) {
    if (rep.levels[i].value < rep.levels[best].value) best = i;
  }
  rep.minmax_value = rep.levels[best].value;
  rep.witness_level = rep.levels[best].n;
  rep.witness = refine(worst_distribution(buyer, seller, mm.price), rep.witness_level);
  rep.gap = rep.minmax_value - rep.maxmin_value;
  return rep;
}

}  // namespace robust_trade
