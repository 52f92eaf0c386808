#include "robust_trade/posted_price.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "robust_trade/errors.hpp"

namespace robust_trade {
namespace {

constexpr double kGolden = 0.6180339887498949;  // (sqrt(5) - 1) / 2
constexpr double kMassTolerance = 1e-9;

double clamp_to(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

}  // namespace

int PostedPriceMechanism::allocation(double v, double c) const {
  if (v == price || c == price) {
    if (tie_rule == TieRule::kNoTrade) return 0;
    return (v >= price && c <= price) ? 1 : 0;
  }
  return (v > price && c < price) ? 1 : 0;
}

GridAllocation posted_price_allocation(const std::vector<double>& buyer_points,
                                       const std::vector<double>& seller_points, const PostedPriceMechanism& m) {
  GridAllocation out{Matrix(buyer_points.size(), seller_points.size())};
  for (std::size_t i = 0; i < buyer_points.size(); ++i) {
    for (std::size_t j = 0; j < seller_points.size(); ++j) {
      out.q(i, j) = m.allocation(buyer_points[i], seller_points[j]);
    }
  }
  return out;
}

PriceRange price_range(const MarginalDistribution& buyer, const MarginalDistribution& seller) {
  return {std::min(buyer.support_lo(), seller.support_lo()), std::max(buyer.support_hi(), seller.support_hi())};
}

double trade_floor(const MarginalDistribution& buyer, const MarginalDistribution& seller, double p) {
  return seller.cdf(p) - buyer.cdf(p);
}

Thresholds thresholds(const MarginalDistribution& buyer, const MarginalDistribution& seller, double p) {
  return {seller.quantile(buyer.cdf(p)), buyer.quantile(seller.cdf(p))};
}

double robust_efficiency(const MarginalDistribution& buyer, const MarginalDistribution& seller, double p) {
  if (p <= price_range(buyer, seller).lo) return 0.0;
  if (trade_floor(buyer, seller, p) <= 0.0) return 0.0;
  const auto [x, y] = thresholds(buyer, seller, p);
  assert(x <= p);
  const double gains = buyer.partial_expectation(p, std::max(p, y)) - seller.partial_expectation(std::min(x, p), p);
  return std::max(0.0, gains);
}

RobustAnalysis analyze(const MarginalDistribution& buyer, const MarginalDistribution& seller, double p) {
  RobustAnalysis r;
  r.price = p;
  r.trade_floor = trade_floor(buyer, seller, p);
  const auto t = thresholds(buyer, seller, p);
  r.x = t.x;
  r.y = t.y;
  const double fp = buyer.cdf(p);
  const double gp = seller.cdf(p);
  if (r.trade_floor > 0.0) {
    r.a = gp - fp;
    r.b = fp;
    r.d = 1.0 - gp;
    r.z = 0.0;
  } else {
    r.a = 0.0;
    r.b = gp;
    r.z = fp - gp;
    r.d = 1.0 - fp;
  }
  r.efficiency = robust_efficiency(buyer, seller, p);
  return r;
}

OptimizeResult optimize(const MarginalDistribution& buyer, const MarginalDistribution& seller, std::size_t grid_size,
                        double refine_tol) {
  if (grid_size < 2) throw std::domain_error("optimize needs a price grid of at least 2 points");
  const auto range = price_range(buyer, seller);
  const double step = (range.hi - range.lo) / static_cast<double>(grid_size - 1);
  auto price_at = [&](std::size_t i) { return i + 1 == grid_size ? range.hi : range.lo + step * static_cast<double>(i); };
  auto objective = [&](double p) { return robust_efficiency(buyer, seller, p); };

  std::size_t best = 0;
  double best_value = objective(price_at(0));
  for (std::size_t i = 1; i < grid_size; ++i) {
    const double v = objective(price_at(i));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  double best_price = price_at(best);

  if (best_value > 0.0) {
    double a = price_at(best == 0 ? 0 : best - 1);
    double b = price_at(std::min(best + 1, grid_size - 1));
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (b - a > refine_tol) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGolden * (b - a);
        f2 = objective(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGolden * (b - a);
        f1 = objective(x1);
      }
    }
    const double p = 0.5 * (a + b);
    const double v = objective(p);
    if (v >= best_value) {
      best_value = v;
      best_price = p;
    }
  }

  return {best_price, best_value, analyze(buyer, seller, best_price)};
}

WorstDistribution worst_distribution(const MarginalDistribution& buyer, const MarginalDistribution& seller, double p) {
  WorstDistribution w{buyer, seller, p, trade_floor(buyer, seller, p) > 0.0, {}};
  const double v_lo = buyer.support_lo();
  const double v_hi = buyer.support_hi();
  const double c_lo = seller.support_lo();
  const double c_hi = seller.support_hi();
  const double pv = clamp_to(p, v_lo, v_hi);
  const double pc = clamp_to(p, c_lo, c_hi);
  const auto [x, y] = thresholds(buyer, seller, p);
  const double fp = buyer.cdf(p);
  const double gp = seller.cdf(p);

  if (w.trade_floor_positive) {
    w.rectangles.push_back({v_lo, pv, c_lo, x, fp});
    w.rectangles.push_back({pv, y, x, pc, gp - fp});
    w.rectangles.push_back({y, v_hi, pc, c_hi, 1.0 - gp});
  } else {
    w.rectangles.push_back({v_lo, pv, c_lo, x, fp});
    w.rectangles.push_back({pv, v_hi, x, c_hi, 1.0 - fp});
  }
  return w;
}

RefinedCoupling refine(const WorstDistribution& w, std::size_t n) {
  if (n == 0) throw std::domain_error("refine needs n >= 1");
  RefinedCoupling out;
  out.level = n;
  for (const auto& rect : w.rectangles) {
    if (rect.mass <= 0.0) continue;
    const double f0 = w.buyer.cdf(rect.v_lo);
    const double g0 = w.seller.cdf(rect.c_lo);
    const double width = rect.v_hi - rect.v_lo;
    double v_prev = rect.v_lo;
    double c_prev = rect.c_lo;
    double f_prev = f0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double v_k = k == n ? rect.v_hi : rect.v_lo + width * static_cast<double>(k) / static_cast<double>(n);
      const double f_k = w.buyer.cdf(v_k);
      const double c_k = k == n ? rect.c_hi
                                : clamp_to(w.seller.quantile(clamp_to(g0 + (f_k - f0), 0.0, 1.0)), rect.c_lo, rect.c_hi);
      out.cells.push_back({v_prev, v_k, c_prev, std::max(c_prev, c_k), f_k - f_prev});
      v_prev = v_k;
      c_prev = std::max(c_prev, c_k);
      f_prev = f_k;
    }
  }

  const std::size_t m = out.cells.size();
  out.coupling.mass = Matrix(m, m);
  out.coupling.row_points.resize(m);
  out.coupling.col_points.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& cell = out.cells[k];
    out.coupling.mass(k, k) = cell.mass;
    out.coupling.row_points[k] = w.buyer.conditional_mean(cell.v_lo, cell.v_hi);
    out.coupling.col_points[k] = w.seller.conditional_mean(cell.c_lo, cell.c_hi);
  }
  return out;
}

GridCoupling redistribute(const GridCoupling& h, const RedistributionRects& r) {
  const std::size_t rows = h.mass.rows();
  const std::size_t cols = h.mass.cols();
  auto in_bounds = [](const IndexRange& range, std::size_t limit) { return range.begin <= range.end && range.end <= limit; };
  if (!in_bounds(r.rows_a, rows) || !in_bounds(r.rows_d, rows) || !in_bounds(r.cols_a, cols) ||
      !in_bounds(r.cols_d, cols)) {
    throw PreconditionError("redistribution rectangle outside the coupling");
  }
  auto overlap = [](const IndexRange& a, const IndexRange& b) { return a.begin < b.end && b.begin < a.end; };
  if (overlap(r.rows_a, r.rows_d) || overlap(r.cols_a, r.cols_d)) {
    throw PreconditionError("rectangles A and D must not share rows or columns");
  }

  auto block_mass = [&](const IndexRange& rs, const IndexRange& cs) {
    double m = 0.0;
    for (std::size_t i = rs.begin; i < rs.end; ++i) {
      for (std::size_t j = cs.begin; j < cs.end; ++j) m += h.mass(i, j);
    }
    return m;
  };
  const double mass_a = block_mass(r.rows_a, r.cols_a);
  const double mass_d = block_mass(r.rows_d, r.cols_d);
  if (std::abs(mass_a - mass_d) > kMassTolerance) {
    throw PreconditionError("rectangles A and D must carry equal mass");
  }
  if (mass_a <= 0.0 && mass_d <= 0.0) return h;

  // Row sums over both column bands and column sums over both row bands.
  auto row_sum = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = r.cols_a.begin; j < r.cols_a.end; ++j) s += h.mass(i, j);
    for (std::size_t j = r.cols_d.begin; j < r.cols_d.end; ++j) s += h.mass(i, j);
    return s;
  };
  auto col_sum = [&](std::size_t j) {
    double s = 0.0;
    for (std::size_t i = r.rows_a.begin; i < r.rows_a.end; ++i) s += h.mass(i, j);
    for (std::size_t i = r.rows_d.begin; i < r.rows_d.end; ++i) s += h.mass(i, j);
    return s;
  };

  std::vector<double> rows_d_sum;
  std::vector<double> rows_a_sum;
  std::vector<double> cols_a_sum;
  std::vector<double> cols_d_sum;
  for (std::size_t i = r.rows_d.begin; i < r.rows_d.end; ++i) rows_d_sum.push_back(row_sum(i));
  for (std::size_t i = r.rows_a.begin; i < r.rows_a.end; ++i) rows_a_sum.push_back(row_sum(i));
  for (std::size_t j = r.cols_a.begin; j < r.cols_a.end; ++j) cols_a_sum.push_back(col_sum(j));
  for (std::size_t j = r.cols_d.begin; j < r.cols_d.end; ++j) cols_d_sum.push_back(col_sum(j));

  // B = rows_d x cols_a inherits D's row profile and A's column profile.
  const double mass_ba = block_mass(r.rows_d, r.cols_a) + mass_a;
  const double mass_cd = block_mass(r.rows_a, r.cols_d) + mass_d;

  GridCoupling out = h;
  for (std::size_t i = r.rows_a.begin; i < r.rows_a.end; ++i) {
    for (std::size_t j = r.cols_a.begin; j < r.cols_a.end; ++j) out.mass(i, j) = 0.0;
  }
  for (std::size_t i = r.rows_d.begin; i < r.rows_d.end; ++i) {
    for (std::size_t j = r.cols_d.begin; j < r.cols_d.end; ++j) out.mass(i, j) = 0.0;
  }
  for (std::size_t a = 0; a < rows_d_sum.size(); ++a) {
    for (std::size_t b = 0; b < cols_a_sum.size(); ++b) {
      out.mass(r.rows_d.begin + a, r.cols_a.begin + b) = rows_d_sum[a] * cols_a_sum[b] / mass_ba;
    }
  }
  for (std::size_t a = 0; a < rows_a_sum.size(); ++a) {
    for (std::size_t b = 0; b < cols_d_sum.size(); ++b) {
      out.mass(r.rows_a.begin + a, r.cols_d.begin + b) = rows_a_sum[a] * cols_d_sum[b] / mass_cd;
    }
  }
  return out;
}

}  // namespace robust_trade
