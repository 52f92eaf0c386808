#include "robust_trade/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "robust_trade/errors.hpp"

namespace robust_trade {
namespace {

constexpr double kEndpointTolerance = 1e-12;

[[noreturn]] void bad_knot(std::size_t index, const std::string& what) {
  throw ValidationError("knot " + std::to_string(index) + ": " + what);
}

}  // namespace

MarginalDistribution MarginalDistribution::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ValidationError("uniform marginal needs finite lo < hi");
  }
  return MarginalDistribution({{lo, 0.0}, {hi, 1.0}});
}

MarginalDistribution MarginalDistribution::from_knots(std::vector<Knot> knots) {
  if (knots.size() < 2) {
    throw ValidationError("marginal needs at least two knots, got " + std::to_string(knots.size()));
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto& k = knots[i];
    if (!std::isfinite(k.point) || !std::isfinite(k.cumulative)) bad_knot(i, "non-finite value");
    if (k.cumulative < 0.0 || k.cumulative > 1.0 + kEndpointTolerance) {
      bad_knot(i, "cumulative " + std::to_string(k.cumulative) + " outside [0, 1]");
    }
    if (i > 0) {
      if (!(k.point > knots[i - 1].point)) bad_knot(i, "point must be strictly greater than the previous point");
      if (k.cumulative < knots[i - 1].cumulative) bad_knot(i, "cumulative must be nondecreasing");
    }
  }
  if (std::abs(knots.front().cumulative) > kEndpointTolerance) bad_knot(0, "cumulative at support_lo must be 0");
  if (std::abs(knots.back().cumulative - 1.0) > kEndpointTolerance) {
    bad_knot(knots.size() - 1, "cumulative at support_hi must be 1");
  }
  knots.front().cumulative = 0.0;
  knots.back().cumulative = 1.0;
  return MarginalDistribution(std::move(knots));
}

std::size_t MarginalDistribution::segment_of(double x) const {
  // First knot strictly greater than x, minus one, clamped to a valid segment.
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                             [](double value, const Knot& k) { return value < k.point; });
  auto idx = static_cast<std::size_t>(it - knots_.begin());
  if (idx == 0) return 0;
  return std::min(idx - 1, knots_.size() - 2);
}

double MarginalDistribution::cdf(double x) const {
  if (x <= support_lo()) return 0.0;
  if (x >= support_hi()) return 1.0;
  const auto i = segment_of(x);
  const auto& a = knots_[i];
  const auto& b = knots_[i + 1];
  const double t = (x - a.point) / (b.point - a.point);
  return a.cumulative + t * (b.cumulative - a.cumulative);
}

double MarginalDistribution::density(double x) const {
  if (x < support_lo() || x >= support_hi()) return 0.0;
  const auto i = segment_of(x);
  return (knots_[i + 1].cumulative - knots_[i].cumulative) / (knots_[i + 1].point - knots_[i].point);
}

double MarginalDistribution::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("quantile level outside [0, 1]");
  if (u == 0.0) return support_lo();
  auto it = std::lower_bound(knots_.begin(), knots_.end(), u,
                             [](const Knot& k, double value) { return k.cumulative < value; });
  if (it == knots_.end()) return support_hi();
  if (it == knots_.begin()) return it->point;
  const auto& b = *it;
  const auto& a = *(it - 1);
  // a.cumulative < u <= b.cumulative, so the segment is not flat.
  const double t = (u - a.cumulative) / (b.cumulative - a.cumulative);
  return std::min(b.point, a.point + t * (b.point - a.point));
}

double MarginalDistribution::partial_expectation(double a, double b) const {
  if (a > b) throw std::domain_error("partial_expectation needs a <= b");
  const double lo = std::max(a, support_lo());
  const double hi = std::min(b, support_hi());
  if (!(lo < hi)) return 0.0;
  double total = 0.0;
  for (std::size_t i = segment_of(lo); i + 1 < knots_.size(); ++i) {
    const auto& ka = knots_[i];
    const auto& kb = knots_[i + 1];
    if (ka.point >= hi) break;
    const double s = std::max(lo, ka.point);
    const double e = std::min(hi, kb.point);
    if (e <= s) continue;
    const double dens = (kb.cumulative - ka.cumulative) / (kb.point - ka.point);
    total += dens * 0.5 * (e - s) * (e + s);
  }
  return total;
}

double MarginalDistribution::conditional_mean(double a, double b) const {
  const double m = mass(a, b);
  if (m <= 0.0) return 0.5 * (a + b);
  return partial_expectation(a, b) / m;
}

GridMarginal MarginalDistribution::discretize(std::size_t n) const {
  if (n == 0) throw std::domain_error("discretize needs at least one cell");
  GridMarginal out;
  out.masses.resize(n);
  out.points.resize(n);
  const double lo = support_lo();
  const double width = support_hi() - lo;
  double left = lo;
  double left_cdf = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double right = (i + 1 == n) ? support_hi() : lo + width * static_cast<double>(i + 1) / static_cast<double>(n);
    const double right_cdf = (i + 1 == n) ? 1.0 : cdf(right);
    out.masses[i] = right_cdf - left_cdf;
    out.points[i] = 0.5 * (left + right);
    left = right;
    left_cdf = right_cdf;
  }
  return out;
}

}  // namespace robust_trade
