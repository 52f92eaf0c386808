#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace robust_trade {

struct Knot {
  double point;
  double cumulative;

  friend bool operator==(const Knot&, const Knot&) = default;
};

/// Masses and representative points of a marginal restricted to grid cells.
struct GridMarginal {
  std::vector<double> masses;
  std::vector<double> points;

  std::size_t size() const { return masses.size(); }
};

/// Continuous distribution on a bounded interval with a piecewise-linear CDF
/// (piecewise-constant density). Immutable after construction.
///
/// Knots must have strictly increasing points, nondecreasing cumulative
/// values, cumulative 0 at the first knot and 1 at the last. The support is
/// [first point, last point].
class MarginalDistribution {
 public:
  static MarginalDistribution uniform(double lo, double hi);

  /// Throws ValidationError naming the offending knot index.
  static MarginalDistribution from_knots(std::vector<Knot> knots);

  double support_lo() const { return knots_.front().point; }
  double support_hi() const { return knots_.back().point; }
  std::span<const Knot> knots() const { return knots_; }

  /// Clamped to [0, 1] outside the support.
  double cdf(double x) const;

  /// Right-continuous density; zero outside the support.
  double density(double x) const;

  /// Generalized inverse inf{x : cdf(x) >= u}. On a flat stretch this is the
  /// left endpoint. Throws std::domain_error for u outside [0, 1].
  double quantile(double u) const;

  /// Integral of x * density(x) over [a, b], exact per linear CDF segment.
  /// Throws std::domain_error if a > b.
  double partial_expectation(double a, double b) const;

  /// Probability mass of [a, b].
  double mass(double a, double b) const { return cdf(b) - cdf(a); }

  double mean() const { return partial_expectation(support_lo(), support_hi()); }

  /// Mean restricted to [a, b]; the interval midpoint when it carries no mass.
  double conditional_mean(double a, double b) const;

  /// n equal-width cells over the support with their masses and midpoints.
  /// Throws std::domain_error if n == 0.
  GridMarginal discretize(std::size_t n) const;

  friend bool operator==(const MarginalDistribution&, const MarginalDistribution&) = default;

 private:
  explicit MarginalDistribution(std::vector<Knot> knots) : knots_(std::move(knots)) {}

  // Index i of the segment [knots_[i], knots_[i+1]] containing x.
  std::size_t segment_of(double x) const;

  std::vector<Knot> knots_;
};

}  // namespace robust_trade
