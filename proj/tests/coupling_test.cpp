#include <gtest/gtest.h>

#include <random>

#include "robust_trade/coupling.hpp"
#include "robust_trade/errors.hpp"
#include "robust_trade/posted_price.hpp"
#include "test_support.hpp"

using namespace robust_trade;

namespace {

GridAllocation ones(std::size_t m, std::size_t n) { return {Matrix(m, n, 1.0)}; }

const GridMarginal kTwo{{0.5, 0.5}, {0.25, 0.75}};

TEST(Oracle, TwoByTwoPostedPriceMinimum) {
  const auto q = posted_price_allocation(kTwo.points, kTwo.points, {0.5});
  EXPECT_EQ(q.q(1, 0), 1.0);
  EXPECT_EQ(q.q(0, 0) + q.q(0, 1) + q.q(1, 1), 0.0);
  const auto r = min_expected_gains(kTwo, kTwo, q);
  EXPECT_NEAR(r.value, 0.0, 1e-15);
  EXPECT_NEAR(r.coupling.mass(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(r.coupling.mass(1, 1), 0.5, 1e-15);
}

TEST(Oracle, TwoByTwoPostedPriceMaximum) {
  const auto q = posted_price_allocation(kTwo.points, kTwo.points, {0.5});
  const auto r = max_expected_gains(kTwo, kTwo, q);
  EXPECT_NEAR(r.value, 0.25, 1e-15);
  EXPECT_NEAR(r.coupling.mass(1, 0), 0.5, 1e-15);
}

TEST(Oracle, SingleAtoms) {
  const GridMarginal b{{1.0}, {1.0}}, s{{1.0}, {0.0}};
  EXPECT_DOUBLE_EQ(min_expected_gains(b, s, ones(1, 1)).value, 1.0);
  EXPECT_DOUBLE_EQ(max_expected_gains(b, s, ones(1, 1)).value, 1.0);
}

TEST(Oracle, ZeroAllocation) {
  std::mt19937 rng(2);
  const auto b = fixtures::random_grid_marginal(rng, 7, 0, 1);
  const auto s = fixtures::random_grid_marginal(rng, 5, 0, 1);
  EXPECT_EQ(max_expected_gains(b, s, {Matrix(7, 5)}).value, 0.0);
}

TEST(Oracle, UniformAnchorAtGrid400) {
  const auto b = MarginalDistribution::uniform(0, 1).discretize(400);
  const auto s = MarginalDistribution::uniform(0, 0.5).discretize(400);
  const auto r = min_expected_gains(b, s, posted_price_allocation(b.points, s.points, {0.5}));
  EXPECT_NEAR(r.value, 0.1875, 5e-3);
  EXPECT_NO_THROW(validate_coupling(r.coupling, b, s));
}

TEST(Oracle, InfeasibleMarginalsRejected) {
  const GridMarginal b{{0.5, 0.6}, {0, 1}};
  EXPECT_THROW(min_expected_gains(b, kTwo, ones(2, 2)), ValidationError);
  EXPECT_THROW(min_expected_gains(kTwo, kTwo, ones(3, 2)), ValidationError);
}

TEST(Oracle, ZeroMassRowsArePruned) {
  const GridMarginal b{{0.0, 1.0, 0.0}, {0.1, 0.6, 0.9}};
  const GridMarginal s{{0.5, 0.0, 0.5}, {0.1, 0.3, 0.7}};
  const auto r = min_expected_gains(b, s, ones(3, 3));
  EXPECT_EQ(r.coupling.mass.rows(), 3u);
  EXPECT_EQ(r.coupling.mass.cols(), 3u);
  EXPECT_NEAR(r.value, 0.5 * 0.5 + 0.5 * -0.1, 1e-15);
}

TEST(Comonotone, IdenticalMarginalsGiveDiagonal) {
  const auto h = comonotone_coupling(kTwo, kTwo);
  EXPECT_EQ(h.mass(0, 0), 0.5);
  EXPECT_EQ(h.mass(1, 1), 0.5);
  EXPECT_EQ(h.mass(0, 1), 0.0);
  EXPECT_EQ(h.mass(1, 0), 0.0);
}

TEST(Comonotone, NorthWestCorner) {
  const GridMarginal s{{0.25, 0.75}, {0.25, 0.75}};
  const auto h = comonotone_coupling(kTwo, s);
  EXPECT_DOUBLE_EQ(h.mass(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(h.mass(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(h.mass(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(h.mass(1, 1), 0.5);
}

TEST(Comonotone, ReproducesMarginals) {
  std::mt19937 rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto b = fixtures::random_grid_marginal(rng, 1 + rng() % 30, 0, 1);
    const auto s = fixtures::random_grid_marginal(rng, 1 + rng() % 30, 0, 1);
    EXPECT_LE(fixtures::max_marginal_error(comonotone_coupling(b, s), b, s), 1e-12);
  }
}

TEST(GridCoupling, ValidationCatchesBadCouplings) {
  GridCoupling h = comonotone_coupling(kTwo, kTwo);
  EXPECT_NO_THROW(validate_coupling(h, kTwo, kTwo));
  h.mass(0, 0) = -0.1;
  h.mass(0, 1) = 0.6;
  EXPECT_THROW(validate_coupling(h, kTwo, kTwo), ValidationError);
  h = comonotone_coupling(kTwo, kTwo);
  h.mass(0, 0) = 0.4;
  EXPECT_THROW(validate_coupling(h, kTwo, kTwo), ValidationError);
}

TEST(GridCoupling, ExpectedGains) {
  const auto h = comonotone_coupling(kTwo, kTwo);
  EXPECT_DOUBLE_EQ(expected_gains(h, ones(2, 2)), 0.0);
  GridCoupling anti{Matrix(2, 2), kTwo.points, kTwo.points};
  anti.mass(1, 0) = 0.5;
  anti.mass(0, 1) = 0.5;
  EXPECT_DOUBLE_EQ(expected_gains(anti, {Matrix(2, 2, 1.0)}), 0.0);
  EXPECT_DOUBLE_EQ(expected_gains(anti, posted_price_allocation(kTwo.points, kTwo.points, {0.5})), 0.25);
}

}  // namespace
