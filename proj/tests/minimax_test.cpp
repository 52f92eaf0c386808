#include <gtest/gtest.h>

#include <random>

#include "robust_trade/errors.hpp"
#include "robust_trade/minimax.hpp"
#include "test_support.hpp"

using namespace robust_trade;

namespace {

const auto F = MarginalDistribution::uniform(0.0, 1.0);
const auto G = MarginalDistribution::uniform(0.0, 0.5);
const std::vector<std::size_t> kSchedule{1, 2, 4, 8, 16};

TEST(BestPrice, DiagonalCouplingHasNoGains) {
  const GridMarginal m{{0.2, 0.3, 0.5}, {0.1, 0.4, 0.8}};
  const auto h = comonotone_coupling(m, m);
  for (double p : {0.05, 0.3, 0.6, 0.9}) EXPECT_EQ(posted_price_gains(h, p), 0.0);
  EXPECT_EQ(best_price_for_coupling(h).value, 0.0);
}

TEST(BestPrice, SingleAtom) {
  GridCoupling h{Matrix(1, 1, 1.0), {1.0}, {0.0}};
  const auto r = best_price_for_coupling(h);
  EXPECT_DOUBLE_EQ(r.value, 1.0);
  EXPECT_GT(r.price, 0.0);
  EXPECT_LT(r.price, 1.0);
}

TEST(BestPrice, RefinedAnchorAtLevelEight) {
  const auto w = worst_distribution(F, G, 0.5);
  const auto rc = refine(w, 8);
  const auto grid = best_price_for_coupling(rc.coupling, {0.5});
  EXPECT_NEAR(grid.value, 0.1875, 1e-9);
  EXPECT_NEAR(grid.price, 0.5, 1.0 / 8);
  const auto dens = best_price_for_refinement(w, rc, {0.5});
  EXPECT_NEAR(dens.value, 0.1875, 1e-9);
  EXPECT_NEAR(dens.price, 0.5, 1e-9);
}

TEST(RefinedGains, AtPriceEqualsRobustEfficiency) {
  std::mt19937 rng(31);
  for (int t = 0; t < 10; ++t) {
    const auto pair = fixtures::random_pair(rng);
    const auto opt = optimize(pair.buyer, pair.seller);
    const auto w = worst_distribution(pair.buyer, pair.seller, opt.price);
    for (std::size_t n : {1, 5}) EXPECT_NEAR(refined_gains(w, refine(w, n), opt.price), opt.value, 1e-12);
  }
}

TEST(Maxmin, Anchor) {
  const auto r = maxmin(F, G, 400);
  EXPECT_NEAR(r.value, 0.1875, 1e-6);
  EXPECT_NEAR(r.oracle_value, 0.1875, 5e-3);
}

TEST(Maxmin, IdenticalMarginals) {
  const auto r = maxmin(F, F, 100);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_NEAR(r.oracle_value, 0.0, 1e-12);
}

TEST(Maxmin, SeparatedSupports) {
  const auto r = maxmin(MarginalDistribution::uniform(1, 2), MarginalDistribution::uniform(0, 1), 200);
  EXPECT_NEAR(r.value, 1.0, 1e-9);
}

TEST(Maxmin, CrossCheckFailureIsReported) {
  EXPECT_THROW(maxmin(F, G, 3, 1e-12), NumericalCheckError);
}

TEST(Minmax, AnchorLevels) {
  const auto rep = minimax(F, G, 400, kSchedule);
  ASSERT_EQ(rep.levels.size(), kSchedule.size());
  for (const auto& l : rep.levels) {
    EXPECT_GE(l.value, 0.1875 - 1e-9);
    EXPECT_NEAR(l.value, 0.1875, 5e-3);
  }
  EXPECT_GE(rep.gap, -1e-9);
  EXPECT_LE(rep.gap, 1e-2);
}

TEST(Minmax, IdenticalMarginalsAreZeroEverywhere) {
  const auto rep = minimax(F, F, 100, kSchedule);
  for (const auto& l : rep.levels) EXPECT_NEAR(l.value, 0.0, 1e-12);
  EXPECT_NEAR(rep.maxmin_value, 0.0, 1e-12);
  EXPECT_NEAR(rep.minmax_value, 0.0, 1e-12);
}

TEST(Minmax, WeakDualityOnRandomPairs) {
  std::mt19937 rng(41);
  for (int t = 0; t < 8; ++t) {
    const auto pair = fixtures::random_pair(rng);
    const auto rep = minimax(pair.buyer, pair.seller, 200, kSchedule);
    for (const auto& l : rep.levels) EXPECT_GE(l.value, rep.maxmin_value - 1e-9);
    EXPECT_GE(rep.gap, -1e-9);
  }
}

// Independent mass in each diagonal cell of side 1/n: best response at a cell
// midpoint, gains n * (1/n)^3 / 8.
TEST(Minmax, IdenticalMarginalsProductLift) {
  const auto levels = minmax_levels(F, F, 0.0, kSchedule, CellLift::kProduct);
  for (const auto& l : levels) {
    const double n = static_cast<double>(l.n);
    EXPECT_NEAR(l.value, 1.0 / (8.0 * n * n), 1e-12) << l.n;
  }
}

TEST(Minmax, AnchorProductLiftMatchesComonotone) {
  // uniform marginals: both lifts give back the closed form at p*
  for (std::size_t n : {1, 4, 16}) {
    const auto w = worst_distribution(F, G, 0.5);
    const auto rc = refine(w, n);
    for (double p : {0.2, 0.5, 0.7}) {
      EXPECT_NEAR(refined_gains(w, rc, p), p <= 0.5 ? 0.75 * p * p : 0.25 - 0.25 * p * p, 1e-12);
    }
    EXPECT_NEAR(refined_gains(w, rc, 0.5, CellLift::kProduct), 0.1875, 1e-12);
  }
}

TEST(Minmax, RejectsEmptySchedule) { EXPECT_THROW(minimax(F, G, 100, {}), ValidationError); }

}  // namespace
