#include <gtest/gtest.h>

#include <random>

#include "robust_trade/errors.hpp"
#include "robust_trade/transport.hpp"
#include "test_support.hpp"

using namespace robust_trade;

namespace {

TEST(Transport, SingleCell) {
  const std::vector<double> s{1.0}, d{1.0}, c{3.0};
  const auto r = solve_transport(s, d, c);
  EXPECT_DOUBLE_EQ(r.objective, 3.0);
  EXPECT_DOUBLE_EQ(r.flow[0], 1.0);
}

TEST(Transport, ClassicTextbookInstance) {
  // 3 plants x 4 markets
  const std::vector<double> s{30, 25, 45}, d{20, 30, 30, 20};
  const std::vector<double> c{8, 6, 10, 9, 9, 12, 13, 7, 14, 9, 16, 5};
  const auto r = solve_transport(s, d, c);
  EXPECT_NEAR(r.objective, fixtures::enumerate_transport_minimum(s, d, c), 1e-9);
}

TEST(Transport, FlowIsFeasible) {
  std::mt19937 rng(5);
  const auto b = fixtures::random_grid_marginal(rng, 30, 0, 1);
  const auto a = fixtures::random_grid_marginal(rng, 40, 0, 1);
  std::vector<double> c(30 * 40);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& x : c) x = u(rng);
  const auto r = solve_transport(b.masses, a.masses, c);
  double obj = 0.0;
  for (std::size_t i = 0; i < 30; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < 40; ++j) {
      EXPECT_GE(r.flow[i * 40 + j], 0.0);
      row += r.flow[i * 40 + j];
      obj += r.flow[i * 40 + j] * c[i * 40 + j];
    }
    EXPECT_NEAR(row, b.masses[i], 1e-12);
  }
  for (std::size_t j = 0; j < 40; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < 30; ++i) col += r.flow[i * 40 + j];
    EXPECT_NEAR(col, a.masses[j], 1e-12);
  }
  EXPECT_NEAR(obj, r.objective, 1e-12);
}

TEST(Transport, MatchesVertexEnumerationOnSmallInstances) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 1 + rng() % 4;
    const std::size_t n = 1 + rng() % 4;
    const auto b = fixtures::random_grid_marginal(rng, m, 0, 1);
    const auto a = fixtures::random_grid_marginal(rng, n, 0, 1);
    std::vector<double> c(m * n);
    for (auto& x : c) x = t % 3 == 0 ? std::round(u(rng)) : u(rng);  // integer costs force ties
    const auto r = solve_transport(b.masses, a.masses, c);
    EXPECT_NEAR(r.objective, fixtures::enumerate_transport_minimum(b.masses, a.masses, c), 1e-12) << "instance " << t;
  }
}

TEST(Transport, DegenerateEqualMasses) {
  // every basic solution is degenerate
  const std::vector<double> s(6, 1.0 / 6), d(6, 1.0 / 6);
  std::vector<double> c(36);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) c[i * 6 + j] = static_cast<double>((i * 7 + j * 3) % 5);
  }
  const auto r = solve_transport(s, d, c);
  EXPECT_NEAR(r.objective, 0.0, 1e-12);
}

TEST(Transport, RejectsBadInput) {
  const std::vector<double> s{0.5, 0.5}, d{1.0}, c{1, 1};
  EXPECT_THROW(solve_transport(std::vector<double>{0.5, 0.6}, d, c), ValidationError);
  EXPECT_THROW(solve_transport(std::vector<double>{1.5, -0.5}, d, c), ValidationError);
  EXPECT_THROW(solve_transport(s, d, std::vector<double>{1.0}), ValidationError);
  EXPECT_THROW(solve_transport(s, d, std::vector<double>{1.0, std::nan("")}), ValidationError);
}

TEST(Transport, LargeInstanceFinishes) {
  std::mt19937 rng(23);
  const auto b = fixtures::random_grid_marginal(rng, 400, 0, 1);
  const auto a = fixtures::random_grid_marginal(rng, 400, 0, 1);
  std::vector<double> c(400 * 400);
  for (std::size_t i = 0; i < 400; ++i) {
    for (std::size_t j = 0; j < 400; ++j) c[i * 400 + j] = (b.points[i] - a.points[j]) * (b.points[i] > 0.5 && a.points[j] < 0.5);
  }
  const auto r = solve_transport(b.masses, a.masses, c);
  EXPECT_GT(r.pivots, 0u);
}

}  // namespace
