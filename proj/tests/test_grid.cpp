#include <gtest/gtest.h>

#include <cmath>

#include "cdflow/grid.hpp"

using namespace cdflow;

TEST(Grid, UniformIsSymmetricWithZeroMidpoint) {
  const auto g = Grid::uniform(3.0, 61);
  ASSERT_EQ(g->size(), 61u);
  EXPECT_DOUBLE_EQ(g->node(0), -3.0);
  EXPECT_DOUBLE_EQ(g->node(60), 3.0);
  EXPECT_EQ(g->node(30), 0.0);
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_NEAR(g->node(i), -g->node(60 - i), 1e-14);
}

TEST(Grid, SinhIsSymmetricAndReachesR) {
  const auto g = Grid::sinh(1e6, 801);
  EXPECT_NEAR(g->node(800), 1e6, 1e-6);
  EXPECT_EQ(g->node(400), 0.0);
  for (std::size_t i = 1; i < g->size(); ++i) EXPECT_GT(g->node(i), g->node(i - 1));
}

TEST(Grid, RejectsTooFewNodes) { EXPECT_THROW(Grid::uniform(1.0, 5), Error); }

TEST(Grid, WeightsIntegrateGaussian) {
  const double exact = std::sqrt(std::acos(-1.0));
  for (auto g : {Grid::uniform(10.0, 401), Grid::sinh(10.0, 401)}) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) acc += g->weights()[i] * std::exp(-g->node(i) * g->node(i));
    EXPECT_NEAR(acc, exact, 1e-12);
  }
}

namespace {

double d1_error(const GridPtr& g) {
  const auto f = sample(g, [](double x) { return std::sin(x); });
  const auto d = fd::d1(*g, f.values);
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) worst = std::max(worst, std::abs(d[i] - std::cos(g->node(i))));
  return worst;
}

double d2_error(const GridPtr& g) {
  const auto f = sample(g, [](double x) { return std::sin(x); });
  const auto d = fd::d2(*g, f.values);
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) worst = std::max(worst, std::abs(d[i] + std::sin(g->node(i))));
  return worst;
}

}  // namespace

TEST(FiniteDifferences, ConvergeAtLeastSecondOrder) {
  for (auto make : {+[](std::size_t n) { return Grid::uniform(3.0, n); },
                    +[](std::size_t n) { return Grid::sinh(3.0, n); }}) {
    const double c1 = d1_error(make(101)), f1 = d1_error(make(201));
    const double c2 = d2_error(make(101)), f2 = d2_error(make(201));
    EXPECT_GE(std::log2(c1 / f1), 1.8);
    EXPECT_GE(std::log2(c2 / f2), 1.8);
  }
}

TEST(FiniteDifferences, ExactOnCubics) {
  const auto g = Grid::uniform(2.0, 41);
  const auto f = sample(g, [](double x) { return x * x * x - x; });
  const auto d = fd::d1(*g, f.values);
  const auto dd = fd::d2(*g, f.values);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->node(i);
    EXPECT_NEAR(d[i], 3 * x * x - 1, 1e-10);
    EXPECT_NEAR(dd[i], 6 * x, 1e-9);
  }
}

TEST(GridFunction, ShapeMismatchDetected) {
  const auto a = Grid::uniform(2.0, 41), b = Grid::uniform(2.0, 43);
  const auto f = sample(a, [](double x) { return x; });
  EXPECT_THROW(check_same_grid(f, *b), Error);
  try {
    check_same_grid(f, *b);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}
