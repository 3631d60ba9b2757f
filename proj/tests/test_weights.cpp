#include <gtest/gtest.h>

#include <cmath>

#include "cdflow/weights.hpp"
#include "oracles.hpp"

using namespace cdflow;

namespace {

const double pi = std::acos(-1.0);

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(WeightFunction, FamiliesAndConvexity) {
  const auto q = WeightFunction::quadratic();
  EXPECT_EQ(q.degree(), 2);
  EXPECT_DOUBLE_EQ(q.convexity(), 2.0);
  EXPECT_DOUBLE_EQ(q.eval(2.0), 5.0);
  EXPECT_DOUBLE_EQ(q.d1(2.0), 4.0);
  EXPECT_DOUBLE_EQ(q.d2(2.0), 2.0);
  const auto k = WeightFunction::quartic();
  EXPECT_EQ(k.degree(), 4);
  EXPECT_DOUBLE_EQ(k.convexity(), 2.0);
  EXPECT_DOUBLE_EQ(k.d2(1.0), 14.0);
}

TEST(WeightFunction, DerivativesMatchCentralDifferences) {
  const auto w = WeightFunction::even_polynomial({2.0, 0.5, 0.25, 0.1});
  for (double x : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
    const double h = 1e-4;
    EXPECT_NEAR(w.d1(x), (w.eval(x + h) - w.eval(x - h)) / (2 * h), 1e-6 * (1 + std::abs(w.d1(x))));
    EXPECT_NEAR(w.d2(x), (w.d1(x + h) - w.d1(x - h)) / (2 * h), 1e-6 * (1 + std::abs(w.d2(x))));
  }
}

TEST(WeightFunction, Rejections) {
  EXPECT_EQ(kind_of([] { WeightFunction::even_polynomial({1.0, 0.0, 1.0}); }), ErrorKind::NonConvex);
  EXPECT_EQ(kind_of([] { WeightFunction::even_polynomial({1.0, -1.0}); }), ErrorKind::InvalidWeight);
  EXPECT_EQ(kind_of([] { WeightFunction::even_polynomial({-1.0, 1.0}); }), ErrorKind::InvalidWeight);
  EXPECT_EQ(kind_of([] { WeightFunction::even_polynomial({1.0}); }), ErrorKind::NonConvex);
  EXPECT_EQ(kind_of([] { WeightFunction::even_polynomial({1.0, 1.0}, 3.0); }), ErrorKind::NonConvex);
  EXPECT_NO_THROW(WeightFunction::even_polynomial({1.0, 1.0}, 2.0));
}

TEST(Measure, NormalizationMatchesExactZ) {
  const auto m = build_measure(WeightFunction::quadratic(), 3.0, 1e-10);
  const double oracle = 1.0 / oracle::integrate_line([](double x) { return std::pow(1 + x * x, -3.0); });
  EXPECT_NEAR(oracle, 8.0 / (3.0 * pi), 1e-11);
  EXPECT_NEAR(m.Z, 8.0 / (3.0 * pi), 1e-9);
  EXPECT_LT(m.tail_bound, 1e-10);
}

TEST(Measure, MassSymmetryAndTail) {
  for (const auto& w : {WeightFunction::quadratic(), WeightFunction::quartic()})
    for (double beta : {1.0, 2.0, 3.0, 10.0}) {
      const auto m = build_measure(w, beta);
      EXPECT_NEAR(moment(m, [](double) { return 1.0; }), 1.0, 1e-10);
      EXPECT_NEAR(moment(m, [](double x) { return x; }), 0.0, 1e-10);
      EXPECT_LT(m.tail_bound, 1e-12);
    }
}

TEST(Measure, AutomaticGridKind) {
  EXPECT_EQ(build_measure(WeightFunction::quadratic(), 3.0).grid->kind(), GridKind::uniform);
  EXPECT_DOUBLE_EQ(build_measure(WeightFunction::quadratic(), 10.0).R, 10.0);
  EXPECT_EQ(build_measure(WeightFunction::quadratic(), 1.0).grid->kind(), GridKind::sinh);
}

TEST(Measure, Moments) {
  MeasureOptions opt;
  opt.half_width = 2000.0;
  const auto m = build_measure(WeightFunction::quadratic(), 3.0, opt);
  EXPECT_NEAR(moment(m, [](double) { return 1.0; }), 1.0, 1e-12);
  EXPECT_NEAR(moment(m, [](double x) { return x * x; }), 1.0 / 3.0, 1e-8);
  EXPECT_NEAR(moment(m, [](double x) { return 1 + x * x; }), 4.0 / 3.0, 1e-8);
  const auto g = sample(m.grid, [](double x) { return x * x; });
  EXPECT_DOUBLE_EQ(moment(m, g), moment(m, [](double x) { return x * x; }));
}

TEST(Measure, MomentShapeMismatch) {
  const auto m = build_measure(WeightFunction::quadratic(), 3.0);
  const auto g = sample(Grid::uniform(1.0, 11), [](double) { return 1.0; });
  EXPECT_EQ(kind_of([&] { moment(m, g); }), ErrorKind::ShapeMismatch);
}

TEST(Measure, Errors) {
  EXPECT_EQ(kind_of([] { build_measure(WeightFunction::quadratic(), 0.4, 1e-10); }), ErrorKind::NonIntegrable);
  EXPECT_EQ(kind_of([] { build_measure(WeightFunction::quadratic(), 0.5, 1e-10); }), ErrorKind::NonIntegrable);
  EXPECT_EQ(kind_of([] { build_measure(WeightFunction::quadratic(), 0.52, 1e-12); }), ErrorKind::TailUnreachable);
  EXPECT_EQ(kind_of([] { build_measure(WeightFunction::quadratic(), 3.0, 0.0); }), ErrorKind::InvalidArgument);
}

TEST(Measure, RefinementWithinQuadratureEstimate) {
  MeasureOptions coarse, fine;
  coarse.nodes = 2001;
  fine.nodes = 4001;
  for (double beta : {1.0, 3.0}) {
    const auto a = build_measure(WeightFunction::quartic(), beta, coarse);
    const auto b = build_measure(WeightFunction::quartic(), beta, fine);
    EXPECT_LE(std::abs(a.Z - b.Z) / a.Z, 4.0 * a.quadrature_error);
  }
}
