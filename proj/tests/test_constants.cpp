#include <gtest/gtest.h>

#include <cmath>

#include "cdflow/constants.hpp"

using namespace cdflow;

namespace {

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

TEST(Constants, CPhi) {
  EXPECT_NEAR(c_phi(1, 3), 49.0 / 16.0, 1e-12);
  EXPECT_NEAR(c_phi(0, 2), 3.0, 1e-12);
  EXPECT_EQ(kind_of([] { c_phi(1, 2); }), ErrorKind::Degenerate);
  EXPECT_EQ(kind_of([] { c_phi(-1, 1); }), ErrorKind::Degenerate);
  EXPECT_EQ(kind_of([] { c_phi(3, 2); }), ErrorKind::OutOfRange);
}

TEST(Constants, PStarWeighted) {
  EXPECT_NEAR(p_star_weighted(1, 3), 1.0 + 17.0 / 33.0, 1e-12);
  EXPECT_NEAR(p_star_weighted(1, 4), 1.0 + 25.0 / 73.0, 1e-12);
  EXPECT_NEAR(p_star_bgs(1, 4), 4.0 / 3.0, 1e-12);
  EXPECT_LT(p_star_bgs(1, 4), p_star_weighted(1, 4));
  EXPECT_EQ(kind_of([] { p_star_weighted(1, 2); }), ErrorKind::Degenerate);
}

TEST(Constants, PStarWeightedLimits) {
  for (double n : {0.0, 1.0, 3.0}) {
    EXPECT_NEAR(p_star_weighted(n, n + 1 + 1e-9), 2.0, 1e-6);
    double prev = 2.0;
    for (double beta = n + 1.1; beta < n + 200; beta *= 1.3) {
      const double p = p_star_weighted(n, beta);
      EXPECT_LE(p, prev);
      EXPECT_GT(p, 1.0);
      prev = p;
    }
    EXPECT_LT(p_star_weighted(n, 1e8), 1.0 + 1e-6);
  }
}

TEST(Constants, NegativeDimension) {
  EXPECT_NEAR(p_star_negative_dim(-3), 1.0 + 13.0 / 19.0, 1e-12);
  EXPECT_NEAR(p_star_negative_dim(-10), 1.0 + 41.0 / 201.0, 1e-12);
  EXPECT_NEAR(p_star_negative_dim(-2.5), 1.0 + 11.0 / 13.5, 1e-12);
  EXPECT_NEAR(q_star(-3), 6.0 / 13.0, 1e-12);
  EXPECT_NEAR(q_star(-2.5), 2.5 / 11.0, 1e-12);
  EXPECT_EQ(kind_of([] { p_star_negative_dim(-2); }), ErrorKind::OutOfRange);
  EXPECT_EQ(kind_of([] { q_star(-1); }), ErrorKind::OutOfRange);
  for (double n : {-2.5, -3.0, -5.0, -10.0}) {
    const double q = q_star(n);
    EXPECT_NEAR((q + 2) / (q + 1), p_star_negative_dim(n), 1e-12);
  }
}

TEST(Constants, AlphaTheta) {
  const auto a = alpha_theta(1.8, -3);
  EXPECT_NEAR(a.alpha, 0.34375, 1e-12);
  EXPECT_NEAR(a.theta, 0.7734375, 1e-12);
  for (double n : {-10.0, -3.0, 0.5, 1.0, 4.0}) {
    EXPECT_EQ(alpha_theta(2.0, n).alpha, 0.0);
    EXPECT_EQ(alpha_theta(2.0, n).theta, 0.0);
  }
  EXPECT_NEAR(alpha_theta(p_star_negative_dim(-3), -3).alpha, 0.0, 1e-12);
  EXPECT_EQ(kind_of([] { alpha_theta(1.0, -3); }), ErrorKind::Degenerate);
  EXPECT_EQ(kind_of([] { alpha_theta(1.5, -2); }), ErrorKind::Degenerate);
}

TEST(Constants, AlphaSignRange) {
  for (double n : {-2.5, -3.0, -6.0, -20.0}) {
    const double ps = p_star_negative_dim(n);
    for (double p = 1.01; p <= 2.0; p += 0.01) {
      const double a = alpha_theta(p, n).alpha;
      if (p >= ps + 1e-9) {
        EXPECT_GE(a, 0.0) << p << " " << n;
      }
      if (p <= ps - 1e-9) {
        EXPECT_LT(a, 0.0) << p << " " << n;
      }
    }
  }
  for (double n : {1.0, 2.0, 7.0})
    for (double p = 1.01; p <= 2.0; p += 0.01) EXPECT_GE(alpha_theta(p, n).alpha, 0.0);
}

TEST(Constants, Poincare) {
  EXPECT_NEAR(poincare_constant(3, -2), 0.5, 1e-12);
  EXPECT_NEAR(poincare_constant(2 * (3 - 0.5), 2 * (1 - 3)), 0.25, 1e-12);
  EXPECT_NEAR(poincare_constant(5, -4), 0.25, 1e-12);
  EXPECT_EQ(kind_of([] { poincare_constant(1, 0.5); }), ErrorKind::DimensionForbidden);
  EXPECT_EQ(kind_of([] { poincare_constant(0, -2); }), ErrorKind::NonpositiveCurvature);
}

TEST(Constants, CBetaTable) {
  const std::vector<std::pair<double, double>> table = {{0.6, 0.01}, {1.0, 0.25}, {1.49, 0.9801}, {1.5, 1.0},
                                                        {2.0, 2.0},  {3.0, 4.0},  {10.0, 18.0}};
  for (const auto& [b, v] : table) EXPECT_NEAR(c_beta(b), v, 1e-12) << b;
}

TEST(Constants, PhiCondition) {
  EXPECT_TRUE(phi_condition_check(PhiFamily::power, 1, 3, 2.0));
  EXPECT_FALSE(phi_condition_check(PhiFamily::power, 1, 3, 1.4));
  EXPECT_TRUE(phi_condition_check(PhiFamily::power, 1, 3, 1.6));
  EXPECT_FALSE(phi_condition_check(PhiFamily::xlogx, 1, 3));
  EXPECT_EQ(kind_of([] { phi_condition_check(PhiFamily::xlogx, 1, 2); }), ErrorKind::Degenerate);
}

TEST(Constants, BitIdenticalReevaluation) {
  EXPECT_EQ(c_phi(1.3, 4.7), c_phi(1.3, 4.7));
  EXPECT_EQ(alpha_theta(1.7, -4.2).theta, alpha_theta(1.7, -4.2).theta);
}

TEST(Constants, ReportDispatch) {
  const auto ok = evaluate_constant("c_phi", {{"n", 1}, {"beta", 3}});
  EXPECT_TRUE(ok.validity);
  EXPECT_DOUBLE_EQ(*ok.value, 3.0625);
  const auto bad = evaluate_constant("p_star", {{"n", -1}});
  EXPECT_FALSE(bad.validity);
  EXPECT_FALSE(bad.value.has_value());
  EXPECT_FALSE(bad.reason.empty());
  EXPECT_THROW(evaluate_constant("nope", {}), Error);
  EXPECT_THROW(evaluate_constant("c_phi", {{"n", 1}}), Error);
}
