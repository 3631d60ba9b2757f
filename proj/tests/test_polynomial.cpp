#include <gtest/gtest.h>

#include "cdflow/polynomial.hpp"

using cdflow::Polynomial;

TEST(Polynomial, EvenCoefficientsExpand) {
  const auto p = Polynomial::from_even({1.0, 1.0, 1.0});
  EXPECT_EQ(p.degree(), 4);
  EXPECT_DOUBLE_EQ(p.coefficient(1), 0.0);
  EXPECT_DOUBLE_EQ(p.coefficient(4), 1.0);
  EXPECT_DOUBLE_EQ(p(2.0), 21.0);
}

TEST(Polynomial, Derivatives) {
  const auto p = Polynomial::from_even({1.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(p.derivative()(1.0), 6.0);
  EXPECT_DOUBLE_EQ(p.derivative().derivative()(1.0), 14.0);
  EXPECT_EQ(Polynomial::from_even({3.0}).derivative().degree(), -1);
}

TEST(Polynomial, ArithmeticMatchesPointwise) {
  const auto a = Polynomial::from_even({1.0, 2.0});
  const Polynomial b = a.derivative();
  for (double x : {-1.5, 0.0, 0.3, 2.0}) {
    EXPECT_NEAR((a * b)(x), a(x) * b(x), 1e-12);
    EXPECT_NEAR((a + b)(x), a(x) + b(x), 1e-12);
    EXPECT_NEAR((2.5 * a)(x), 2.5 * a(x), 1e-12);
  }
}

TEST(Polynomial, ChoppedDropsRoundoffAndTrims) {
  const auto a = Polynomial::from_even({1.0, 1.0});
  const auto b = Polynomial::from_even({0.0, 0.0, 1e-17});
  const auto c = (a + b).chopped(1e-12);
  EXPECT_EQ(c.degree(), 2);
  EXPECT_DOUBLE_EQ(c.leading(), 1.0);
}
