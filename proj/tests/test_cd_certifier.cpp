#include <gtest/gtest.h>

#include <cmath>

#include "cdflow/cd_certifier.hpp"
#include "cdflow/constants.hpp"

using namespace cdflow;

namespace {

OperatorSpec quadratic(double beta) { return make_operator(WeightFunction::quadratic(), beta); }
OperatorSpec quartic(double beta) { return make_operator(WeightFunction::quartic(), beta); }

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

TEST(CdSlack, Examples) {
  const auto q4 = quartic(2.0);
  EXPECT_NEAR(cd_slack(q4, 3.0, 7.0, 1.0), 4.5, 1e-12);
  EXPECT_NEAR(cd_slack(q4, 3.0, 7.0, 0.0), 0.0, 1e-12);
  const auto q2 = quadratic(2.0);
  EXPECT_NEAR(cd_slack_limit(q2, 3.0, -2.0), 0.0, 1e-12);
  EXPECT_NEAR(cd_slack(q2, 3.0, -2.0, 1e6), 0.0, 1e-9);
}

TEST(CdSlack, ForbiddenBand) {
  const auto q2 = quadratic(2.0);
  for (double n : {0.0, 0.5, 1.0})
    EXPECT_EQ(kind_of([&] { cd_slack(q2, 1.0, n, 0.0); }), ErrorKind::DimensionForbidden);
  EXPECT_EQ(kind_of([&] { certify(q2, 1.0, 0.3); }), ErrorKind::DimensionForbidden);
  EXPECT_EQ(kind_of([&] { conformal_criterion_slack(q2, 1.0, 1.0, 0.0); }), ErrorKind::DimensionForbidden);
}

TEST(Certify, Examples) {
  const auto a = certify(quadratic(2.0), 3.0, -2.0);
  EXPECT_EQ(a.status, CertStatus::certified);
  EXPECT_NEAR(a.min_slack, 0.0, 1e-12);
  EXPECT_EQ(a.method, CertMethod::closed_form);
  EXPECT_EQ(certify(quadratic(1.0), 0.5, -1.0).status, CertStatus::certified);
  const auto v = certify(quadratic(2.0), 3.1, -2.0);
  EXPECT_EQ(v.status, CertStatus::violated);
  EXPECT_LE(std::abs(v.argmin_x), quadratic(2.0).grid().half_width());
  EXPECT_EQ(certify(quadratic(2.0), 0.0, -2.0).status, CertStatus::certified);
  EXPECT_EQ(kind_of([] { certify(quadratic(2.0), -1.0, -2.0); }), ErrorKind::OutOfRange);
}

TEST(Certify, BoundaryPairsOnBothPaths) {
  CertifyOptions scan;
  scan.force_grid_scan = true;
  for (double beta : {1.6, 2.0, 3.0, 10.0}) {
    const auto op = quadratic(beta);
    for (const auto& opt : {CertifyOptions{}, scan}) {
      const auto c = certify(op, 2 * beta - 1, 2 * (1 - beta), opt);
      EXPECT_EQ(c.status, CertStatus::certified) << beta;
      EXPECT_NEAR(c.min_slack, 0.0, 1e-9) << beta;
    }
  }
}

TEST(Certify, ClosedFormAgreesWithGridScanOnLattice) {
  CertifyOptions scan;
  scan.force_grid_scan = true;
  for (double beta : {1.0, 2.0, 3.0}) {
    const auto op = quadratic(beta);
    int disagreements = 0;
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double rho = 0.05 + 0.3 * i;
        const double n = j < 10 ? -0.25 - 0.7 * j : 1.25 + 1.3 * (j - 10);
        // Stay off the exact boundary, where both paths sit at zero slack.
        if (std::abs(certify(op, rho, n).min_slack) < 1e-6) continue;
        disagreements += certify(op, rho, n).status != certify(op, rho, n, scan).status;
      }
    EXPECT_EQ(disagreements, 0) << beta;
  }
}

TEST(Certify, MonotoneInRho) {
  const auto op = quartic(2.0);
  for (double n : {-3.0, -1.0, 4.0, 7.0, 20.0}) {
    bool certified_above = false;
    for (double rho = 6.0; rho > 0.0; rho -= 0.25) {
      const bool ok = certify(op, rho, n).status == CertStatus::certified;
      if (certified_above) {
        EXPECT_TRUE(ok) << "rho " << rho << " n " << n;
      }
      certified_above = certified_above || ok;
    }
  }
}

TEST(Certify, ConvexWeightsSatisfyGeneralPair) {
  for (const auto& coeffs : {std::vector<double>{1, 1}, std::vector<double>{1, 1, 1},
                             std::vector<double>{2, 0.5, 0.3, 0.05}, std::vector<double>{1, 3, 0, 0.2}}) {
    const auto w = WeightFunction::even_polynomial(coeffs);
    const double c = w.convexity();
    for (double beta : {1.2, 2.0, 3.5}) {
      const auto op = make_operator(w, beta);
      const double rho = c * (beta - 0.5), n = 2 * (1 - beta);
      EXPECT_EQ(certify(op, rho, n).status, CertStatus::certified);
      EXPECT_NEAR(poincare_constant(rho, n) * c * (beta - 1), 1.0, 1e-12);
    }
  }
}

TEST(ConformalCriterion, Examples) {
  const auto op = quadratic(2.0);
  EXPECT_GE(conformal_criterion_slack(op, 3.0, -2.0, 0.0), -1e-12);
  bool witness = false;
  for (double x = -20; x <= 20; x += 0.5) witness = witness || conformal_criterion_slack(op, 4.0, -2.0, x) < 0;
  EXPECT_TRUE(witness);
  const auto q4 = quartic(3.0);
  EXPECT_NEAR(conformal_criterion_slack(q4, 1.0, -3.0, 0.0), (3.0 - 0.5) * q4.w.d2(0.0) - 1.0, 1e-12);
}

TEST(ConformalCriterion, SignAgreesWithSlack) {
  for (const auto& op : {quadratic(2.0), quartic(2.0), quadratic(1.0)})
    for (double rho : {0.5, 3.0, 5.0})
      for (double n : {-5.0, -1.0, 3.0, 7.0})
        for (double x : {-3.0, 0.0, 0.4, 2.0, 10.0}) {
          const double s = cd_slack(op, rho, n, x), t = conformal_criterion_slack(op, rho, n, x);
          if (std::abs(s) > 1e-9) {
            EXPECT_EQ(s > 0, t > 0);
          }
        }
}

TEST(Frontier, QuadraticClosedForm) {
  const auto f3 = frontier(quadratic(3.0));
  EXPECT_DOUBLE_EQ(f3.best_constant, 4.0);
  EXPECT_DOUBLE_EQ(f3.rho_star, 5.0);
  EXPECT_DOUBLE_EQ(f3.n_star, -4.0);
  EXPECT_EQ(f3.certificate.status, CertStatus::certified);
  const auto f1 = frontier(quadratic(1.0));
  EXPECT_DOUBLE_EQ(f1.best_constant, 0.25);
  EXPECT_DOUBLE_EQ(f1.rho_star, 0.5);
  EXPECT_DOUBLE_EQ(f1.n_star, -1.0);
}

TEST(Frontier, GridScanMatchesClosedForm) {
  FrontierOptions scan;
  scan.force_grid_scan = true;
  for (double beta : {1.0, 1.25, 2.0, 3.0}) {
    const auto f = frontier(quadratic(beta), scan);
    EXPECT_NEAR(f.best_constant / c_beta(beta), 1.0, 1e-6) << beta;
    EXPECT_EQ(f.certificate.status, CertStatus::certified);
    EXPECT_NEAR(f.best_constant, f.rho_star * f.n_star / (f.n_star - 1), 1e-12);
  }
}

TEST(Frontier, Quartic) {
  const auto f = frontier(quartic(2.0));
  EXPECT_EQ(certify(quartic(2.0), 3.0, 7.0).status, CertStatus::certified);
  EXPECT_GE(f.best_constant, 3.5 - 1e-9);
  EXPECT_EQ(f.certificate.status, CertStatus::certified);
  EXPECT_NEAR(f.best_constant, f.rho_star * f.n_star / (f.n_star - 1), 1e-12);
}

TEST(Frontier, NoFeasiblePair) {
  FrontierOptions box;
  box.n_min = 2.0;
  box.n_max = 100.0;
  EXPECT_EQ(kind_of([&] { frontier(quadratic(2.0), box); }), ErrorKind::NoFeasiblePair);
}

TEST(Saturation, CoordinateFunctionIsExtremal) {
  for (double beta : {1.6, 3.0, 10.0}) {
    MeasureOptions opt;
    opt.half_width = 10.0;
    opt.nodes = 2001;
    const auto op = make_operator(WeightFunction::quadratic(), beta, opt);
    const auto f = sample(op, [](double x) { return x; });
    const auto g2 = gamma2(op, f), g = gamma(op, f), lf = apply_L(op, f);
    const double rho = 2 * beta - 1, n = 2 * (1 - beta);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(g2[i] - rho * g[i] - lf[i] * lf[i] / n, 0.0, 1e-10);
  }
}
