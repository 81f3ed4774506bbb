#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ladderlab/zeta.hpp"

using namespace ladderlab;

// Reference values from mpmath.siegelz / siegeltheta at 30 digits.
struct ZRef {
  double t;
  double z;
  double theta;
};

constexpr ZRef kRefs[] = {
    {17.5, 2.3018457553350568833, -0.1786750014649945107359},
    {150.0, -0.091010923267403593374, 162.5643068840685220852},
    {1000.0, 0.99779463752158661399, 2034.546428038031608703},
    {5000.5, 0.58542531924643895021, 14199.56745913261626211},
    {1e5, 5.8795924686817650415, 433752.0272291707814356},
    {1000000.25, -3.7807274370661003347, 5488817.850282605514242},
};

TEST(Zeta, MatchesReferenceValues) {
  const ZEvaluator z;
  for (const auto& r : kRefs) EXPECT_NEAR(z(r.t), r.z, 1e-7) << "t = " << r.t;
}

TEST(Zeta, ThetaMatchesReference) {
  for (const auto& r : kRefs) {
    EXPECT_NEAR(theta<long double>(r.t), r.theta, 1e-9 * std::max(1.0, std::fabs(r.theta) / 1e6))
        << "t = " << r.t;
  }
  EXPECT_NEAR(theta1(1000.0), 2034.546407204697060092, 1e-10);
}

TEST(Zeta, Theta1IsThetaMinusSmallCorrection) {
  // theta - theta1 = 1/(48 t) + O(t^-3)
  for (double t : {1e3, 1e4, 1e5}) EXPECT_NEAR(theta<long double>(t) - theta1<long double>(t), 1.0 / (48.0 * t), 1e-9);
}

TEST(Zeta, OracleAgreesWithReference) {
  for (const auto& r : kRefs) {
    if (r.t > 1e4) continue;
    EXPECT_NEAR(ZEvaluator::from_oracle(r.t), r.z, 1e-10) << "t = " << r.t;
    EXPECT_NEAR(zeta_abs_oracle(r.t), std::fabs(r.z), 1e-10);
  }
}

TEST(Zeta, OracleReportsSmallRemainder) {
  const auto res = zeta_critical_oracle(2000.0);
  EXPECT_LT(res.remainder_bound, 1e-12);
  EXPECT_GT(res.n_terms, 600);
}

TEST(Zeta, RiemannSiegelAgreesWithOracleOnRandomOrdinates) {
  const ZEvaluator z;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(std::log(1e3), std::log(2e5));
  for (int i = 0; i < 60; ++i) {
    const double t = std::exp(u(rng));
    EXPECT_NEAR(std::fabs(z(t)), zeta_abs_oracle(t), 1e-6) << "t = " << t;
  }
}

TEST(Zeta, CorrectionTermsImproveAccuracy) {
  // each extra C_k shrinks the error at moderate height
  const double t = 1200.3;
  const double ref = ZEvaluator::from_oracle(t);
  double prev = 1.0;
  for (int k = 0; k <= 3; ++k) {
    ZEvaluatorConfig cfg;
    cfg.rs_correction_terms = k;
    cfg.target_abs_err = 1e-3;
    const double err = std::fabs(ZEvaluator(cfg).riemann_siegel(t) - ref);
    EXPECT_LT(err, prev) << "k = " << k;
    prev = err;
  }
  EXPECT_LT(prev, 1e-8);
}

TEST(Zeta, SwitchesToOracleAtLowHeight) {
  const ZEvaluator z;
  EXPECT_EQ(z(120.0), ZEvaluator::from_oracle(120.0));
  EXPECT_DOUBLE_EQ(z.squared(3000.0), z(3000.0) * z(3000.0));
}

TEST(Zeta, SignChangesNearFirstZeros) {
  // first zeros: 14.1347..., 21.0220..., 25.0108...
  const ZEvaluator z;
  EXPECT_LT(z(14.10) * z(14.17), 0.0);
  EXPECT_LT(z(21.0) * z(21.05), 0.0);
  EXPECT_LT(z(25.0) * z(25.02), 0.0);
}

TEST(Zeta, RejectsBadInput) {
  const ZEvaluator z;
  EXPECT_THROW(z(1.0), DomainError);
  EXPECT_THROW(theta(0.5), DomainError);
  EXPECT_THROW(theta1(-1.0), DomainError);
  ZEvaluatorConfig bad;
  bad.rs_correction_terms = 5;
  EXPECT_THROW(ZEvaluator{bad}, DomainError);
  bad.rs_correction_terms = 1;
  bad.target_abs_err = 1e-6;
  EXPECT_THROW(ZEvaluator{bad}, DomainError);
}
