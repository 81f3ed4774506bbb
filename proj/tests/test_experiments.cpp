#include <cmath>
#include <cstdlib>

#include <gtest/gtest.h>

#include "ladderlab/experiments.hpp"

using namespace ladderlab;

namespace {

const ExperimentContext& context() {
  static const ExperimentContext ctx = [] {
    ExperimentContext c;
    const char* env = std::getenv("LADDER_LAB_CACHE");
    auto table = env && std::filesystem::exists(env)
                     ? std::make_shared<const CumulativeZ2Table>(cache_load(env))
                     : std::make_shared<const CumulativeZ2Table>(CumulativeZ2Table::build(1.2e5));
    c.ladder = std::make_shared<const LadderModel>(table);
    return c;
  }();
  return ctx;
}

ExperimentParams at(double T, double u = 0.6) {
  ExperimentParams p;
  p.T = T;
  p.u_exponent = u;
  return p;
}

}  // namespace

TEST(Experiments, HardyLittlewoodAtTenToFive) {
  const auto r = run_hardy_littlewood(context(), at(1e5));
  EXPECT_NEAR(r.rhs, 10829.4797283639, 1e-7);
  EXPECT_GE(r.ratio, 0.9);
  EXPECT_LE(r.ratio, 1.1);
  EXPECT_TRUE(r.hard_ok());
}

TEST(Experiments, SelbergReducesToHardyLittlewood) {
  auto p = at(1e5);
  const auto hl = run_hardy_littlewood(context(), p);
  const auto s = run_selberg(context(), p);
  EXPECT_EQ(s.lhs, hl.lhs);
  EXPECT_EQ(s.rhs, hl.rhs);
  EXPECT_EQ(s.extra("imag_lhs"), 0.0);
}

TEST(Experiments, SelbergOneTwo) {
  auto p = at(1e5, std::log(1e3) / std::log(1e5));
  p.n2 = 2;
  const auto r = run_selberg(context(), p);
  EXPECT_NEAR(r.rhs, 7167.7, 0.5);
  EXPECT_NEAR(r.rhs, 7167.46948091413, 1e-6);
  EXPECT_GE(r.ratio, 0.8);
  EXPECT_LE(r.ratio, 1.2);
  p.n2 = 4;
  p.n1 = 2;
  EXPECT_THROW(run_selberg(context(), p), DomainError);
}

TEST(Experiments, SubstitutionIdentitiesHold) {
  for (auto f : {SubstitutionF::constant, SubstitutionF::linear, SubstitutionF::coslog}) {
    const auto r = run_substitution_check(context(), f, at(1e5));
    EXPECT_TRUE(r.hard_ok()) << to_string(f) << " lhs " << r.lhs << " rhs " << r.rhs << " err " << r.err_est;
  }
}

TEST(Experiments, PushForwardIdentityForTheoremIntegrands) {
  for (auto f : {TheoremFormula::T2_5, TheoremFormula::T2_6, TheoremFormula::T2_7}) {
    const auto r = run_theorem(context(), f, GKind::G3, at(1e4));
    EXPECT_TRUE(r.hard_ok()) << to_string(f);
    EXPECT_EQ(r.xi, 50.0);
  }
}

TEST(Experiments, CoupledCutoffIsRegimeError) {
  auto p = at(1e5);
  p.xi_override.reset();
  EXPECT_THROW(run_theorem(context(), TheoremFormula::T2_5, GKind::G3, p), RegimeError);
  EXPECT_THROW(run_sign_scan(context(), p), RegimeError);
}

TEST(Experiments, MeasureAndContiguity) {
  auto p = at(1e5, std::log(1e3) / std::log(1e5));
  for (double x : {kPi / 8, kPi / 4, kPi / 2}) {
    p.x = x;
    const auto r = run_measure_check(context(), GKind::G3, p);
    EXPECT_NEAR(r.ratio, 1.0, 0.05) << x;
    EXPECT_TRUE(r.hard_ok());
    EXPECT_EQ(r.extra("hat_union_pieces"), 1.0);
  }
}

TEST(Experiments, DistanceSeparatesWindowFromPreimage) {
  const auto r = run_distance_check(context(), at(1e5, 0.55));
  EXPECT_TRUE(r.hard_ok());
  EXPECT_GT(r.extra("rho"), 0.0);
  EXPECT_GT(r.ratio, 0.85);
  EXPECT_LT(r.ratio, 1.05);
}

TEST(Experiments, MeanValuePointsSolveTheirLevelEquations) {
  for (auto c : {Corollary::C3_4, Corollary::C3_5}) {
    const auto r = run_mean_value(context(), c, at(1e4));
    EXPECT_TRUE(r.hard_ok());
  }
}

TEST(Experiments, DivisorMeansAndAreaLaw) {
  EXPECT_TRUE(run_divisor_means(context(), at(1e4)).hard_ok());
  const auto a = run_area_law(context(), at(1e4));
  EXPECT_TRUE(a.hard_ok());
  EXPECT_GE(a.extra("I_plus"), 0.0);
  EXPECT_LE(a.extra("I_minus"), 0.0);
}

TEST(Experiments, SignScanFindsChanges) {
  auto p = at(1e4, std::log(100.0) / std::log(1e4));
  p.xi_override = 4.0;
  const auto r = run_sign_scan(context(), p);
  EXPECT_TRUE(r.hard_ok());
  EXPECT_GE(r.lhs, 10.0);
}

TEST(Experiments, DeterministicAcrossThreads) {
  auto p = at(1e4);
  const auto one = run_theorem(context(), TheoremFormula::T2_6, GKind::G4, p);
  p.threads = 3;
  const auto three = run_theorem(context(), TheoremFormula::T2_6, GKind::G4, p);
  EXPECT_EQ(one.lhs, three.lhs);
  EXPECT_EQ(one.rhs, three.rhs);
  EXPECT_EQ(one.err_est, three.err_est);
}

TEST(Experiments, ValidatesParameters) {
  auto p = at(1e5);
  p.u_exponent = 0.95;
  EXPECT_THROW(run_hardy_littlewood(context(), p), DomainError);
  p = at(1e5);
  p.x = 2.0;
  EXPECT_THROW(run_measure_check(context(), GKind::G3, p), DomainError);
  ExperimentContext bare;
  EXPECT_THROW(run_distance_check(bare, at(1e5)), DomainError);
}
