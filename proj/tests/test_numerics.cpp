#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ladderlab/chebyshev.hpp"
#include "ladderlab/interval_union.hpp"
#include "ladderlab/quadrature.hpp"
#include "ladderlab/summation.hpp"
#include "ladderlab/zeta.hpp"

using namespace ladderlab;

TEST(CompensatedSum, RecoversCancelledTerms) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  // a naive sum returns exactly 0 here
  EXPECT_NEAR(s.value(), 1e-13, 1e-25);
}

TEST(IntervalUnion, MergesTouchingAndOverlapping) {
  const auto u = IntervalUnion::merged({{3, 4}, {0, 1}, {1, 2}, {3.5, 5}});
  ASSERT_EQ(u.size(), 2u);
  EXPECT_EQ(u[0], (Interval{0, 2}));
  EXPECT_EQ(u[1], (Interval{3, 5}));
  EXPECT_DOUBLE_EQ(u.measure(), 4.0);
  EXPECT_TRUE(u.contains(4.5));
  EXPECT_FALSE(u.contains(2.5));
}

TEST(IntervalUnion, RejectsUnsortedOrOverlapping) {
  EXPECT_THROW(IntervalUnion({{0, 2}, {1, 3}}), DomainError);
  EXPECT_THROW(IntervalUnion({{2, 3}, {0, 1}}), DomainError);
  EXPECT_THROW(IntervalUnion::merged({{1, 1}}), DomainError);
}

TEST(IntervalUnion, JsonRoundTrip) {
  const IntervalUnion u({{0.25, 1.5}, {2.0, 2.75}});
  EXPECT_EQ(IntervalUnion::from_json(u.to_json()), u);
  EXPECT_NE(u.to_csv().find("lo,hi"), std::string::npos);
}

TEST(Chebyshev, InterpolatesAndIntegratesSmoothFunctions) {
  const auto f = [](double t) { return std::exp(t) * std::cos(3.0 * t); };
  // antiderivative of e^t cos 3t is e^t (cos 3t + 3 sin 3t) / 10
  const auto F = [](double t) { return std::exp(t) * (std::cos(3.0 * t) + 3.0 * std::sin(3.0 * t)) / 10.0; };
  const auto cell = ChebyshevCell::fit(f, -0.5, 1.5, 40);
  for (double t : {-0.5, 0.0, 0.3, 1.1, 1.5}) {
    EXPECT_NEAR(cell.value(t), f(t), 1e-13);
    EXPECT_NEAR(cell.integral_to(t), F(t) - F(-0.5), 1e-13);
  }
  EXPECT_NEAR(cell.integral(), F(1.5) - F(-0.5), 1e-13);
  EXPECT_LT(cell.tail(), 1e-14);
}

TEST(Quadrature, SmoothIntegrand) {
  const auto r = integrate([](double t) { return std::exp(-t); }, 0.0, 10.0);
  EXPECT_NEAR(r.value, 1.0 - std::exp(-10.0), 1e-13);
  EXPECT_LT(r.err_est, 1e-8);
  EXPECT_GT(r.n_evals, 0u);
}

TEST(Quadrature, OscillatoryIntegrand) {
  const double w = 40.0;
  const auto r = integrate([&](double t) { return std::cos(w * t); }, 0.0, 30.0, {}, Oscillation::frequency(w));
  EXPECT_NEAR(r.value, std::sin(w * 30.0) / w, 1e-12);
  EXPECT_LE(std::fabs(r.value - std::sin(w * 30.0) / w), r.err_est + 1e-13);
}

TEST(Quadrature, ErrorEstimateCoversTrueErrorForKinks) {
  // |t - 1/3| has a kink that Gauss panels only resolve by bisection
  const auto r = integrate([](double t) { return std::fabs(t - 1.0 / 3.0); }, 0.0, 1.0);
  const double exact = 0.5 * (1.0 / 9.0 + 4.0 / 9.0);
  EXPECT_LE(std::fabs(r.value - exact), r.err_est + 1e-15);
  EXPECT_LT(std::fabs(r.value - exact), 1e-9);
}

TEST(Quadrature, ManufacturedSolutionsAreHonest) {
  // p(t) cos(w t + phase) with quadratic p: the antiderivative is
  // p sin / w + p' cos / w^2 - p'' sin / w^3
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> freq(0.5, 14.0);
  int dishonest = 0;
  const int cases = 200;
  for (int i = 0; i < cases; ++i) {
    const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng), ph = 3.0 * coef(rng);
    const double w = freq(rng);
    const double a = 1e3 * (1.0 + coef(rng));
    const double b = a + 20.0 + 10.0 * coef(rng);
    const auto p = [&](double t) { return c0 + c1 * (t - a) + c2 * (t - a) * (t - a) / 400.0; };
    const auto F = [&](double t) {
      const double x = t - a;
      const double pv = c0 + c1 * x + c2 * x * x / 400.0;
      const double dp = c1 + 2.0 * c2 * x / 400.0;
      const double ddp = 2.0 * c2 / 400.0;
      const double arg = w * t + ph;
      return pv * std::sin(arg) / w + dp * std::cos(arg) / (w * w) - ddp * std::sin(arg) / (w * w * w);
    };
    const auto r = integrate([&](double t) { return p(t) * std::cos(w * t + ph); }, a, b, {},
                             Oscillation::frequency(w));
    if (std::fabs(r.value - (F(b) - F(a))) > r.err_est) ++dishonest;
  }
  EXPECT_LT(dishonest, cases / 100 + 1);
}

TEST(Quadrature, HalvingToleranceStaysWithinOldEstimate) {
  const ZEvaluator z;
  const auto f = [&](double t) { return z.squared(t) * std::cos(t * std::log(3.0)); };
  QuadConfig coarse;
  coarse.rel_tol = 1e-6;
  QuadConfig fine;
  fine.rel_tol = 5e-7;
  const auto r1 = integrate(f, 2e4, 2e4 + 40.0, coarse, Oscillation::z(std::log(3.0)));
  const auto r2 = integrate(f, 2e4, 2e4 + 40.0, fine, Oscillation::z(std::log(3.0)));
  EXPECT_LE(std::fabs(r1.value - r2.value), r1.err_est);
}

TEST(Quadrature, UnionIsSumOfPieces) {
  const auto f = [](double t) { return t * t; };
  const IntervalUnion u({{0, 1}, {2, 3}});
  const auto r = integrate_union(f, u);
  EXPECT_NEAR(r.value, 1.0 / 3.0 + (27.0 - 8.0) / 3.0, 1e-13);
}

TEST(Quadrature, DeterministicAcrossThreadCounts) {
  const ZEvaluator z;
  const auto f = [&](double t) { return z.squared(t); };
  QuadConfig c1;
  QuadConfig c4;
  c4.threads = 4;
  const auto a = integrate(f, 1e4, 1e4 + 50.0, c1, Oscillation::z());
  const auto b = integrate(f, 1e4, 1e4 + 50.0, c4, Oscillation::z());
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.err_est, b.err_est);
}

TEST(Quadrature, MatchesReferenceMoment) {
  // mpmath.quad of siegelz(t)^2 over [1000, 1010]; with C_0..C_3 the
  // Riemann-Siegel truncation at t = 1000 costs about 1e-9 relative
  const double ref = 96.471800894542733686;
  const ZEvaluator z;
  const auto r = integrate([&](double t) { return z.squared(t); }, 1000.0, 1010.0, {}, Oscillation::z());
  EXPECT_NEAR(r.value, ref, 2e-9 * ref);
  ZEvaluatorConfig cfg;
  cfg.rs_correction_terms = 4;
  const ZEvaluator z4(cfg);
  const auto r4 = integrate([&](double t) { return z4.squared(t); }, 1000.0, 1010.0, {}, Oscillation::z());
  EXPECT_LT(std::fabs(r4.value - ref), std::fabs(r.value - ref));
}

TEST(Quadrature, BreakpointsIsolateJumps) {
  // a step at t = 16 only converges when no panel straddles it
  const auto f = [](double t) { return t < 16.0 ? 1.0 : 1.0 + 1e-6; };
  QuadConfig c;
  c.breakpoints = 16.0;
  const auto r = integrate(f, 0.0, 40.0, c);
  EXPECT_NEAR(r.value, 40.0 + 24e-6, 1e-13);
  EXPECT_LT(r.n_panels, 100u);
}

TEST(Quadrature, NoisyIntegrandStopsAtNoiseFloor) {
  // relative noise 1e-6 far above rel_tol: refinement must stop, and the
  // estimate must own the noise
  const auto f = [](double t) {
    std::uint64_t h;
    std::memcpy(&h, &t, sizeof h);
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return 1.0 + 1e-6 * (static_cast<double>(h % 2001) / 1000.0 - 1.0);
  };
  const auto r = integrate(f, 0.0, 1.0);
  EXPECT_LE(std::fabs(r.value - 1.0), r.err_est + 1e-6);
  EXPECT_GT(r.err_est, 1e-12);
}

TEST(Quadrature, JumpWithoutBreakpointIsCovered) {
  const auto f = [](double t) { return t < 1.0 / 3.0 ? 0.0 : 1.0; };
  const auto r = integrate(f, 0.0, 1.0);
  EXPECT_LE(std::fabs(r.value - 2.0 / 3.0), r.err_est);
  EXPECT_LT(std::fabs(r.value - 2.0 / 3.0), 1e-4);
}

TEST(Quadrature, RejectsBadConfig) {
  QuadConfig c;
  c.rel_tol = 0.0;
  EXPECT_THROW(integrate([](double t) { return t; }, 0.0, 1.0, c), DomainError);
  EXPECT_THROW(integrate([](double t) { return t; }, 1.0, 0.0), DomainError);
}
