#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ladderlab/arithmetic.hpp"

using namespace ladderlab;

namespace {

bool prime_by_trial(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

int divisors_by_trial(std::int64_t n) {
  int c = 0;
  for (std::int64_t d = 1; d <= n; ++d)
    if (n % d == 0) ++c;
  return c;
}

}  // namespace

TEST(Arithmetic, PrimeCountingKnownValues) {
  EXPECT_EQ(pi_exact(2.0), 1);
  EXPECT_EQ(pi_exact(100.0), 25);
  EXPECT_EQ(pi_exact(1e4), 1229);
  EXPECT_EQ(pi_exact(1e5), 9592);
  EXPECT_EQ(pi_exact(1e6), 78498);
  EXPECT_EQ(pi_exact(1e7), 664579);
  EXPECT_EQ(pi_exact(1e5 + 0.9), 9592);
}

TEST(Arithmetic, PrimeCountingMatchesTrialDivision) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> u(2, 20000);
  std::vector<int> cum(20001, 0);
  for (int n = 2; n <= 20000; ++n) cum[n] = cum[n - 1] + (prime_by_trial(n) ? 1 : 0);
  for (int i = 0; i < 50; ++i) {
    const int n = u(rng);
    EXPECT_EQ(pi_exact(n + 0.5), cum[n]) << n;
  }
}

TEST(Arithmetic, SieveTablesMatchTrialDivision) {
  const ArithmeticTables tab(5000);
  for (int n = 1; n <= 5000; n += 7) {
    EXPECT_EQ(tab.divisor_count(n), static_cast<std::uint32_t>(divisors_by_trial(n))) << n;
    EXPECT_EQ(tab.is_prime(n), prime_by_trial(n)) << n;
  }
  EXPECT_EQ(tab.divisor_count(720), 30u);
  EXPECT_THROW(tab.divisor_count(5001), RangeError);
}

TEST(Arithmetic, ShortSumsMatchDirectFormula) {
  const ArithmeticTables tab(1000);
  const double t = 12345.678;
  const double xi = 50.0;
  double prime = 0.0;
  double unit = 0.0;
  double divisor = 0.0;
  for (int n = 2; n <= 50; ++n) {
    const double c = std::cos(t * std::log(static_cast<double>(n))) / std::sqrt(static_cast<double>(n));
    unit += c;
    divisor += divisors_by_trial(n) * c;
    if (prime_by_trial(n)) prime += c;
  }
  EXPECT_NEAR(trig_sum(tab, SumKind::prime_cos, t, xi), prime, 1e-11);
  EXPECT_NEAR(trig_sum(tab, SumKind::unit_cos, t, xi), unit, 1e-11);
  EXPECT_NEAR(trig_sum(tab, SumKind::divisor_cos, t, xi), divisor, 1e-11);
}

TEST(Arithmetic, ShortSumIsEvenAndBounded) {
  const ArithmeticTables tab(1000);
  const ShortSum s(tab, SumKind::divisor_cos, 40.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e3, 1e6);
  for (int i = 0; i < 100; ++i) {
    const double t = u(rng);
    EXPECT_EQ(s(t), s(-t));
    EXPECT_LE(std::fabs(s(t)), s.weight_total() + 1e-12);
  }
  EXPECT_NEAR(s.max_frequency(), std::log(40.0), 1e-15);
}

TEST(Arithmetic, EmptySumBelowTwo) {
  const ArithmeticTables tab(100);
  const ShortSum s(tab, SumKind::prime_cos, 1.9);
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s(1e5), 0.0);
  EXPECT_THROW(ShortSum(tab, SumKind::unit_cos, 500.0), RangeError);
}

TEST(Arithmetic, CoupledCutoff) {
  // (T / 2pi)^{1/100}: below 2 for every desk-scale T
  EXPECT_NEAR(xi_of(1e6, 0.1), std::pow(1e6 / (2.0 * M_PI), 0.01), 1e-15);
  EXPECT_LT(xi_of(1e12, 0.1), 2.0);
  EXPECT_THROW(xi_of(1e5, 0.2), DomainError);
  EXPECT_THROW(xi_of(1.0, 0.1), DomainError);
}
