#pragma once

// Primes, divisor counts and the short trigonometric sums
//
//   PrimeCos    sum_{2 <= p <= xi} p^{-1/2} cos(t ln p)
//   UnitCos     sum_{2 <= n <= xi} n^{-1/2} cos(t ln n)
//   DivisorCos  sum_{2 <= n <= xi} d(n) n^{-1/2} cos(t ln n)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ladderlab/constants.hpp"
#include "ladderlab/errors.hpp"

namespace ladderlab {

enum class SumKind { prime_cos, unit_cos, divisor_cos };

inline std::string_view to_string(SumKind k) {
  switch (k) {
    case SumKind::prime_cos: return "prime_cos";
    case SumKind::unit_cos: return "unit_cos";
    case SumKind::divisor_cos: return "divisor_cos";
  }
  return "?";
}

/// xi = (T / 2pi)^{eps / 10}, the cutoff coupled to (T, eps).
inline double xi_of(double T, double eps) {
  if (!(T > kTwoPi)) throw DomainError("xi_of: requires T > 2pi");
  if (!(eps > 0.0 && eps <= 0.1)) throw DomainError("xi_of: requires 0 < eps <= 1/10");
  return std::pow(T / kTwoPi, eps / 10.0);
}

/// Exact pi(t) for 2 <= t <= 1e8 by a segmented sieve of Eratosthenes.
inline std::int64_t pi_exact(double t) {
  constexpr double kLimit = 1e8;
  if (!(t >= 2.0)) throw DomainError("pi_exact: requires t >= 2");
  if (t > kLimit) throw RangeError("pi_exact: sieve limit is 1e8");
  const auto n = static_cast<std::int64_t>(std::floor(t));
  const auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n))) + 1;
  std::vector<char> small(root + 1, 1);
  std::vector<std::int64_t> base;
  for (std::int64_t i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(i);
    for (std::int64_t j = i * i; j <= root; j += i) small[j] = 0;
  }
  constexpr std::int64_t kSegment = 1 << 18;
  std::vector<char> seg(kSegment);
  std::int64_t count = 0;
  for (std::int64_t lo = 2; lo <= n; lo += kSegment) {
    const std::int64_t hi = std::min(n, lo + kSegment - 1);
    std::fill(seg.begin(), seg.begin() + (hi - lo + 1), 1);
    for (std::int64_t p : base) {
      if (p * p > hi) break;
      std::int64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
      for (std::int64_t j = start; j <= hi; j += p) seg[j - lo] = 0;
    }
    for (std::int64_t i = 0; i <= hi - lo; ++i) count += seg[i];
  }
  return count;
}

/// Primes and d(n) up to a limit, by a linear sieve.
class ArithmeticTables {
 public:
  static constexpr std::uint32_t kDefaultLimit = 1000000;

  explicit ArithmeticTables(std::uint32_t limit = kDefaultLimit) : limit_(limit), divisors_(limit + 1, 0) {
    if (limit < 2) throw DomainError("ArithmeticTables: limit must be >= 2");
    std::vector<std::uint32_t> spf(limit + 1, 0);
    // exponent of the smallest prime in n
    std::vector<std::uint8_t> spf_exp(limit + 1, 0);
    divisors_[1] = 1;
    for (std::uint32_t i = 2; i <= limit; ++i) {
      if (spf[i] == 0) {
        spf[i] = i;
        spf_exp[i] = 1;
        divisors_[i] = 2;
        primes_.push_back(i);
      }
      for (std::uint32_t p : primes_) {
        const std::uint64_t m = static_cast<std::uint64_t>(p) * i;
        if (p > spf[i] || m > limit) break;
        spf[m] = p;
        if (p == spf[i]) {
          spf_exp[m] = spf_exp[i] + 1;
          divisors_[m] = divisors_[i] / (spf_exp[i] + 1) * (spf_exp[i] + 2);
        } else {
          spf_exp[m] = 1;
          divisors_[m] = divisors_[i] * 2;
        }
      }
    }
  }

  std::uint32_t limit() const { return limit_; }
  const std::vector<std::uint32_t>& primes() const { return primes_; }

  std::uint32_t divisor_count(std::int64_t n) const {
    if (n < 1 || n > static_cast<std::int64_t>(limit_))
      throw RangeError("divisor_count: n outside [1, " + std::to_string(limit_) + "]");
    return divisors_[n];
  }

  bool is_prime(std::int64_t n) const {
    if (n < 2 || n > static_cast<std::int64_t>(limit_)) return false;
    return std::binary_search(primes_.begin(), primes_.end(), static_cast<std::uint32_t>(n));
  }

 private:
  std::uint32_t limit_;
  std::vector<std::uint32_t> primes_;
  std::vector<std::uint32_t> divisors_;
};

/// A short cosine sum with frozen weights and frequencies.
class ShortSum {
 public:
  ShortSum(const ArithmeticTables& tables, SumKind kind, double xi) : kind_(kind), xi_(xi) {
    if (xi >= 2.0 && xi > tables.limit()) throw RangeError("trig_sum: xi exceeds the arithmetic table limit");
    if (xi < 2.0) return;
    const auto n_max = static_cast<std::uint32_t>(std::floor(xi));
    for (std::uint32_t n = 2; n <= n_max; ++n) {
      double w = 0.0;
      switch (kind) {
        case SumKind::prime_cos:
          if (!tables.is_prime(n)) continue;
          w = 1.0;
          break;
        case SumKind::unit_cos: w = 1.0; break;
        case SumKind::divisor_cos: w = tables.divisor_count(n); break;
      }
      weights_.push_back(w / std::sqrt(static_cast<double>(n)));
      logs_.push_back(std::log(static_cast<long double>(n)));
    }
  }

  SumKind kind() const { return kind_; }
  double xi() const { return xi_; }
  std::size_t terms() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }

  /// Highest angular frequency ln(floor(xi)); zero for an empty sum.
  double max_frequency() const { return logs_.empty() ? 0.0 : static_cast<double>(logs_.back()); }

  /// Sum of |weights|: bound on |sum| for every t.
  double weight_total() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
  }

  double operator()(double t) const {
    const long double tl = std::fabs(static_cast<long double>(t));
    constexpr long double kInvTwoPi = 0.159154943091895335768883763372514362L;
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      long double ph = tl * logs_[i];
      ph -= kTwoPiL * static_cast<long double>(static_cast<long long>(ph * kInvTwoPi));
      s += weights_[i] * std::cos(static_cast<double>(ph));
    }
    return s;
  }

 private:
  SumKind kind_;
  double xi_;
  std::vector<double> weights_;
  std::vector<long double> logs_;
};

/// One-shot evaluation of a short sum.
inline double trig_sum(const ArithmeticTables& tables, SumKind kind, double t, double xi) {
  return ShortSum(tables, kind, xi)(t);
}

}  // namespace ladderlab
