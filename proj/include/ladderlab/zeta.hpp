#pragma once

// Hardy's Z-function on the critical line.
//
// theta1(t)   closed-form truncated phase  (t/2) ln(t/2pi) - t/2 - pi/8
// theta(t)    Riemann-Siegel phase  -t/2 ln pi + Im ln Gamma(1/4 + it/2)
// z(t)        Z(t) = e^{i theta(t)} zeta(1/2 + it), real valued
// zeta_abs_oracle(t)  |zeta(1/2 + it)| by Euler-Maclaurin summation, O(t)
//
// Phases are carried in long double: at t ~ 1e6 the phase is ~6e6 and a
// double ulp there is already ~1e-9.

#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "ladderlab/constants.hpp"
#include "ladderlab/errors.hpp"
#include "ladderlab/riemann_siegel_coeffs.hpp"

namespace ladderlab {

template <std::floating_point Real>
Real theta1(Real t) {
  if (!(t > Real(0))) throw DomainError("theta1: t must be positive, got " + detail::fmt_value(double(t)));
  const long double tl = t;
  const long double v = tl / 2 * std::log(tl / kTwoPiL) - tl / 2 - kPiL / 8;
  return static_cast<Real>(v);
}

/// Derivative of theta1: (1/2) ln(t / 2pi).
inline double theta1_prime(double t) { return 0.5 * std::log(t / kTwoPi); }

namespace detail {

/// Im ln Gamma(1/4 + it/2) - (t/2) ln pi by Stirling's series after shifting
/// the argument to Re z >= 10. Accurate to ~1e-15 for t >= 0.
inline long double theta_stirling(long double t) {
  using C = std::complex<long double>;
  constexpr int kShift = 10;
  // B_{2k} / (2k (2k-1)) for k = 1..10
  static constexpr std::array<long double, 10> kStirling{
      1.0L / 12, -1.0L / 360, 1.0L / 1260, -1.0L / 1680, 1.0L / 1188,
      -691.0L / 360360, 1.0L / 156, -3617.0L / 122400, 43867.0L / 244188,
      -174611.0L / 125400};
  const C z0(0.25L, t / 2);
  long double arg_sum = 0.0L;
  for (int k = 0; k < kShift; ++k) arg_sum += std::arg(z0 + C(k, 0));
  const C z = z0 + C(kShift, 0);
  C lg = (z - C(0.5L, 0)) * std::log(z) - z + C(0.5L * std::log(kTwoPiL), 0);
  const C inv = C(1, 0) / z;
  const C inv2 = inv * inv;
  C pw = inv;
  for (long double b : kStirling) {
    lg += b * pw;
    pw *= inv2;
  }
  return lg.imag() - arg_sum - t / 2 * std::log(kPiL);
}

/// Asymptotic expansion of theta; truncation error < 1e-17 for t >= 20.
inline long double theta_asymptotic(long double t) {
  const long double inv = 1.0L / t;
  const long double inv2 = inv * inv;
  const long double tail =
      inv * (1.0L / 48 +
             inv2 * (7.0L / 5760 +
                     inv2 * (31.0L / 80640 +
                             inv2 * (127.0L / 430080 + inv2 * (511.0L / 1216512)))));
  return t / 2 * std::log(t / kTwoPiL) - t / 2 - kPiL / 8 + tail;
}

inline long double reduce_two_pi(long double x) {
  constexpr long double kInvTwoPi = 0.159154943091895335768883763372514362L;
  // x >= 0 on every call site, so truncation is floor
  const auto turns = static_cast<long long>(x * kInvTwoPi);
  return x - kTwoPiL * static_cast<long double>(turns);
}

}  // namespace detail

/// Riemann-Siegel theta. Long double internally; use Real = long double to
/// keep sub-1e-10 absolute accuracy for t beyond ~1e5.
template <std::floating_point Real = double>
Real theta(Real t) {
  if (!(t >= Real(1))) throw DomainError("theta: requires t >= 1, got " + detail::fmt_value(double(t)));
  const long double tl = t;
  return static_cast<Real>(tl >= 20.0L ? detail::theta_asymptotic(tl) : detail::theta_stirling(tl));
}

// ---------------------------------------------------------------------------
// Euler-Maclaurin oracle

struct ZetaOracleOptions {
  /// Number of directly summed terms; 0 picks ceil((t + 64) / pi) + 10.
  std::int64_t n_terms = 0;
  /// Maximal Euler-Maclaurin order m (number of Bernoulli corrections).
  int max_order = 30;
  /// Stop adding corrections once the next one is below this bound.
  double tail_tol = 1e-15;
};

struct ZetaOracleResult {
  std::complex<long double> value;
  /// Rigorous bound on the Euler-Maclaurin remainder after the last term.
  double remainder_bound = 0.0;
  std::int64_t n_terms = 0;
  int order = 0;
};

namespace detail {

/// B_{2k} / (2k)! for k = 1..40, from (-1)^{k+1} 2 zeta(2k) / (2pi)^{2k}.
inline const std::array<long double, 41>& bernoulli_over_factorial() {
  static const std::array<long double, 41> table = [] {
    std::array<long double, 41> out{};
    for (int k = 1; k <= 40; ++k) {
      long double zeta2k = 0.0L;
      if (k == 1) {
        zeta2k = kPiL * kPiL / 6;
      } else if (k == 2) {
        zeta2k = std::pow(kPiL, 4) / 90;
      } else if (k == 3) {
        zeta2k = std::pow(kPiL, 6) / 945;
      } else {
        for (int n = 2000; n >= 1; --n) zeta2k += std::pow(static_cast<long double>(n), -2.0L * k);
      }
      const long double sign = (k % 2 == 1) ? 1.0L : -1.0L;
      out[k] = sign * 2 * zeta2k / std::pow(kTwoPiL, 2.0L * k);
    }
    return out;
  }();
  return table;
}

}  // namespace detail

/// zeta(1/2 + it) by Euler-Maclaurin summation. Cost O(t); validation only.
inline ZetaOracleResult zeta_critical_oracle(double t, const ZetaOracleOptions& opt = {}) {
  if (!(t >= 0.5)) throw DomainError("zeta oracle: requires t >= 0.5, got " + detail::fmt_value(t));
  using C = std::complex<long double>;
  const long double tl = t;
  const C s(0.5L, tl);
  std::int64_t n = opt.n_terms;
  if (n <= 0) n = static_cast<std::int64_t>(std::ceil((tl + 64.0L) / kPiL)) + 10;
  if (n < 16) n = 16;

  long double re = 0.0L;
  long double im = 0.0L;
  for (std::int64_t k = 1; k < n; ++k) {
    const long double lk = std::log(static_cast<long double>(k));
    const double ph = static_cast<double>(detail::reduce_two_pi(tl * lk));
    const long double amp = 1.0L / std::sqrt(static_cast<long double>(k));
    re += amp * std::cos(ph);
    im -= amp * std::sin(ph);
  }
  C sum(re, im);

  const long double nl = static_cast<long double>(n);
  const long double ln_n = std::log(nl);
  // N^{-s} = N^{-1/2} e^{-i t ln N}
  const long double ph_n = detail::reduce_two_pi(tl * ln_n);
  const C n_pow_ms = (1.0L / std::sqrt(nl)) * C(std::cos(ph_n), -std::sin(ph_n));
  sum += nl * n_pow_ms / (s - C(1, 0));
  sum += 0.5L * n_pow_ms;

  const auto& b = detail::bernoulli_over_factorial();
  const int max_order = std::min(opt.max_order, 39);
  // rising = s (s+1) ... (s+2k-2) N^{-s-2k+1}
  C rising = s * n_pow_ms / nl;
  int order = 0;
  long double next_bound = 0.0L;
  for (int k = 1; k <= max_order + 1; ++k) {
    const C term = b[k] * rising;
    if (k == max_order + 1 || std::abs(term) < opt.tail_tol * 1e-3L) {
      const long double sigma_plus = 0.5L + 2 * k - 1;
      next_bound = std::abs(term) * std::abs(s + C(2 * k - 1, 0)) / sigma_plus;
      break;
    }
    sum += term;
    order = k;
    rising *= (s + C(2 * k - 1, 0)) * (s + C(2 * k, 0)) / (nl * nl);
  }
  return {sum, static_cast<double>(next_bound), n, order};
}

/// |zeta(1/2 + it)| from the Euler-Maclaurin oracle.
inline double zeta_abs_oracle(double t) {
  return static_cast<double>(std::abs(zeta_critical_oracle(t).value));
}

// ---------------------------------------------------------------------------
// Riemann-Siegel evaluator

struct ZEvaluatorConfig {
  /// Highest Riemann-Siegel correction index k in C_0..C_k (0..4).
  int rs_correction_terms = 3;
  /// Below this ordinate the Euler-Maclaurin oracle is used.
  double t_switch = 200.0;
  double target_abs_err = 1e-6;

  void validate() const {
    if (rs_correction_terms < 0 || rs_correction_terms > 4)
      throw DomainError("ZEvaluatorConfig: rs_correction_terms must be in 0..4");
    if (!(t_switch >= 50.0)) throw DomainError("ZEvaluatorConfig: t_switch must be >= 50");
    if (target_abs_err < 1e-4 && rs_correction_terms < 2)
      throw DomainError("ZEvaluatorConfig: target_abs_err < 1e-4 needs at least C_0..C_2");
  }

  bool operator==(const ZEvaluatorConfig&) const = default;
};

namespace detail {

/// Smallest-prime-factor, ln n and n^{-1/2} for the Dirichlet main sum.
struct DirichletTables {
  static constexpr std::uint32_t kMaxN = 1u << 13;
  std::vector<std::uint32_t> spf;
  std::vector<long double> log_n;
  std::vector<double> inv_sqrt;

  DirichletTables() : spf(kMaxN + 1, 0), log_n(kMaxN + 1), inv_sqrt(kMaxN + 1) {
    for (std::uint32_t i = 2; i <= kMaxN; ++i) {
      if (spf[i] != 0) continue;
      for (std::uint32_t j = i; j <= kMaxN; j += i)
        if (spf[j] == 0) spf[j] = i;
    }
    for (std::uint32_t i = 1; i <= kMaxN; ++i) {
      log_n[i] = std::log(static_cast<long double>(i));
      inv_sqrt[i] = static_cast<double>(1.0L / std::sqrt(static_cast<long double>(i)));
    }
  }
};

inline const DirichletTables& dirichlet_tables() {
  static const DirichletTables tables;
  return tables;
}

/// sum_{n <= N} n^{-1/2} n^{-it}. n^{-it} is completely multiplicative, so
/// only primes need a sin/cos; composites are products of known factors.
inline std::complex<double> dirichlet_main_sum(long double t, std::uint32_t n_max) {
  const auto& tab = dirichlet_tables();
  if (n_max > DirichletTables::kMaxN) {
    long double re = 0.0L;
    long double im = 0.0L;
    for (std::uint32_t n = 1; n <= n_max; ++n) {
      const long double ph = reduce_two_pi(t * std::log(static_cast<long double>(n)));
      const long double a = 1.0L / std::sqrt(static_cast<long double>(n));
      re += a * std::cos(static_cast<double>(ph));
      im -= a * std::sin(static_cast<double>(ph));
    }
    return {static_cast<double>(re), static_cast<double>(im)};
  }
  thread_local std::vector<std::complex<double>> powers;
  if (powers.size() < n_max + 1) powers.resize(n_max + 1);
  powers[1] = {1.0, 0.0};
  double re = tab.inv_sqrt[1];
  double im = 0.0;
  for (std::uint32_t n = 2; n <= n_max; ++n) {
    const std::uint32_t p = tab.spf[n];
    std::complex<double> u;
    if (p == n) {
      const double ph = static_cast<double>(reduce_two_pi(t * tab.log_n[n]));
      u = {std::cos(ph), -std::sin(ph)};
    } else {
      // explicit product: std::complex operator* carries NaN-recovery overhead
      const std::complex<double> a = powers[p];
      const std::complex<double> b = powers[n / p];
      u = {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
    }
    powers[n] = u;
    re += tab.inv_sqrt[n] * u.real();
    im += tab.inv_sqrt[n] * u.imag();
  }
  return {re, im};
}

}  // namespace detail

/// Evaluates Z(t): Riemann-Siegel main sum plus corrections C_0..C_k for
/// t >= t_switch, Euler-Maclaurin below. Pure and re-entrant.
class ZEvaluator {
 public:
  explicit ZEvaluator(ZEvaluatorConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

  const ZEvaluatorConfig& config() const { return cfg_; }

  double operator()(double t) const {
    if (!(t >= 2.0)) throw DomainError("z: requires t >= 2, got " + detail::fmt_value(t));
    if (t < cfg_.t_switch) return from_oracle(t);
    return riemann_siegel(t);
  }

  double squared(double t) const {
    const double v = (*this)(t);
    return v * v;
  }

  double riemann_siegel(double t) const {
    const long double tl = t;
    const long double a = std::sqrt(tl / kTwoPiL);
    const auto n_max = static_cast<std::uint32_t>(std::floor(a));
    const double p = static_cast<double>(a - n_max);

    const long double th = detail::reduce_two_pi(detail::theta_asymptotic(tl));
    const double cth = std::cos(static_cast<double>(th));
    const double sth = std::sin(static_cast<double>(th));
    const std::complex<double> s = detail::dirichlet_main_sum(tl, n_max);
    const double main = 2.0 * (cth * s.real() - sth * s.imag());

    const double z = 2.0 * p - 1.0;
    const double ratio = kTwoPi / t;
    const double step = std::sqrt(ratio);
    double rem = 0.0;
    double scale = 1.0;
    for (int k = 0; k <= cfg_.rs_correction_terms; ++k) {
      rem += detail::rs_correction(k, z) * scale;
      scale *= step;
    }
    const double sign = (n_max % 2 == 1) ? 1.0 : -1.0;  // (-1)^{N-1}
    return main + sign * std::pow(ratio, 0.25) * rem;
  }

  static double from_oracle(double t) {
    const auto zeta = zeta_critical_oracle(t).value;
    const long double th = detail::reduce_two_pi(theta<long double>(t));
    // Re(e^{i theta} zeta)
    return static_cast<double>(std::cos(th) * zeta.real() - std::sin(th) * zeta.imag());
  }

 private:
  ZEvaluatorConfig cfg_;
};

/// Z(t) with the default evaluator configuration.
inline double z(double t) {
  static const ZEvaluator eval;
  return eval(t);
}

inline double z_squared(double t) {
  const double v = z(t);
  return v * v;
}

}  // namespace ladderlab
