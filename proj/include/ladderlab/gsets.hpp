#pragma once

// Phase points g_nu(tau), defined by theta_1(g) = pi nu / 2 + tau / 2, and the
// disconnected sets
//
//   G3(x) = union over even nu of [g_nu(-x), g_nu(x)],
//   G4(y) = union over odd nu of  [g_nu(-y), g_nu(y)],
//
// restricted to T <= g_nu(0) <= T + U.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "ladderlab/constants.hpp"
#include "ladderlab/errors.hpp"
#include "ladderlab/interval_union.hpp"
#include "ladderlab/ladder.hpp"
#include "ladderlab/zeta.hpp"

namespace ladderlab {

namespace detail {

/// theta_1 in long double, the working precision of the phase solver.
inline long double theta1_ld(long double t) {
  return 0.5L * t * std::log(t / kTwoPiL) - 0.5L * t - kPiL / 8.0L;
}

/// pi/2 * (nu + tau/pi). The index offset tau/pi is formed first, so
/// g_{2n}(pi/2) and g_{2n+1}(-pi/2) reach the same target bit for bit.
inline long double phase_target(std::int64_t nu, double tau) {
  const double s = static_cast<double>(nu) + tau / kPi;
  return 0.5L * kPiL * static_cast<long double>(s);
}

}  // namespace detail

/// Root of theta_1(g) = pi nu / 2 + tau / 2 on (2 pi e, inf).
inline double solve_g(std::int64_t nu, double tau) {
  if (!(tau >= -kPi && tau <= kPi)) throw DomainError("solve_g: tau must lie in [-pi, pi]");
  const long double target = detail::phase_target(nu, tau);
  // theta_1(2 pi e) = -pi/8 and theta_1 is increasing beyond it
  if (!(target > -kPiL / 8.0L))
    throw DomainError("solve_g: no root above 2 pi e for nu = " + std::to_string(nu));
  const long double a = kTwoPiL * 2.718281828459045235360287L;
  // t ln(t / a) = w with w = 2 (target + pi/8); one Newton-friendly seed is
  // w / ln(w / a), clamped into the bracket
  const long double w = 2.0L * (target + kPiL / 8.0L);
  long double lo = a;
  long double hi = std::max(2.0L * a, 2.0L * w + a);
  while (detail::theta1_ld(hi) < target) hi *= 2.0L;
  long double g = w > a ? w / std::log(w / a) : 0.5L * (lo + hi);
  if (!(g > lo && g < hi)) g = 0.5L * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const long double r = detail::theta1_ld(g) - target;
    if (r == 0.0L) break;
    if (r > 0.0L) hi = g; else lo = g;
    long double next = g - r / (0.5L * std::log(g / kTwoPiL));
    if (!(next > lo && next < hi)) next = 0.5L * (lo + hi);
    if (std::fabs(next - g) <= 4.0L * std::numeric_limits<long double>::epsilon() * g) {
      g = next;
      break;
    }
    g = next;
  }
  return static_cast<double>(g);
}

enum class Parity { even, odd };
enum class GKind { G3, G4 };

inline std::string_view to_string(GKind k) { return k == GKind::G3 ? "G3" : "G4"; }
inline Parity parity_of(GKind k) { return k == GKind::G3 ? Parity::even : Parity::odd; }

/// All nu of the given parity with T <= g_nu(0) <= T + U, ascending.
inline std::vector<std::int64_t> enumerate_nu(double T, double U, Parity parity) {
  if (!(T > kTwoPi * 2.718281828459045)) throw DomainError("enumerate_nu: T must exceed 2 pi e");
  if (!(U > 0.0)) throw DomainError("enumerate_nu: U must be positive");
  const auto first = static_cast<std::int64_t>(std::ceil(2.0L * detail::theta1_ld(T) / kPiL)) - 1;
  const auto last = static_cast<std::int64_t>(std::floor(2.0L * detail::theta1_ld(T + U) / kPiL)) + 1;
  std::vector<std::int64_t> out;
  const int want = parity == Parity::even ? 0 : 1;
  for (std::int64_t nu = std::max<std::int64_t>(first, 1); nu <= last; ++nu) {
    if (static_cast<int>(((nu % 2) + 2) % 2) != want) continue;
    const double g = solve_g(nu, 0.0);
    if (g >= T && g <= T + U) out.push_back(nu);
  }
  return out;
}

struct GSetSpec {
  GKind kind = GKind::G3;
  /// x for G3, y for G4; in (0, pi/2].
  double angle = kPi / 4.0;
  double T = 1e5;
  double U = 1e3;

  void validate() const {
    if (!(angle > 0.0 && angle <= 0.5 * kPi)) throw DomainError("GSetSpec: angle must lie in (0, pi/2]");
    if (!(T > kTwoPi * 2.718281828459045)) throw DomainError("GSetSpec: T too small");
    if (!(U > 0.0 && U <= T / std::log(T))) throw DomainError("GSetSpec: U must lie in (0, T / ln T]");
  }
};

inline IntervalUnion build_gset(const GSetSpec& spec) {
  spec.validate();
  std::vector<Interval> ivs;
  for (std::int64_t nu : enumerate_nu(spec.T, spec.U, parity_of(spec.kind)))
    ivs.push_back({solve_g(nu, -spec.angle), solve_g(nu, spec.angle)});
  return IntervalUnion(std::move(ivs));
}

/// Preimage of a union under phi_1, endpoint by endpoint.
inline IntervalUnion pullback(const IntervalUnion& u, const LadderModel& ladder) {
  std::vector<Interval> ivs;
  ivs.reserve(u.size());
  for (const auto& iv : u) ivs.push_back({ladder.phi1_invert(iv.lo), ladder.phi1_invert(iv.hi)});
  return IntervalUnion(std::move(ivs));
}

}  // namespace ladderlab
