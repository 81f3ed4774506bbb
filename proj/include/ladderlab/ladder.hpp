#pragma once

// Jacob's ladder phi_1 as a concrete function.
//
// The mean-inverse model sets phi_1(T) = V^{-1}(F(T)) with
// F(T) = int_0^T Z^2 and V(y) = y ln(y / 2pi) + c y. Then
//
//   phi_1'(T) = F'(T) / V'(phi_1(T)) = Z~^2(T),  V'(y) = ln(y / 2pi) + 1 + c,
//
// and int_a^b f(phi_1(t)) Z~^2(t) dt = int_{phi_1(a)}^{phi_1(b)} f(x) dx holds
// by the chain rule. F' is taken from the table's interpolant so that the
// identity holds for the realized phi_1 and not just up to table error.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>

#include "ladderlab/arithmetic.hpp"
#include "ladderlab/constants.hpp"
#include "ladderlab/cumulative_table.hpp"
#include "ladderlab/errors.hpp"
#include "ladderlab/summation.hpp"

namespace ladderlab {

enum class LadderBackend { mean_inverse, integral_equation };

class LadderModel {
 public:
  static constexpr double kC = kEulerGamma;
  static constexpr double kDefaultTLow = 1e3;

  explicit LadderModel(std::shared_ptr<const CumulativeZ2Table> table, double t_low = kDefaultTLow)
      : table_(std::move(table)), t_low_(t_low) {
    if (!table_) throw DomainError("LadderModel: null table");
    if (!(t_low_ >= 2.0 * kTwoPi)) throw DomainError("LadderModel: t_low too small");
    if (table_->t_max() < t_low_) throw RangeError("LadderModel: table does not reach t_low");
  }

  // -- main-term function ---------------------------------------------------

  static double v_eval(double y) {
    if (!(y >= kTwoPi)) throw DomainError("v_eval: requires y >= 2pi");
    return y * std::log(y / kTwoPi) + kC * y;
  }

  static double v_prime(double y) {
    if (!(y >= kTwoPi)) throw DomainError("v_prime: requires y >= 2pi");
    return std::log(y / kTwoPi) + 1.0 + kC;
  }

  /// Solves V(y) = w on [2pi, w / c] by safeguarded Newton.
  static double v_invert(double w) {
    const double w_min = kTwoPi * kC;
    if (!(w >= w_min)) throw DomainError("v_invert: requires w >= V(2pi)");
    if (w == w_min) return kTwoPi;
    double lo = kTwoPi;
    double hi = w / kC;
    double y = std::clamp(w / std::max(1.0, std::log(w / kTwoPi)), lo, hi);
    for (int iter = 0; iter < 200; ++iter) {
      const double r = y * std::log(y / kTwoPi) + kC * y - w;
      if (r == 0.0) return y;
      if (r > 0.0) hi = y; else lo = y;
      double next = y - r / (std::log(y / kTwoPi) + 1.0 + kC);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::fabs(next - y) <= 2.0 * std::numeric_limits<double>::epsilon() * y || next == lo || next == hi) return next;
      y = next;
    }
    throw ConvergenceError("v_invert: no convergence for w = " + detail::fmt_value(w));
  }

  // -- ladder ---------------------------------------------------------------

  const CumulativeZ2Table& table() const { return *table_; }
  std::shared_ptr<const CumulativeZ2Table> table_ptr() const { return table_; }
  double t_low() const { return t_low_; }
  double t_max() const { return table_->t_max(); }

  double cumulative_z2(double T) const { return (*table_)(T); }

  double phi1(double T) const {
    require_support(T, "phi1");
    return v_invert((*table_)(T));
  }

  /// Z~^2(t) = phi_1'(t).
  double z2_tilde(double t) const {
    require_support(t, "z2_tilde");
    return table_->density(t) / v_prime(phi1(t));
  }

  struct Point {
    double phi1;
    double z2_tilde;
  };

  /// phi_1(t) and Z~^2(t) from one table lookup.
  Point at(double t) const {
    require_support(t, "phi1");
    const double y = v_invert((*table_)(t));
    return {y, table_->density(t) / v_prime(y)};
  }

  /// Image of the supported range under phi_1.
  double y_min() const { return phi1(t_low_); }
  double y_max() const { return phi1(t_max()); }

  /// T with phi_1(T) = y: F(T) = V(y) by bracketed Newton. F' = Z^2 vanishes
  /// at every zero of Z, so each step is checked against the bracket.
  double phi1_invert(double y) const {
    if (!(y >= y_min() && y <= y_max()))
      throw RangeError("phi1_invert: y = " + detail::fmt_value(y) + " outside the ladder image [" +
                       detail::fmt_value(y_min()) + ", " + detail::fmt_value(y_max()) + "]");
    const double target = v_eval(y);
    const auto& F = *table_;
    // phi_1(T) < T, so the preimage lies to the right of y
    double lo = std::max(t_low_, std::min(y, t_max()));
    if (F(lo) >= target) return lo;
    double hi = t_max();
    double step = std::max(1.0, 0.1 * (lo - phi1(lo)));
    for (double probe = lo + step; probe < hi; probe = lo + (step *= 2.0)) {
      if (F(probe) >= target) {
        hi = probe;
        break;
      }
      lo = probe;
    }
    double t = 0.5 * (lo + hi);
    for (int iter = 0; iter < 400; ++iter) {
      const double r = F(t) - target;
      if (r == 0.0) return t;
      if (r > 0.0) hi = t; else lo = t;
      const double d = F.density(t);
      double next = d > 0.0 ? t - r / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == t || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return next;
      t = next;
    }
    throw ConvergenceError("phi1_invert: no convergence for y = " + detail::fmt_value(y));
  }

  /// (t - phi_1(t)) / ((1 - c) pi(t)).
  double ladder_gap_ratio(double t) const {
    if (!(t >= 1e4)) throw DomainError("ladder_gap_ratio: requires t >= 1e4");
    return (t - phi1(t)) / ((1.0 - kC) * static_cast<double>(pi_exact(t)));
  }

 private:
  void require_support(double t, const char* who) const {
    if (!(t >= t_low_)) throw DomainError(std::string(who) + ": t below the ladder floor " + detail::fmt_value(t_low_));
    if (t > t_max())
      throw RangeError(std::string(who) + ": t = " + detail::fmt_value(t) + " beyond table coverage " +
                       detail::fmt_value(t_max()));
  }

  std::shared_ptr<const CumulativeZ2Table> table_;
  double t_low_;
};

// -- integral-equation backend ------------------------------------------------

/// Upper limit mu(x) of the damped integral.
struct MuFunction {
  double factor = 7.0;
  std::function<double(double)> custom;

  double operator()(double x) const {
    if (custom) return custom(x);
    return factor * x * std::log(x);
  }
};

struct IntegralEquationResult {
  double x = 0.0;
  /// x / 2, the backend's phi_1.
  double phi1 = 0.0;
  double residual = 0.0;  // |lhs - rhs| / rhs
  double upper_limit = 0.0;
  int iterations = 0;
};

namespace detail {

/// int_0^upper Z^2 e^{-2t/x} dt as a midpoint Stieltjes sum over table cells.
inline double damped_moment(const CumulativeZ2Table& table, double x, double upper) {
  const double step = table.step();
  const auto n = static_cast<std::size_t>(std::floor(upper / step));
  const auto& F = table.values();
  const double k = 2.0 / x;
  CompensatedSum s;
  for (std::size_t i = 0; i < n; ++i) {
    const double mid = (static_cast<double>(i) + 0.5) * step;
    s.add((F[i + 1] - F[i]) * std::exp(-k * mid));
  }
  const double t_n = static_cast<double>(n) * step;
  if (upper > t_n) s.add((table(upper) - F[n]) * std::exp(-k * 0.5 * (t_n + upper)));
  return s.value();
}

}  // namespace detail

/// Solves int_0^{mu(x)} Z^2 e^{-2t/x} dt = int_0^T Z^2 dt for x on [T, 3T].
/// The damped integral is cut where e^{-2t/x} has made the rest negligible;
/// that cut must lie inside the table.
inline IntegralEquationResult solve_integral_equation(const CumulativeZ2Table& table, double T,
                                                      const MuFunction& mu = {}) {
  if (!(T >= 1e4)) throw DomainError("solve_integral_equation: requires T >= 1e4");
  const double rhs = table(T);
  const auto cutoff = [&](double x) {
    const double m = mu(x);
    if (!(m > x)) throw DomainError("solve_integral_equation: mu(x) must exceed x");
    // the tail beyond c is about (x/2) ln(c) e^{-2c/x}, while the total is
    // about (x/2) ln(x); past c = x (ln 1e17 + 2) / 2 it is below 1e-17 of it
    const double negligible = 0.5 * x * (std::log(1e17) + 2.0);
    const double upper = std::min(m, negligible);
    if (upper > table.t_max())
      throw RangeError("solve_integral_equation: damped integral for x = " + detail::fmt_value(x) +
                       " needs the table to " + detail::fmt_value(upper));
    return upper;
  };
  const auto g = [&](double x) { return detail::damped_moment(table, x, cutoff(x)) - rhs; };

  double a = T;
  double b = 3.0 * T;
  double ga = g(a);
  double gb = g(b);
  if (!(ga < 0.0 && gb > 0.0))
    throw BracketError("solve_integral_equation: [T, 3T] does not bracket the solution");
  IntegralEquationResult out;
  // Illinois-type regula falsi
  int side = 0;
  double x = a;
  for (out.iterations = 1; out.iterations <= 200; ++out.iterations) {
    x = (a * gb - b * ga) / (gb - ga);
    if (!(x > a && x < b)) x = 0.5 * (a + b);
    const double gx = g(x);
    if (std::fabs(gx) <= 1e-13 * rhs || b - a <= 1e-14 * b) break;
    if ((gx < 0.0) == (ga < 0.0)) {
      a = x;
      ga = gx;
      if (side == -1) gb *= 0.5;
      side = -1;
    } else {
      b = x;
      gb = gx;
      if (side == 1) ga *= 0.5;
      side = 1;
    }
  }
  out.x = x;
  out.phi1 = 0.5 * x;
  out.upper_limit = cutoff(x);
  out.residual = std::fabs(g(x)) / rhs;
  if (!(out.residual <= 1e-8)) throw ConvergenceError("solve_integral_equation: residual above 1e-8");
  return out;
}

}  // namespace ladderlab
