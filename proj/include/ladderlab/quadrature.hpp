#pragma once

// Oscillation-aware adaptive Gauss-Legendre quadrature.
//
// The interval is first cut into panels no longer than the local wavelength
// of the integrand divided by QuadConfig::oscillation_factor. For integrands
// tagged Z-oscillatory the wavelength is the local Z zero spacing
// 2pi / ln(t / 2pi). Each panel is then refined by bisection until the
// Richardson-style estimate |G(panel) - G(left) - G(right)| meets the local
// tolerance. Panels are independent, so they may be evaluated on several
// threads; the reduction runs in panel order with compensated summation and
// is bit-for-bit independent of the thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "ladderlab/constants.hpp"
#include "ladderlab/errors.hpp"
#include "ladderlab/interval_union.hpp"
#include "ladderlab/summation.hpp"

namespace ladderlab {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

namespace detail {

inline GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    long double x = std::cos(kPiL * (i + 0.75L) / (n + 0.5L));
    long double dp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1.0L;
      long double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0L;
      dp = n * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    const long double w = 2.0L / ((1.0L - x * x) * dp * dp);
    rule.nodes[i] = static_cast<double>(-x);
    rule.nodes[n - 1 - i] = static_cast<double>(x);
    rule.weights[i] = rule.weights[n - 1 - i] = static_cast<double>(w);
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace detail

/// Gauss-Legendre rule of order n on [-1, 1], computed once per order.
inline const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
  return it->second;
}

struct QuadConfig {
  double rel_tol = 1e-8;
  /// Absolute tolerance per unit length; stops refinement where the
  /// integrand is essentially zero.
  double abs_tol = 1e-14;
  double max_panel = 1.0;
  /// Initial panels are at most (local wavelength) / oscillation_factor.
  double oscillation_factor = 8.0;
  int order = 10;
  int max_depth = 40;
  /// Refinement budget per initial panel.
  std::size_t max_subpanels = 1u << 14;
  int threads = 1;
  /// When positive, no initial panel straddles a multiple of this spacing;
  /// tabulated integrands switch interpolants there.
  double breakpoints = 0.0;

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-3)) throw DomainError("QuadConfig: rel_tol must be in (0, 1e-3]");
    if (!(oscillation_factor >= 4.0)) throw DomainError("QuadConfig: oscillation_factor must be >= 4");
    if (order < 10) throw DomainError("QuadConfig: Gauss order must be >= 10");
    if (!(max_panel > 0.0)) throw DomainError("QuadConfig: max_panel must be positive");
    if (threads < 1) throw DomainError("QuadConfig: threads must be >= 1");
    if (!(breakpoints >= 0.0)) throw DomainError("QuadConfig: breakpoints must be nonnegative");
  }
};

/// What the panel bound should resolve.
struct Oscillation {
  /// Integrand oscillates like Z(t)^2: wavelength 2pi / ln(t / 2pi).
  bool z_like = false;
  /// Additional angular frequency (rad per unit t) riding on top.
  double extra_frequency = 0.0;

  static Oscillation none() { return {}; }
  static Oscillation z(double extra = 0.0) { return {true, extra}; }
  static Oscillation frequency(double omega) { return {false, omega}; }

  /// Local wavelength bound at t, +inf when nothing oscillates.
  double wavelength(double t) const {
    double omega = extra_frequency;
    if (z_like) omega += std::log(std::max(t, kTwoPi * 2.718281828459045) / kTwoPi);
    if (!(omega > 0.0)) return std::numeric_limits<double>::infinity();
    return kTwoPi / omega;
  }
};

struct QuadResult {
  double value = 0.0;
  double err_est = 0.0;
  /// Integral of |f|; the tolerance scale.
  double l1 = 0.0;
  std::uint64_t n_evals = 0;
  std::uint64_t n_panels = 0;
};

namespace detail {

struct PanelResult {
  double value = 0.0;
  double err = 0.0;
  double l1 = 0.0;
  std::uint64_t evals = 0;
  std::uint64_t panels = 0;
};

struct GaussValue {
  double value;
  double l1;
};

template <class F>
GaussValue gauss_apply(const F& f, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  double s_abs = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = f(mid + half * rule.nodes[i]);
    s += rule.weights[i] * v;
    s_abs += rule.weights[i] * std::fabs(v);
  }
  return {s * half, s_abs * half};
}

inline constexpr double kNoiseWidth = 1e-12;
inline constexpr double kStallRatio = 0.3;
inline constexpr int kStallLevels = 1;
inline constexpr int kStallMinDepth = 10;

template <class F>
PanelResult integrate_panel(const F& f, double a, double b, const QuadConfig& cfg, const GaussRule& rule) {
  struct Pending {
    double a, b;
    GaussValue whole;
    int depth;
    double parent_err;
    int stall;
  };
  PanelResult out;
  CompensatedSum value;
  CompensatedSum err;
  CompensatedSum l1;
  std::vector<Pending> stack;
  stack.push_back({a, b, gauss_apply(f, a, b, rule), 0, std::numeric_limits<double>::infinity(), 0});
  out.evals += rule.nodes.size();
  // the panel's |f| mass is shared out by length, so that sub-panels around
  // a sign change of f are not held to their own vanishing |f| mass
  const double l1_density = stack.back().whole.l1 / (b - a);
  while (!stack.empty()) {
    // depth-first, left child processed first: accepted panels come out in
    // ascending order, which keeps the reduction order fixed
    Pending p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const GaussValue left = gauss_apply(f, p.a, m, rule);
    const GaussValue right = gauss_apply(f, m, p.b, rule);
    out.evals += 2 * rule.nodes.size();
    const double refined = left.value + right.value;
    const double e = std::fabs(refined - p.whole.value);
    const double scale = left.l1 + right.l1;
    const double budget = cfg.rel_tol * std::max(scale, l1_density * (p.b - p.a));
    // a panel narrower than kNoiseWidth relative to its position cannot be
    // resolved further: the abscissae themselves are that coarse, and the
    // integrand's rounding noise dominates; its estimate is kept in err
    const bool too_narrow = p.b - p.a <= kNoiseWidth * std::max(std::fabs(p.a), std::fabs(p.b));
    // a smooth integrand's estimate drops by orders of magnitude per
    // bisection, a kink's by about 4; one that keeps at least kStallRatio of
    // its parent's for kStallLevels levels is rounding noise or a jump, and
    // halving further only halves it
    const int stall = e >= kStallRatio * p.parent_err ? p.stall + 1 : 0;
    const bool stagnant = p.depth >= kStallMinDepth && stall >= kStallLevels;
    if (e <= budget || e <= cfg.abs_tol * (p.b - p.a) || too_narrow || stagnant) {
      value.add(refined);
      err.add(e);
      l1.add(scale);
      ++out.panels;
      continue;
    }
    if (p.depth + 1 > cfg.max_depth || out.panels + stack.size() + 2 > cfg.max_subpanels)
      throw ConvergenceError("integrate: no convergence on [" + fmt_value(p.a) + ", " + fmt_value(p.b) + "]");
    stack.push_back({m, p.b, right, p.depth + 1, e, stall});
    stack.push_back({p.a, m, left, p.depth + 1, e, stall});
  }
  out.value = value.value();
  out.err = err.value();
  out.l1 = l1.value();
  return out;
}

inline void append_panels(double a, double b, const QuadConfig& cfg, const Oscillation& osc,
                          std::vector<std::pair<double, double>>& out) {
  double t = a;
  while (t < b) {
    const double probe = std::min(b, t + cfg.max_panel);
    const double h = std::min(cfg.max_panel, osc.wavelength(probe) / cfg.oscillation_factor);
    double next = t + h;
    // avoid a sliver at the end
    if (next >= b || b - next < 0.25 * h) next = b;
    if (cfg.breakpoints > 0.0) {
      const double edge = (std::floor(t / cfg.breakpoints) + 1.0) * cfg.breakpoints;
      if (edge < next) next = edge;
    }
    out.emplace_back(t, next);
    t = next;
  }
}

template <class F>
std::vector<PanelResult> run_panels(const F& f, const std::vector<std::pair<double, double>>& panels,
                                    const QuadConfig& cfg) {
  const GaussRule& rule = gauss_legendre(cfg.order);
  std::vector<PanelResult> results(panels.size());
  const auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      results[i] = integrate_panel(f, panels[i].first, panels[i].second, cfg, rule);
  };
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), std::max<std::size_t>(1, panels.size()));
  if (n_threads <= 1) {
    worker(0, panels.size());
    return results;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n_threads);
  const std::size_t chunk = (panels.size() + n_threads - 1) / n_threads;
  for (std::size_t w = 0; w < n_threads; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(panels.size(), begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        worker(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

inline constexpr double kRoundoffFactor = 16.0 * std::numeric_limits<double>::epsilon();

}  // namespace detail

/// Integral of f over [a, b].
template <class F>
QuadResult integrate(const F& f, double a, double b, const QuadConfig& cfg = {},
                     const Oscillation& osc = Oscillation::none()) {
  cfg.validate();
  if (!(a < b)) throw DomainError("integrate: requires a < b");
  std::vector<std::pair<double, double>> panels;
  detail::append_panels(a, b, cfg, osc, panels);
  const auto results = detail::run_panels(f, panels, cfg);
  QuadResult out;
  CompensatedSum value;
  CompensatedSum err;
  CompensatedSum l1;
  for (const auto& r : results) {
    value.add(r.value);
    err.add(r.err);
    l1.add(r.l1);
    out.n_evals += r.evals;
    out.n_panels += r.panels;
  }
  out.value = value.value();
  out.l1 = l1.value();
  out.err_est = err.value() + detail::kRoundoffFactor * out.l1;
  return out;
}

/// Integral of f over a union of intervals. Per-interval error estimates are
/// combined in root-sum-square.
template <class F>
QuadResult integrate_union(const F& f, const IntervalUnion& u, const QuadConfig& cfg = {},
                           const Oscillation& osc = Oscillation::none()) {
  cfg.validate();
  std::vector<std::pair<double, double>> panels;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::size_t before = panels.size();
    detail::append_panels(u[i].lo, u[i].hi, cfg, osc, panels);
    owner.insert(owner.end(), panels.size() - before, i);
  }
  const auto results = detail::run_panels(f, panels, cfg);
  QuadResult out;
  CompensatedSum value;
  CompensatedSum l1;
  CompensatedSum err_sq;
  std::size_t k = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    CompensatedSum err_i;
    for (; k < results.size() && owner[k] == i; ++k) {
      value.add(results[k].value);
      l1.add(results[k].l1);
      err_i.add(results[k].err);
      out.n_evals += results[k].evals;
      out.n_panels += results[k].panels;
    }
    err_sq.add(err_i.value() * err_i.value());
  }
  out.value = value.value();
  out.l1 = l1.value();
  out.err_est = std::sqrt(err_sq.value()) + detail::kRoundoffFactor * out.l1;
  return out;
}

}  // namespace ladderlab
