#pragma once

// Chebyshev interpolant of a function on one cell [a, b], sampled at the
// Chebyshev-Lobatto points, with its exact antiderivative. Used for the dense
// part of the cumulative Z^2 table: the cell integral and every partial
// integral come from the same polynomial, so the tabulated antiderivative is
// continuous and its derivative is the interpolant.

#include <cmath>
#include <cstddef>
#include <vector>

#include "ladderlab/constants.hpp"

namespace ladderlab {

class ChebyshevCell {
 public:
  ChebyshevCell() = default;

  /// Samples f at degree + 1 Lobatto points on [a, b].
  template <class F>
  static ChebyshevCell fit(const F& f, double a, double b, int degree) {
    std::vector<double> samples(degree + 1);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int j = 0; j <= degree; ++j) {
      // x_j = cos(pi j / n), so j = 0 is the right end point
      double t;
      if (j == 0) {
        t = b;
      } else if (j == degree) {
        t = a;
      } else {
        t = mid + half * std::cos(kPi * j / degree);
      }
      samples[j] = f(t);
    }
    return from_samples(samples, a, b);
  }

  static ChebyshevCell from_samples(const std::vector<double>& samples, double a, double b) {
    ChebyshevCell cell;
    cell.a_ = a;
    cell.b_ = b;
    const int n = static_cast<int>(samples.size()) - 1;
    std::vector<double> cos_table(2 * n);
    for (int m = 0; m < 2 * n; ++m) cos_table[m] = std::cos(kPi * m / n);
    cell.coeffs_.assign(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
      double s = 0.0;
      for (int j = 0; j <= n; ++j) {
        const double w = (j == 0 || j == n) ? 0.5 : 1.0;
        s += w * samples[j] * cos_table[(static_cast<long>(j) * k) % (2 * n)];
      }
      s *= 2.0 / n;
      if (k == 0 || k == n) s *= 0.5;
      cell.coeffs_[k] = s;
    }
    // antiderivative in x; c_{n+1} = c_{n+2} = 0
    cell.anti_.assign(n + 2, 0.0);
    const auto c = [&](int k) { return k <= n ? cell.coeffs_[k] : 0.0; };
    if (n >= 0) cell.anti_[1] = c(0) - 0.5 * c(2);
    for (int k = 2; k <= n + 1; ++k) cell.anti_[k] = (c(k - 1) - c(k + 1)) / (2.0 * k);
    // fix b_0 so that P(-1) = 0
    double at_minus_one = 0.0;
    for (int k = 1; k <= n + 1; ++k) at_minus_one += (k % 2 == 0 ? 1.0 : -1.0) * cell.anti_[k];
    cell.anti_[0] = -at_minus_one;
    cell.integral_ = 0.5 * (b - a) * clenshaw(cell.anti_, 1.0);
    return cell;
  }

  double a() const { return a_; }
  double b() const { return b_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  /// Interpolant value at t in [a, b].
  double value(double t) const { return clenshaw(coeffs_, to_unit(t)); }

  /// Integral of the interpolant over [a, t].
  double integral_to(double t) const {
    if (t <= a_) return 0.0;
    if (t >= b_) return integral_;
    return 0.5 * (b_ - a_) * clenshaw(anti_, to_unit(t));
  }

  double integral() const { return integral_; }

  /// Magnitude of the two highest coefficients; a truncation indicator.
  double tail() const {
    const std::size_t n = coeffs_.size();
    if (n < 2) return 0.0;
    return std::fabs(coeffs_[n - 1]) + std::fabs(coeffs_[n - 2]);
  }

  double max_coefficient() const {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::fabs(c));
    return m;
  }

 private:
  double to_unit(double t) const { return (2.0 * t - a_ - b_) / (b_ - a_); }

  static double clenshaw(const std::vector<double>& c, double x) {
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
      const double b0 = 2.0 * x * b1 - b2 + c[k];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + c[0];
  }

  double a_ = 0.0;
  double b_ = 0.0;
  double integral_ = 0.0;
  std::vector<double> coeffs_;
  std::vector<double> anti_;
};

}  // namespace ladderlab
