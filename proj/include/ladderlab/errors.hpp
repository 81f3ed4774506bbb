#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace ladderlab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Query outside a precomputed table or sieve.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Iterative method failed to meet its tolerance within its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Root search interval does not bracket a sign change.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters put a computation outside the regime where it is meaningful,
/// e.g. a coupled cutoff xi < 2 that empties every short sum.
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cache file missing, corrupt, or produced under different settings.
class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An identity that holds by construction was violated beyond its error
/// estimate.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

}  // namespace ladderlab
