#pragma once

#include <algorithm>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ladderlab/errors.hpp"
#include "ladderlab/summation.hpp"

namespace ladderlab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double t) const { return lo <= t && t <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Finite, sorted list of pairwise disjoint closed intervals.
class IntervalUnion {
 public:
  IntervalUnion() = default;

  /// Takes intervals already sorted and disjoint; throws otherwise.
  explicit IntervalUnion(std::vector<Interval> intervals) : intervals_(std::move(intervals)) { validate(); }

  /// Sorts and merges overlapping or touching intervals.
  static IntervalUnion merged(std::vector<Interval> intervals) {
    for (const auto& iv : intervals)
      if (!(iv.lo < iv.hi)) throw DomainError("IntervalUnion: empty or reversed interval");
    std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const auto& iv : intervals) {
      if (!out.empty() && iv.lo <= out.back().hi) {
        out.back().hi = std::max(out.back().hi, iv.hi);
      } else {
        out.push_back(iv);
      }
    }
    return IntervalUnion(std::move(out));
  }

  static IntervalUnion unite(const IntervalUnion& a, const IntervalUnion& b) {
    std::vector<Interval> all(a.intervals_);
    all.insert(all.end(), b.intervals_.begin(), b.intervals_.end());
    return merged(std::move(all));
  }

  const std::vector<Interval>& intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }
  bool empty() const { return intervals_.empty(); }
  const Interval& operator[](std::size_t i) const { return intervals_[i]; }
  auto begin() const { return intervals_.begin(); }
  auto end() const { return intervals_.end(); }

  double measure() const {
    CompensatedSum s;
    for (const auto& iv : intervals_) s.add(iv.length());
    return s.value();
  }

  bool contains(double t) const {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it == intervals_.begin()) return false;
    return std::prev(it)->contains(t);
  }

  bool operator==(const IntervalUnion&) const = default;

  std::string to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "lo,hi\n";
    for (const auto& iv : intervals_) os << iv.lo << ',' << iv.hi << '\n';
    return os.str();
  }

  nlohmann::json to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& iv : intervals_) arr.push_back({iv.lo, iv.hi});
    return arr;
  }

  static IntervalUnion from_json(const nlohmann::json& j) {
    std::vector<Interval> ivs;
    for (const auto& row : j) ivs.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
    return IntervalUnion(std::move(ivs));
  }

 private:
  void validate() const {
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
      if (!(intervals_[i].lo < intervals_[i].hi)) throw DomainError("IntervalUnion: interval with lo >= hi");
      if (i > 0 && !(intervals_[i - 1].hi < intervals_[i].lo))
        throw DomainError("IntervalUnion: intervals must be sorted and disjoint");
    }
  }

  std::vector<Interval> intervals_;
};

inline double measure(const IntervalUnion& u) { return u.measure(); }

}  // namespace ladderlab
