#pragma once

#include <span>
#include <vector>

namespace intent {

/// Half-open time interval [start, end) in seconds.
struct Interval {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  bool contains(double t) const { return t >= start && t < end; }
  bool contains(const Interval& o) const { return o.start >= start && o.end <= end; }
  bool operator==(const Interval&) const = default;
};

/// True when two half-open intervals share any point. Touching ends do not overlap.
inline bool overlaps(const Interval& a, const Interval& b) {
  return a.start < b.end && b.start < a.end;
}

/// Sorted, merged set of intervals with logarithmic intersection queries.
class IntervalSet {
public:
  IntervalSet() = default;
  explicit IntervalSet(std::span<const Interval> intervals);

  void insert(const Interval& iv);
  void insert(std::span<const Interval> ivs);

  bool intersects(const Interval& iv) const;
  bool empty() const { return merged_.empty(); }
  const std::vector<Interval>& intervals() const { return merged_; }

  /// Total length of the set restricted to `within`.
  double covered_length(const Interval& within) const;

private:
  void normalize();

  std::vector<Interval> merged_;
};

}  // namespace intent
