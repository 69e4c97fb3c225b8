#include "intent/intervals.hpp"

#include <algorithm>

namespace intent {

IntervalSet::IntervalSet(std::span<const Interval> intervals)
    : merged_(intervals.begin(), intervals.end()) {
  normalize();
}

void IntervalSet::insert(const Interval& iv) {
  merged_.push_back(iv);
  normalize();
}

void IntervalSet::insert(std::span<const Interval> ivs) {
  merged_.insert(merged_.end(), ivs.begin(), ivs.end());
  normalize();
}

void IntervalSet::normalize() {
  std::erase_if(merged_, [](const Interval& iv) { return !(iv.end > iv.start); });
  std::sort(merged_.begin(), merged_.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  std::vector<Interval> out;
  out.reserve(merged_.size());
  for (const auto& iv : merged_) {
    // Adjacent intervals stay separate so that touching never counts as overlap
    // after merging.
    if (!out.empty() && iv.start < out.back().end) {
      out.back().end = std::max(out.back().end, iv.end);
    } else {
      out.push_back(iv);
    }
  }
  merged_ = std::move(out);
}

bool IntervalSet::intersects(const Interval& iv) const {
  if (merged_.empty() || !(iv.end > iv.start)) return false;
  // First stored interval whose end is beyond iv.start.
  auto it = std::upper_bound(merged_.begin(), merged_.end(), iv.start,
                             [](double t, const Interval& m) { return t < m.end; });
  return it != merged_.end() && it->start < iv.end;
}

double IntervalSet::covered_length(const Interval& within) const {
  double total = 0.0;
  for (const auto& m : merged_) {
    const double lo = std::max(m.start, within.start);
    const double hi = std::min(m.end, within.end);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

}  // namespace intent
