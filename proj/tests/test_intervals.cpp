#include <doctest.h>

#include "intent/intervals.hpp"
#include "intent/rng.hpp"

using intent::Interval;
using intent::IntervalSet;

TEST_CASE("half-open overlap") {
  CHECK(intent::overlaps({0, 2}, {1, 3}));
  CHECK_FALSE(intent::overlaps({0, 2}, {2, 3}));
  CHECK_FALSE(intent::overlaps({2, 3}, {0, 2}));
  CHECK(intent::overlaps({0, 10}, {3, 4}));
}

TEST_CASE("interval set merges true overlaps only") {
  std::vector<Interval> ivs{{5, 7}, {0, 2}, {1, 3}, {3, 4}};
  IntervalSet s(ivs);
  REQUIRE(s.intervals().size() == 3);
  CHECK(s.intervals()[0] == Interval{0, 3});
  CHECK(s.intervals()[1] == Interval{3, 4});
  CHECK(s.intervals()[2] == Interval{5, 7});
  CHECK(s.covered_length({0, 100}) == doctest::Approx(6.0));
  CHECK(s.covered_length({2, 6}) == doctest::Approx(3.0));
}

TEST_CASE("interval set intersection matches linear scan") {
  intent::Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Interval> ivs;
    const auto n = rng.below(20);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double a = rng.uniform(0, 100);
      ivs.push_back({a, a + rng.uniform(0.1, 8)});
    }
    IntervalSet s(ivs);
    for (int q = 0; q < 50; ++q) {
      const double a = rng.uniform(-5, 105);
      const Interval probe{a, a + rng.uniform(0.01, 5)};
      bool linear = false;
      for (const auto& iv : ivs) linear = linear || intent::overlaps(iv, probe);
      CHECK(s.intersects(probe) == linear);
    }
  }
}

TEST_CASE("insert keeps the set normalized") {
  IntervalSet s;
  CHECK(s.empty());
  s.insert({10, 20});
  s.insert({0, 5});
  s.insert({4, 11});
  REQUIRE(s.intervals().size() == 1);
  CHECK(s.intervals()[0] == Interval{0, 20});
}
