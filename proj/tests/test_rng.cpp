#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "intent/rng.hpp"

using intent::Rng;

TEST_CASE("same seed, same stream") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(43);
  CHECK(Rng(42).next_u64() != c.next_u64());
}

TEST_CASE("derived seeds depend on every label and index") {
  const auto s = intent::derive_seed(1, {"test-negatives", "p1"}, 0);
  CHECK(s == intent::derive_seed(1, {"test-negatives", "p1"}, 0));
  CHECK(s != intent::derive_seed(1, {"test-negatives", "p2"}, 0));
  CHECK(s != intent::derive_seed(1, {"test-negatives", "p1"}, 1));
  CHECK(s != intent::derive_seed(2, {"test-negatives", "p1"}, 0));
  CHECK(intent::derive_seed(1, {"ab", "c"}) != intent::derive_seed(1, {"a", "bc"}));
  CHECK((intent::SeedPath(7) / "x" / 3).seed() == (intent::SeedPath(7) / "x" / 3).seed());
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(intent::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(intent::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(intent::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("uniform and below stay in range and are roughly flat") {
  Rng r(5);
  std::vector<int> hist(10, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const auto k = r.below(10);
    REQUIRE(k < 10);
    ++hist[k];
  }
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}

TEST_CASE("normal moments") {
  Rng r(11);
  const int n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("poisson and exponential means") {
  Rng r(9);
  double p = 0.0;
  double p_big = 0.0;
  double e = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    p += static_cast<double>(r.poisson(3.5));
    p_big += static_cast<double>(r.poisson(80.0));
    e += r.exponential(2.0);
  }
  CHECK(p / n == doctest::Approx(3.5).epsilon(0.02));
  CHECK(p_big / n == doctest::Approx(80.0).epsilon(0.01));
  CHECK(e / n == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("shuffle is a permutation") {
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  Rng r(1);
  r.shuffle(v.begin(), v.end());
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) CHECK(sorted[i] == i);
  CHECK(v != sorted);
}
