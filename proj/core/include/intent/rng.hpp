#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace intent {

/// 64-bit FNV-1a; used for content hashes and for naming RNG streams.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Mixes a master seed with stream labels into an independent stream seed.
/// Labels are hashed by value, so ("p1", "train") and ("p1", "test") differ.
class SeedPath {
public:
  explicit SeedPath(std::uint64_t master) : state_(master) {}

  SeedPath& operator/(std::string_view label);
  SeedPath& operator/(std::uint64_t index);

  std::uint64_t seed() const { return state_; }

private:
  std::uint64_t state_;
};

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::string_view> labels,
                          std::uint64_t index = 0);

/// Small deterministic generator with platform-independent distributions.
/// std::*_distribution are implementation-defined; these are not.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  double normal();
  double exponential(double mean);
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t poisson(double mean);

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace intent
