#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

namespace matsec {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a child seed from a parent seed and a label. Used to split one
/// root seed into independent sub-streams (sample coins, parity coin, tau,
/// delta, arrival order, ...) so that trials replay bit-exactly.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t label) {
  std::uint64_t s = parent;
  std::uint64_t a = splitmix64(s);
  s = parent ^ (0x517cc1b727220a95ULL * (label + 1));
  std::uint64_t b = splitmix64(s);
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

// Stream labels for derive_seed. Keeping them in one place avoids collisions.
namespace stream {
inline constexpr std::uint64_t kSample = 1;
inline constexpr std::uint64_t kParity = 2;
inline constexpr std::uint64_t kTau = 3;
inline constexpr std::uint64_t kDelta = 4;
inline constexpr std::uint64_t kOrder = 5;
inline constexpr std::uint64_t kBinomial = 6;
inline constexpr std::uint64_t kBranch = 7;
inline constexpr std::uint64_t kSplit = 8;
inline constexpr std::uint64_t kInstance = 9;
inline constexpr std::uint64_t kWeights = 10;
inline constexpr std::uint64_t kAlgorithm = 11;
inline constexpr std::uint64_t kTrialBase = 0x1000;
}  // namespace stream

/// Deterministic RNG wrapper. All distributions are hand-rolled on top of
/// mt19937_64 so sequences do not depend on the standard library's
/// implementation-defined distribution algorithms.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform_double() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    assert(lo <= hi);
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(gen_());  // full range
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % range);
  }

  bool bernoulli(double p) { return uniform_double() < p; }

  /// Binomial(n, p) as the count of n independent coins.
  int binomial_count(int n, double p) {
    int x = 0;
    for (int i = 0; i < n; ++i)
      if (bernoulli(p)) ++x;
    return x;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j =
          static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    shuffle(p);
    return p;
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace matsec
