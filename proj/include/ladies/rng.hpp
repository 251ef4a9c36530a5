#pragma once

#include "ladies/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace ladies {

/// Deterministic random stream.
///
/// mt19937_64 is bit-exact across platforms, but the standard library
/// distributions are not, so every mapping from raw bits to a draw is done
/// here by hand. Identical seeds therefore give identical draw sequences
/// everywhere, which is what makes sampled plans reproducible byte-for-byte.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix(seed)), seed_material_(mix(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53 random bits.
  Scalar uniform01() {
    return static_cast<Scalar>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  Index uniform_index(Index n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<Index>(x % bound);
  }

  /// Standard normal via Box-Muller (deterministic, unlike
  /// std::normal_distribution).
  Scalar normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    constexpr Scalar kTwoPi = 6.283185307179586476925286766559;
    Scalar u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const Scalar u2 = uniform01();
    const Scalar r = std::sqrt(-2.0 * std::log(u1));
    const Scalar theta = kTwoPi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Independent stream derived from this one's seed and a stream tag.
  /// Children with distinct tags are safe to use concurrently.
  Rng child(std::uint64_t stream) const {
    return Rng(mix(seed_material_ + 0x9e3779b97f4a7c15ULL * (stream + 1)));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer; spreads low-entropy seeds over the full state.
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 gen_;
  std::uint64_t seed_material_ = 0;
  Scalar spare_ = 0.0;
  bool have_spare_ = false;
};

/// k distinct uniform draws from [0, n), via partial Fisher-Yates.
/// Returned in draw order (not sorted).
inline std::vector<Index> sample_without_replacement(Index n, Index k,
                                                     Rng& rng) {
  std::vector<Index> pool(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) pool[static_cast<size_t>(i)] = i;
  if (k > n) k = n;
  for (Index i = 0; i < k; ++i) {
    const Index j = i + rng.uniform_index(n - i);
    std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
  }
  pool.resize(static_cast<size_t>(k));
  return pool;
}

}  // namespace ladies
