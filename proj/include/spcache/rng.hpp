// Copyright 2026 the spcache authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SPCACHE_RNG_HPP
#define SPCACHE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace spcache {

/// 64-bit avalanche mix (SplitMix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Splittable counter-based random stream.
///
/// A stream is keyed by (seed, s0, s1, s2); the n-th output is a bijective
/// scramble of key + n*gamma (SplitMix64). Replications keyed by their
/// indices therefore own disjoint streams and results never depend on how
/// work is scheduled across threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t s0 = 0,
                     std::uint64_t s1 = 0, std::uint64_t s2 = 0) noexcept
      : state_(mix64(mix64(mix64(mix64(seed) ^ mix64(s0)) ^ mix64(s1)) ^
                     mix64(s2))) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + uniform01() * (hi - lo);
  }

  /// Uniform integer in {0, ..., n-1}, exactly unbiased (Lemire rejection).
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw std::domain_error("uniform_below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      unsigned __int128 m =
          static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
      if (static_cast<std::uint64_t>(m) >= threshold)
        return static_cast<std::uint64_t>(m >> 64);
    }
  }

  /// Poisson sample. Exact: Knuth's product method applied to chunks of the
  /// mean, using Poisson(a+b) = Poisson(a) + Poisson(b). Runtime is O(mean).
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0))
      throw std::domain_error("poisson: mean must be nonnegative");
    std::uint64_t total = 0;
    while (mean > 0.0) {
      const double chunk = mean > 30.0 ? 30.0 : mean;
      mean -= chunk;
      const double limit = std::exp(-chunk);
      double prod = uniform01();
      std::uint64_t n = 0;
      while (prod > limit) {
        ++n;
        prod *= uniform01();
      }
      total += n;
    }
    return total;
  }

  /// Geometric sample on {1, 2, ...} with failure parameter g:
  /// P(N = n) = (1-g) g^(n-1). Exact inversion.
  std::uint64_t geometric_failure(double g) {
    if (g < 0.0 || g >= 1.0)
      throw std::domain_error("geometric_failure: g must be in [0, 1)");
    if (g == 0.0) return 1;
    const double u = uniform01();
    const double n = std::ceil(std::log1p(-u) / std::log(g));
    if (n < 1.0) return 1;
    if (n > 9.0e18) return static_cast<std::uint64_t>(9.0e18);
    return static_cast<std::uint64_t>(n);
  }

 private:
  std::uint64_t state_;
};

}  // namespace spcache

#endif  // SPCACHE_RNG_HPP
