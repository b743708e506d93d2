// Copyright (c) 2026 sparse-denoise contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPARSE_DENOISE_RNG_HPP
#define SPARSE_DENOISE_RNG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace sparse_denoise {

/// splitmix64 finalizer; used to derive independent per-item seeds from a
/// master seed without correlation between consecutive items.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random source. Wraps mt19937_64 with explicit conversions
/// so results do not depend on the standard library's distribution
/// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound), bound >= 1. Rejection sampling keeps the
  /// draw unbiased.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal deviate via Box-Muller; one spare value is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform random subset of size `count` from {0, ..., population-1},
  /// returned in ascending order. Partial Fisher-Yates over an index table.
  std::vector<std::int64_t> subset(std::int64_t population, std::int64_t count) {
    std::vector<std::int64_t> pool(static_cast<std::size_t>(population));
    for (std::int64_t i = 0; i < population; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (std::int64_t i = 0; i < count; ++i) {
      const auto j = i + static_cast<std::int64_t>(
                             uniform_below(static_cast<std::uint64_t>(population - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(count));
    std::sort(pool.begin(), pool.end());
    return pool;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sparse_denoise

#endif  // SPARSE_DENOISE_RNG_HPP
