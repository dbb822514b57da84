// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// Portable random streams. The standard distributions are implementation
// defined, so uniform and normal draws are derived here from raw 64-bit
// engine output; identical seeds give identical sequences on every platform.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace catts {

/// SplitMix64 finalizer; also used as a counter-based generator.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a, used to fold string keys into seeds.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Per-index seed for fan-out sampling: base ⊕ index.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return base ^ index;
}

/// Maps 64 random bits to a double in the open interval (0, 1).
constexpr double bits_to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Inverse standard-normal CDF (Acklam's rational approximation, relative
/// error below 1.2e-9). The central region uses only IEEE-exact arithmetic;
/// the tails (p < 0.02425) go through std::log and std::sqrt.
double inverse_normal_cdf(double p);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return bits_to_open_unit(engine_()); }
  double normal() { return inverse_normal_cdf(uniform()); }

  /// Index drawn with probability proportional to weights (all ≥ 0, sum > 0).
  std::size_t weighted_index(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace catts
