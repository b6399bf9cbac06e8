// Copyright 2026 The iwes Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IWES_RNG_HPP
#define IWES_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

/**
 * \file
 * \brief Portable random primitives.
 *
 * Everything that feeds a persisted or compared result goes through these
 * helpers instead of the `<random>` distributions, whose output is
 * implementation-defined. `std::mt19937_64` itself is fully specified by the
 * standard, so the combination is reproducible across standard libraries.
 */

namespace iwes {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives the seed of stream `index` under `base`:
/// `splitmix64(base ^ splitmix64(index))`.
///
/// Used for episode seeds, per-iteration seeds and per-run streams, so a
/// seed never depends on which thread asks for it.
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(base ^ splitmix64(index));
}

using Engine = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform(Engine& engine, double lo, double hi) {
  return lo + (hi - lo) * uniform01(engine);
}

/// Uniform integer in [0, bound) by rejection; unbiased for any bound > 0.
inline std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t x = engine();
  while (x >= limit) {
    x = engine();
  }
  return x % bound;
}

/// Draws two independent standard normals with the Box-Muller transform.
inline void standard_normal_pair(Engine& engine, double& z0, double& z1) {
  // 1 - u keeps the logarithm argument in (0, 1].
  const double u1 = 1.0 - uniform01(engine);
  const double u2 = uniform01(engine);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  z0 = radius * std::cos(angle);
  z1 = radius * std::sin(angle);
}

}  // namespace iwes

#endif
