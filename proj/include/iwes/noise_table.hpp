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

#ifndef IWES_NOISE_TABLE_HPP
#define IWES_NOISE_TABLE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <iwes/rng.hpp>

namespace iwes {

/// One perturbation: `sigma * sign * table[offset, offset + dim)`.
struct PerturbationHandle {
  std::size_t offset = 0;
  int sign = 1;

  friend bool operator==(const PerturbationHandle&, const PerturbationHandle&) = default;
};

/// A large block of standard normal noise shared read-only by every worker.
///
/// Perturbations are windows into the block, so tasks exchange offsets rather
/// than vectors. Alongside the values the table keeps prefix sums of squares,
/// which turns the squared norm of any window into an O(1) lookup. The prefix
/// sums are carried as an unevaluated (hi, lo) pair so that a short window far
/// into a 10^7-entry table keeps full relative precision.
class NoiseTable {
 public:
  /// Name and version of the noise generator. Tables built from the same seed
  /// and length by any implementation of this generator are identical.
  static constexpr std::string_view kGenerator = "mt19937_64/box-muller/v1";

  /// Default table length at desk scale.
  static constexpr std::size_t kDefaultLength = 10'000'000;

  NoiseTable(std::uint64_t seed, std::size_t length);

  /// A table holding exactly `values` (seed 0); for tests and replays.
  static NoiseTable from_values(std::vector<double> values);

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  /// The raw (unsigned, unscaled) noise window `[offset, offset + dim)`.
  [[nodiscard]] std::span<const double> window(std::size_t offset, std::size_t dim) const;

  /// Sum of squares of `values[0, m)`.
  [[nodiscard]] double sq_prefix(std::size_t m) const;

  /// Sum of squares of `values[offset, offset + dim)` in O(1).
  [[nodiscard]] double window_sq_norm(std::size_t offset, std::size_t dim) const;

  /// True when a window of length `dim` starting at `offset` fits in the table.
  [[nodiscard]] bool valid(std::size_t offset, std::size_t dim) const noexcept {
    return dim <= values_.size() && offset <= values_.size() - dim;
  }

 private:
  NoiseTable() = default;
  void build_prefix();

  std::uint64_t seed_ = 0;
  std::vector<double> values_;
  std::vector<double> sq_prefix_hi_;
  std::vector<double> sq_prefix_lo_;
};

/// Builds a table for a model of dimension `model_dim`.
/// Throws ConfigError when `length < model_dim` or `model_dim == 0`.
NoiseTable build_noise_table(std::uint64_t seed, std::size_t length, std::size_t model_dim);

/// Samples perturbation handles with offsets uniform over `[0, L - dim]`.
///
/// With `mirrored` set, returns `2 * count` handles where handles `2k` and
/// `2k + 1` share an offset with signs +1 and -1. Otherwise returns `count`
/// handles, all with sign +1. Offsets of different handles may overlap.
std::vector<PerturbationHandle> sample_handles(
    Engine& engine, const NoiseTable& table, std::size_t count, std::size_t dim, bool mirrored = true);

/// Squared norm of the unscaled window of `handle`; independent of the sign.
inline double perturbation_sq_norm(const NoiseTable& table, PerturbationHandle handle, std::size_t dim) {
  return table.window_sq_norm(handle.offset, dim);
}

}  // namespace iwes

#endif
