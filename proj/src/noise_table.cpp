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

#include <iwes/noise_table.hpp>

#include <string>

#include <iwes/errors.hpp>

namespace iwes {

namespace {

// Knuth's TwoSum: a + b == s + e exactly.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

}  // namespace

NoiseTable::NoiseTable(std::uint64_t seed, std::size_t length)
    : seed_{seed}, values_(length), sq_prefix_hi_(length + 1), sq_prefix_lo_(length + 1) {
  Engine engine{seed};
  std::size_t i = 0;
  for (; i + 1 < length; i += 2) {
    standard_normal_pair(engine, values_[i], values_[i + 1]);
  }
  if (i < length) {
    double spare = 0.0;
    standard_normal_pair(engine, values_[i], spare);
  }
  build_prefix();
}

NoiseTable NoiseTable::from_values(std::vector<double> values) {
  NoiseTable table;
  table.values_ = std::move(values);
  table.sq_prefix_hi_.resize(table.values_.size() + 1);
  table.sq_prefix_lo_.resize(table.values_.size() + 1);
  table.build_prefix();
  return table;
}

void NoiseTable::build_prefix() {
  const std::size_t length = values_.size();
  double hi = 0.0;
  double lo = 0.0;
  sq_prefix_hi_[0] = 0.0;
  sq_prefix_lo_[0] = 0.0;
  for (std::size_t m = 0; m < length; ++m) {
    double s = 0.0;
    double e = 0.0;
    two_sum(hi, values_[m] * values_[m], s, e);
    lo += e;
    two_sum(s, lo, hi, lo);
    sq_prefix_hi_[m + 1] = hi;
    sq_prefix_lo_[m + 1] = lo;
  }
}

std::span<const double> NoiseTable::window(std::size_t offset, std::size_t dim) const {
  if (!valid(offset, dim)) {
    throw std::out_of_range("noise window [" + std::to_string(offset) + ", +" + std::to_string(dim) +
                            ") exceeds table of length " + std::to_string(values_.size()));
  }
  return std::span<const double>{values_}.subspan(offset, dim);
}

double NoiseTable::sq_prefix(std::size_t m) const {
  return sq_prefix_hi_.at(m) + sq_prefix_lo_[m];
}

double NoiseTable::window_sq_norm(std::size_t offset, std::size_t dim) const {
  const std::size_t end = offset + dim;
  return (sq_prefix_hi_[end] - sq_prefix_hi_[offset]) + (sq_prefix_lo_[end] - sq_prefix_lo_[offset]);
}

NoiseTable build_noise_table(std::uint64_t seed, std::size_t length, std::size_t model_dim) {
  if (model_dim == 0) {
    throw ConfigError("model dimension must be positive");
  }
  if (length < model_dim) {
    throw ConfigError("noise_table_len (" + std::to_string(length) + ") is smaller than the model dimension (" +
                      std::to_string(model_dim) + ")");
  }
  return NoiseTable{seed, length};
}

std::vector<PerturbationHandle> sample_handles(
    Engine& engine, const NoiseTable& table, std::size_t count, std::size_t dim, bool mirrored) {
  std::vector<PerturbationHandle> handles;
  handles.reserve(mirrored ? 2 * count : count);
  const std::uint64_t span = table.size() - dim + 1;
  for (std::size_t k = 0; k < count; ++k) {
    const auto offset = static_cast<std::size_t>(uniform_below(engine, span));
    handles.push_back({offset, +1});
    if (mirrored) {
      handles.push_back({offset, -1});
    }
  }
  return handles;
}

}  // namespace iwes
