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

#include <gtest/gtest.h>

#include <cmath>

#include <iwes/errors.hpp>
#include <iwes/noise_table.hpp>

#include "support/oracles.hpp"

namespace {

using iwes::NoiseTable;

const NoiseTable& table_1m() {
  static const NoiseTable table = iwes::build_noise_table(7, 1'000'000, 1);
  return table;
}

TEST(NoiseTable, SameSeedSameTable) {
  const auto a = iwes::build_noise_table(7, 100'000, 10);
  const auto b = iwes::build_noise_table(7, 100'000, 10);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a.values()[i], b.values()[i]) << i;
  }
  const auto c = iwes::build_noise_table(8, 100'000, 10);
  EXPECT_NE(a.values()[0], c.values()[0]);
}

TEST(NoiseTable, FirstValuesAreFrozen) {
  // Pins the generator so that a change to it is caught.
  const auto t = iwes::build_noise_table(7, 4, 1);
  EXPECT_EQ(t.values()[0], 0x1.9765fb74c31bep+0);
  EXPECT_EQ(t.values()[1], -0x1.0cb45202c73ddp-1);
  EXPECT_EQ(t.values()[2], 0x1.8e3ca64978f4bp-2);
  EXPECT_EQ(t.values()[3], -0x1.417743bf70936p-2);
  const auto longer = iwes::build_noise_table(7, 10, 1);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(t.values()[i], longer.values()[i]);
  }
}

TEST(NoiseTable, PrefixSumsStartAtZeroAndNeverDecrease) {
  const auto& t = table_1m();
  EXPECT_EQ(t.sq_prefix(0), 0.0);
  for (std::size_t m = 1; m <= t.size(); m += 997) {
    ASSERT_LE(t.sq_prefix(m - 1), t.sq_prefix(m));
  }
}

TEST(NoiseTable, TotalPrefixMatchesDirectSum) {
  const auto& t = table_1m();
  const double direct = iwes::oracle::direct_sq_sum(t.values(), 0, t.size());
  EXPECT_NEAR(t.sq_prefix(t.size()), direct, 1e-9 * direct);
}

TEST(NoiseTable, MomentsOfSeed7) {
  const auto& t = table_1m();
  double mean = 0.0;
  for (const double v : t.values()) {
    mean += v;
  }
  mean /= static_cast<double>(t.size());
  double var = 0.0;
  for (const double v : t.values()) {
    var += (v - mean) * (v - mean);
  }
  var /= static_cast<double>(t.size() - 1);
  EXPECT_NEAR(mean, 0.0, 5e-3);
  EXPECT_NEAR(var, 1.0, 1e-2);
}

TEST(NoiseTable, WindowNormFromPrefix) {
  const auto t = NoiseTable::from_values({3.0, 4.0});
  EXPECT_EQ(iwes::perturbation_sq_norm(t, {0, +1}, 2), 25.0);
  EXPECT_EQ(iwes::perturbation_sq_norm(t, {0, -1}, 2), 25.0);
}

TEST(NoiseTable, PrefixNormMatchesDirectOnRandomWindows) {
  const auto& t = table_1m();
  iwes::Engine engine{12345};
  for (int trial = 0; trial < 1000; ++trial) {
    const auto dim = static_cast<std::size_t>(1 + iwes::uniform_below(engine, 5000));
    const auto offset = static_cast<std::size_t>(iwes::uniform_below(engine, t.size() - dim + 1));
    const double direct = iwes::oracle::direct_sq_sum(t.values(), offset, dim);
    const double fast = t.window_sq_norm(offset, dim);
    ASSERT_NEAR(fast, direct, 1e-9 * direct) << "offset " << offset << " dim " << dim;
  }
}

TEST(NoiseTable, ShortWindowsFarIntoTableKeepPrecision) {
  const auto& t = table_1m();
  for (std::size_t offset = t.size() - 50; offset + 2 <= t.size(); ++offset) {
    const double direct = iwes::oracle::direct_sq_sum(t.values(), offset, 2);
    ASSERT_NEAR(t.window_sq_norm(offset, 2), direct, 1e-9 * direct + 1e-300);
  }
}

TEST(NoiseTable, RejectsTableShorterThanModel) {
  EXPECT_THROW(iwes::build_noise_table(1, 9, 10), iwes::ConfigError);
  EXPECT_THROW(iwes::build_noise_table(1, 10, 0), iwes::ConfigError);
  EXPECT_NO_THROW(iwes::build_noise_table(1, 10, 10));
}

TEST(NoiseTable, WindowOutOfRangeThrows) {
  const auto t = iwes::build_noise_table(1, 100, 10);
  EXPECT_NO_THROW((void)t.window(90, 10));
  EXPECT_THROW((void)t.window(91, 10), std::out_of_range);
}

TEST(SampleHandles, OnePairIsMirrored) {
  const auto t = iwes::build_noise_table(3, 1000, 10);
  iwes::Engine engine{1};
  const auto h = iwes::sample_handles(engine, t, 1, 10);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].offset, h[1].offset);
  EXPECT_EQ(h[0].sign, +1);
  EXPECT_EQ(h[1].sign, -1);
}

TEST(SampleHandles, ZeroPairsIsEmpty) {
  const auto t = iwes::build_noise_table(3, 1000, 10);
  iwes::Engine engine{1};
  EXPECT_TRUE(iwes::sample_handles(engine, t, 0, 10).empty());
}

TEST(SampleHandles, UnmirroredAllPositive) {
  const auto t = iwes::build_noise_table(3, 1000, 10);
  iwes::Engine engine{1};
  const auto h = iwes::sample_handles(engine, t, 5, 10, false);
  ASSERT_EQ(h.size(), 5u);
  for (const auto& x : h) {
    EXPECT_EQ(x.sign, +1);
  }
}

TEST(SampleHandles, NeverOutOfBounds) {
  iwes::Engine engine{99};
  for (int trial = 0; trial < 200; ++trial) {
    const auto length = static_cast<std::size_t>(1 + iwes::uniform_below(engine, 300));
    const auto dim = static_cast<std::size_t>(1 + iwes::uniform_below(engine, length));
    const auto t = iwes::build_noise_table(static_cast<std::uint64_t>(trial), length, dim);
    for (const auto& h : iwes::sample_handles(engine, t, 20, dim)) {
      ASSERT_TRUE(t.valid(h.offset, dim));
      ASSERT_LE(h.offset + dim, t.size());
    }
  }
}

TEST(SampleHandles, CoversEveryOffsetWhenTableIsTight) {
  // L - dim + 1 = 4 valid offsets; all should show up.
  const auto t = iwes::build_noise_table(3, 13, 10);
  iwes::Engine engine{5};
  std::array<int, 4> hits{};
  for (const auto& h : iwes::sample_handles(engine, t, 400, 10, false)) {
    ASSERT_LT(h.offset, 4u);
    ++hits[h.offset];
  }
  for (const int c : hits) {
    EXPECT_GT(c, 60);
  }
}

}  // namespace
