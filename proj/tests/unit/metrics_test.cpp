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
#include <filesystem>
#include <fstream>
#include <limits>

#include <iwes/errors.hpp>
#include <iwes/metrics.hpp>
#include <iwes/rng.hpp>

namespace {

using namespace iwes;
namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("iwes_metrics_" + std::string{::testing::UnitTest::GetInstance()->current_test_info()->name()});
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  fs::path dir;
};

IterationLog random_row(Engine& engine) {
  IterationLog r;
  r.iteration = engine() % 100'000;
  r.update_index = engine() % 8;
  r.train_env_steps_cum = engine();
  r.eval_env_steps_cum = engine() >> 3;
  r.wall_ms_cum = uniform(engine, 0.0, 1e7);
  r.median_eval_return = uniform(engine, -1e3, 1e3) * std::pow(10.0, uniform(engine, -20.0, 20.0));
  r.ess = uniform(engine, 0.0, 256.0);
  r.clip_fraction = uniform01(engine);
  r.grad_norm = std::exp(uniform(engine, -300.0, 300.0));
  r.weight_sum = uniform(engine, 0.0, 256.0);
  r.skipped = (engine() & 1U) != 0;
  return r;
}

TEST(CsvRow, HeaderColumns) {
  EXPECT_EQ(csv_header(),
            "iteration,update_index,train_env_steps_cum,eval_env_steps_cum,wall_ms_cum,median_eval_return,ess,"
            "clip_fraction,grad_norm,weight_sum,skipped");
}

TEST(CsvRow, RoundTripIsExact) {
  Engine engine{1};
  for (int k = 0; k < 10'000; ++k) {
    const auto row = random_row(engine);
    ASSERT_EQ(parse_row(format_row(row)), row) << format_row(row);
  }
  IterationLog extreme;
  extreme.median_eval_return = std::numeric_limits<double>::denorm_min();
  extreme.grad_norm = std::numeric_limits<double>::max();
  extreme.ess = -0.0;
  EXPECT_EQ(parse_row(format_row(extreme)), extreme);
}

TEST(CsvRow, MalformedLinesRaise) {
  EXPECT_THROW(parse_row("1,2,3"), FormatError);
  EXPECT_THROW(parse_row("1,0,0,0,0,0,0,0,0,0,2"), FormatError);
  EXPECT_THROW(parse_row("x,0,0,0,0,0,0,0,0,0,0"), FormatError);
  EXPECT_THROW(parse_row("1,0,0,0,0,0,0,0,0,0,0,7"), FormatError);
  EXPECT_THROW(parse_row("1,0,0,0,0,1.5abc,0,0,0,0,0"), FormatError);
}

TEST_F(TempDir, WriterAndReaderAgree) {
  Engine engine{2};
  std::vector<IterationLog> rows;
  {
    LogWriter writer{dir / "run.csv"};
    for (int k = 0; k < 1000; ++k) {
      rows.push_back(random_row(engine));
      writer.write_row(rows.back());
    }
  }
  EXPECT_EQ(read_log(dir / "run.csv"), rows);
  std::ifstream in{dir / "run.csv"};
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, csv_header());
}

TEST_F(TempDir, ReadLogRejectsWrongHeader) {
  std::ofstream{dir / "bad.csv"} << "iteration,foo\n";
  EXPECT_THROW(read_log(dir / "bad.csv"), FormatError);
  EXPECT_THROW(read_log(dir / "missing.csv"), std::runtime_error);
}

TEST_F(TempDir, ParamsRoundTrip) {
  Engine engine{3};
  for (const std::size_t dim : {0u, 1u, 4674u, 100'000u}) {
    std::vector<double> theta(dim);
    for (auto& x : theta) {
      x = uniform(engine, -1e6, 1e6) * std::pow(10.0, uniform(engine, -100.0, 100.0));
    }
    save_params(dir / "p.bin", theta);
    EXPECT_EQ(load_params(dir / "p.bin"), theta);
    EXPECT_EQ(fs::file_size(dir / "p.bin"), 16 + 8 * dim);
  }
}

TEST_F(TempDir, ParamsLayoutIsLittleEndian) {
  save_params(dir / "p.bin", std::vector<double>{1.0});
  std::ifstream in{dir / "p.bin", std::ios::binary};
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::vector<unsigned char> expected{'I', 'W', 'E', 'S', 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0,
                                            0,   0,   0,   0,   0, 0, 0xF0, 0x3F};
  EXPECT_EQ(bytes, expected);
}

TEST_F(TempDir, CorruptParamsRaise) {
  save_params(dir / "p.bin", std::vector<double>(10, 2.5));
  const auto size = fs::file_size(dir / "p.bin");
  fs::resize_file(dir / "p.bin", size - 3);
  EXPECT_THROW(load_params(dir / "p.bin"), FormatError);

  save_params(dir / "p.bin", std::vector<double>(10, 2.5));
  {
    std::fstream f{dir / "p.bin", std::ios::in | std::ios::out | std::ios::binary};
    f.seekp(0);
    f.put('X');
  }
  EXPECT_THROW(load_params(dir / "p.bin"), FormatError);

  save_params(dir / "p.bin", std::vector<double>(10, 2.5));
  {
    std::fstream f{dir / "p.bin", std::ios::in | std::ios::out | std::ios::binary};
    f.seekp(4);
    f.put(2);
  }
  EXPECT_THROW(load_params(dir / "p.bin"), FormatError);

  std::ofstream{dir / "short.bin"} << "IW";
  EXPECT_THROW(load_params(dir / "short.bin"), FormatError);
}

std::vector<IterationLog> curve(std::initializer_list<std::pair<std::uint64_t, double>> points) {
  std::vector<IterationLog> log;
  std::uint64_t it = 0;
  for (const auto& [steps, ret] : points) {
    IterationLog r;
    r.iteration = it++;
    r.train_env_steps_cum = steps;
    r.median_eval_return = ret;
    log.push_back(r);
  }
  return log;
}

TEST(StepsToThreshold, FirstCrossing) {
  const auto log = curve({{0, -10.0}, {100, -6.0}, {200, -4.0}, {300, -5.0}, {400, -3.0}});
  EXPECT_EQ(steps_to_threshold(log, -4.5), 200u);
  EXPECT_EQ(steps_to_threshold(log, -4.0), 200u);
  EXPECT_EQ(steps_to_threshold(log, -10.0), 0u);
  EXPECT_FALSE(steps_to_threshold(log, -1.0).has_value());
}

TEST(Aggregate, LastRowPerIterationAveragedOverSeeds) {
  auto a = curve({{0, -10.0}, {100, -6.0}});
  auto b = curve({{0, -8.0}, {300, -2.0}});
  IterationLog extra = a.back();  // a second update of iteration 1
  extra.update_index = 1;
  extra.skipped = true;
  a.push_back(extra);
  const std::vector<std::vector<IterationLog>> logs{a, b};
  const auto agg = aggregate_logs(logs);
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].iteration, 0u);
  EXPECT_DOUBLE_EQ(agg[0].median_eval_return, -9.0);
  EXPECT_DOUBLE_EQ(agg[0].updates_performed, 0.0);
  EXPECT_DOUBLE_EQ(agg[1].train_env_steps_cum, 200.0);
  EXPECT_DOUBLE_EQ(agg[1].median_eval_return, -4.0);
  EXPECT_DOUBLE_EQ(agg[1].updates_performed, 1.0);
}

TEST(Summary, CensoredSeedsCountFullBudget) {
  const auto a = curve({{0, -10.0}, {100, -6.0}, {200, -1.0}});
  const auto b = curve({{0, -10.0}, {100, -9.0}, {200, -8.0}});
  const std::vector<std::vector<IterationLog>> logs{a, b};
  const auto s = summarize("K", "2", logs, -5.0);
  EXPECT_EQ(s.seeds, 2u);
  EXPECT_EQ(s.seeds_reached, 1u);
  EXPECT_DOUBLE_EQ(s.mean_steps_to_threshold, (200.0 + 200.0) / 2.0);
  EXPECT_DOUBLE_EQ(s.final_median_return_mean, -4.5);
}

TEST(RelativeThreshold, FractionOfImprovement) {
  std::vector<AggregateRow> rows(3);
  rows[0].median_eval_return = -20.0;
  rows[1].median_eval_return = -5.0;
  rows[2].median_eval_return = -10.0;
  EXPECT_DOUBLE_EQ(relative_threshold(rows, 0.9), -20.0 + 0.9 * 15.0);
  EXPECT_THROW(relative_threshold(std::vector<AggregateRow>{}, 0.9), std::invalid_argument);
}

}  // namespace
