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

#include <filesystem>
#include <fstream>

#include <iwes/errors.hpp>
#include <iwes/experiment.hpp>

namespace {

using namespace iwes;
namespace fs = std::filesystem;

RunConfig small_pointmass() {
  RunConfig cfg;
  cfg.noise_table_len = 200'000;
  cfg.population.batch_pairs = 4;
  cfg.population.learning_rate = 1e-2;
  cfg.horizon = 10;
  cfg.n_eval = 3;
  cfg.iterations = 3;
  cfg.seeds = {0};
  cfg.workers = 2;
  return cfg;
}

RunConfig small_sphere() {
  RunConfig cfg;
  cfg.objective = "sphere";
  cfg.dim = 10;
  cfg.noise_table_len = 10'000;
  cfg.population.batch_pairs = 16;
  cfg.population.sigma = 0.1;
  cfg.population.learning_rate = 0.05;
  cfg.n_eval = 1;
  cfg.iterations = 60;
  cfg.seeds = {0, 1};
  cfg.workers = 1;
  return cfg;
}

TrainOptions in_memory() {
  TrainOptions o;
  o.write_files = false;
  return o;
}

TEST(Experiment, ZeroIterationsLogsOnlyTheStartingPoint) {
  auto cfg = small_pointmass();
  cfg.iterations = 0;
  const auto result = train(cfg, in_memory());
  ASSERT_EQ(result.runs.size(), 1u);
  const auto& run = result.runs[0];
  ASSERT_EQ(run.log.size(), 1u);
  EXPECT_EQ(run.log[0].iteration, 0u);
  EXPECT_EQ(run.log[0].train_env_steps_cum, 0u);
  EXPECT_EQ(run.log[0].eval_env_steps_cum, 30u);
  const auto objective = make_objective(cfg);
  EXPECT_EQ(run.final_params, objective->initial_params(stream_seed(0, Stream::kInit)));
}

TEST(Experiment, EnvironmentStepAccounting) {
  auto cfg = small_pointmass();
  cfg.iw.K = 2;
  const auto result = train(cfg, in_memory());
  const auto& log = result.runs[0].log;
  for (const auto& row : log) {
    EXPECT_EQ(row.train_env_steps_cum, row.iteration * 2 * 4 * 10);
    EXPECT_EQ(row.eval_env_steps_cum, (row.iteration + 1) * 3 * 10);
  }
  EXPECT_EQ(log.back().iteration, 3u);
  EXPECT_GE(log.size(), 1u + 3u);
  EXPECT_LE(log.size(), 1u + 3u * 3u);
}

TEST(Experiment, RowsPerIterationFollowK) {
  auto cfg = small_pointmass();
  cfg.iw.K = 2;
  cfg.population.learning_rate = 1e-6;
  const auto log = train(cfg, in_memory()).runs[0].log;
  ASSERT_EQ(log.size(), 1u + 3u * 3u);
  for (std::size_t t = 1; t <= 3; ++t) {
    for (std::size_t u = 0; u < 3; ++u) {
      const auto& row = log[1 + (t - 1) * 3 + u];
      EXPECT_EQ(row.iteration, t);
      EXPECT_EQ(row.update_index, u);
      EXPECT_FALSE(row.skipped);
    }
  }
}

TEST(Experiment, LogEverySkipsEvaluations) {
  auto cfg = small_pointmass();
  cfg.iterations = 4;
  cfg.log_every = 2;
  const auto log = train(cfg, in_memory()).runs[0].log;
  ASSERT_EQ(log.size(), 3u);
  EXPECT_EQ(log[1].iteration, 2u);
  EXPECT_EQ(log[2].iteration, 4u);
  EXPECT_EQ(log[2].train_env_steps_cum, 4u * 2 * 4 * 10);
  EXPECT_EQ(log[2].eval_env_steps_cum, 3u * 3 * 10);
}

TEST(Experiment, RerunIsBitIdentical) {
  auto cfg = small_pointmass();
  cfg.iw.K = 3;
  const auto a = train(cfg, in_memory());
  const auto b = train(cfg, in_memory());
  EXPECT_EQ(a.runs[0].final_params, b.runs[0].final_params);
  ASSERT_EQ(a.runs[0].log.size(), b.runs[0].log.size());
  for (std::size_t k = 0; k < a.runs[0].log.size(); ++k) {
    auto ra = a.runs[0].log[k];
    auto rb = b.runs[0].log[k];
    ra.wall_ms_cum = rb.wall_ms_cum = 0.0;
    EXPECT_EQ(ra, rb);
  }
}

TEST(Experiment, WorkerCountDoesNotChangeResults) {
  auto cfg = small_pointmass();
  cfg.iw.K = 2;
  std::vector<ParamVector> finals;
  for (const std::size_t workers : {1u, 3u, 8u}) {
    cfg.workers = workers;
    finals.push_back(train(cfg, in_memory()).runs[0].final_params);
  }
  EXPECT_EQ(finals[0], finals[1]);
  EXPECT_EQ(finals[0], finals[2]);
}

TEST(Experiment, ParallelSeedsMatchSequential) {
  auto cfg = small_sphere();
  cfg.iterations = 5;
  cfg.seeds = {3, 4, 5};
  const auto sequential = train(cfg, in_memory());
  cfg.parallel_seeds = true;
  const auto parallel = train(cfg, in_memory());
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(sequential.runs[k].seed, parallel.runs[k].seed);
    EXPECT_EQ(sequential.runs[k].final_params, parallel.runs[k].final_params);
  }
}

TEST(Experiment, KZeroEqualsPlainEs) {
  auto cfg = small_pointmass();
  cfg.iterations = 4;
  TrainOptions opts = in_memory();
  opts.record_trajectory = true;
  const auto iw = train(cfg, opts);
  cfg.algorithm = Algorithm::kEs;
  const auto es = train(cfg, opts);
  EXPECT_EQ(iw.runs[0].trajectory, es.runs[0].trajectory);
  ASSERT_EQ(iw.runs[0].trajectory.size(), 4u);
}

TEST(Experiment, SphereImproves) {
  const auto result = train(small_sphere(), in_memory());
  for (const auto& run : result.runs) {
    EXPECT_GT(run.log.back().median_eval_return, 0.5 * run.log.front().median_eval_return);
  }
  EXPECT_GT(result.aggregate.back().median_eval_return, result.aggregate.front().median_eval_return);
}

class ExperimentFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("iwes_experiment_" + std::string{::testing::UnitTest::GetInstance()->current_test_info()->name()});
    fs::remove_all(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  fs::path dir;
};

TEST_F(ExperimentFiles, TrainWritesArtifacts) {
  auto cfg = small_sphere();
  cfg.iterations = 5;
  cfg.out_dir = dir;
  const auto result = train(cfg);
  for (const char* name : {"config.echo.json", "run_0.csv", "run_1.csv", "params_final_0.bin", "params_final_1.bin",
                           "params_final.bin", "aggregate.csv", "summary.csv"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  EXPECT_EQ(read_log(dir / "run_1.csv"), result.runs[1].log);
  EXPECT_EQ(load_params(dir / "params_final_1.bin"), result.runs[1].final_params);
  EXPECT_EQ(load_params(dir / "params_final.bin"), result.runs[0].final_params);
  const auto echoed = config_from_json(read_config_file(dir / "config.echo.json"));
  EXPECT_EQ(config_to_json(echoed), config_to_json(cfg));
}

TEST_F(ExperimentFiles, SweepBookkeeping) {
  auto cfg = small_sphere();
  cfg.iterations = 10;
  cfg.out_dir = dir;
  const std::vector<double> values{0, 2};
  const auto result = sweep(cfg, SweepAxis::kK, values);
  ASSERT_EQ(result.summary.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "K_0" / "run_0.csv"));
  EXPECT_TRUE(fs::exists(dir / "K_2" / "aggregate.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));
  EXPECT_EQ(result.summary[0].axis, "K");
  EXPECT_EQ(result.summary[1].value, "2");
  EXPECT_EQ(result.summary[0].threshold, result.summary[1].threshold);
  EXPECT_EQ(result.summary[0].threshold, relative_threshold(result.per_value[0].aggregate, 0.9));
  EXPECT_EQ(result.summary[0].seeds, 2u);
  // K = 2 logs three rows per iteration.
  EXPECT_GT(result.per_value[1].runs[0].log.size(), result.per_value[0].runs[0].log.size());
}

TEST(Sweep, AxisParsingAndValues) {
  EXPECT_EQ(parse_sweep_axis("K"), SweepAxis::kK);
  EXPECT_EQ(parse_sweep_axis("hidden"), SweepAxis::kHidden);
  EXPECT_EQ(parse_sweep_axis("lr"), SweepAxis::kLearningRate);
  EXPECT_THROW(parse_sweep_axis("sigma"), ConfigError);
  const auto cfg = small_pointmass();
  EXPECT_EQ(with_axis_value(cfg, SweepAxis::kK, 5).iw.K, 5u);
  EXPECT_EQ(with_axis_value(cfg, SweepAxis::kHidden, 256).hidden, 256u);
  EXPECT_EQ(with_axis_value(cfg, SweepAxis::kLearningRate, 0.5).population.learning_rate, 0.5);
  EXPECT_THROW(with_axis_value(cfg, SweepAxis::kK, 1.5), ConfigError);
  EXPECT_THROW(with_axis_value(cfg, SweepAxis::kHidden, 100), ConfigError);
}

TEST(Bench, RowsAndBaselineRatio) {
  auto cfg = small_pointmass();
  cfg.iterations = 1;
  const std::vector<std::size_t> ks{2};
  const std::vector<std::size_t> hs{64};
  const auto rows = bench_throughput(cfg, ks, hs, 2);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].K, 2u);
  EXPECT_EQ(rows[0].hidden, 64u);
  EXPECT_EQ(rows[0].iterations, 2u);
  EXPECT_GT(rows[0].ratio, 0.0);
  EXPECT_GT(rows[0].median_weight_ms, 0.0);
}

}  // namespace
