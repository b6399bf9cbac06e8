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

#ifndef IWES_EXPERIMENT_HPP
#define IWES_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <iwes/config.hpp>
#include <iwes/environments.hpp>
#include <iwes/es_core.hpp>
#include <iwes/iw_engine.hpp>
#include <iwes/metrics.hpp>
#include <iwes/noise_table.hpp>
#include <iwes/worker_pool.hpp>

namespace iwes {

/// Independent random streams of a run, all derived from the run seed with
/// `mix_seed(seed, stream)`.
enum class Stream : std::uint64_t { kInit = 1, kHandles = 2, kEpisodes = 3, kEval = 4 };

std::uint64_t stream_seed(std::uint64_t run_seed, Stream stream);

struct IterationOutcome {
  std::uint64_t iteration = 0;
  std::uint64_t env_steps = 0;
  std::vector<UpdateDiag> updates;
  double weight_ms = 0.0;
};

/// State of one training run: parameters, optimizer and sampling stream.
/// Each `step()` collects one batch and spends it on one or more updates.
class Trainer {
 public:
  Trainer(const RunConfig& cfg, std::uint64_t seed, const NoiseTable& table, const Objective& objective,
          const WorkerPool& pool);

  IterationOutcome step();

  /// Median return of the current parameters on the run's fixed evaluation episodes.
  [[nodiscard]] PolicyEvaluation evaluate() const;

  [[nodiscard]] const ParamVector& params() const noexcept { return theta_; }
  [[nodiscard]] std::uint64_t iteration() const noexcept { return iteration_; }

 private:
  RunConfig cfg_;
  std::uint64_t seed_;
  const NoiseTable& table_;
  const Objective& objective_;
  const WorkerPool& pool_;
  ParamVector theta_;
  OptimizerState opt_;
  Engine sampler_;
  std::uint64_t iteration_ = 0;
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<IterationLog> log;
  ParamVector final_params;
  /// Parameters after every iteration, when requested.
  std::vector<ParamVector> trajectory;
};

struct TrainOptions {
  bool write_files = true;
  bool record_trajectory = false;
  /// Reuse an existing table instead of building one from the config.
  const NoiseTable* table = nullptr;
};

struct TrainResult {
  std::vector<SeedRun> runs;
  std::vector<AggregateRow> aggregate;
  SummaryRow summary;
};

/// One run for a single seed. Rows go to `writer` when given.
SeedRun run_seed(const RunConfig& cfg, std::uint64_t seed, const NoiseTable& table, const Objective& objective,
                 const WorkerPool& pool, LogWriter* writer = nullptr, bool record_trajectory = false);

/// Runs every configured seed. With `write_files` the out_dir receives
/// `config.echo.json`, `run_<seed>.csv`, `aggregate.csv`, `summary.csv`,
/// `params_final_<seed>.bin` and `params_final.bin` (first seed).
TrainResult train(const RunConfig& cfg, const TrainOptions& options = {});

enum class SweepAxis { kK, kHidden, kLearningRate };

/// Accepts "K", "hidden", "lr" and "learning_rate".
SweepAxis parse_sweep_axis(std::string_view name);
std::string to_string(SweepAxis axis);

/// Copy of `cfg` with the swept field set to `value`.
RunConfig with_axis_value(const RunConfig& cfg, SweepAxis axis, double value);

struct SweepResult {
  std::vector<std::string> labels;
  std::vector<TrainResult> per_value;
  std::vector<SummaryRow> summary;
};

/// One `train()` per value under `out_dir/<axis>_<value>/`, then
/// `out_dir/summary.csv` with steps-to-threshold per value. The threshold is
/// `cfg.threshold` if set, else relative to the baseline curve: the K = 0 entry
/// for a K sweep, the first value otherwise.
SweepResult sweep(const RunConfig& cfg, SweepAxis axis, std::span<const double> values,
                  const TrainOptions& options = {});

struct BenchRow {
  std::size_t hidden = 0;
  std::size_t K = 0;
  std::size_t iterations = 0;
  double median_iteration_ms = 0.0;
  double median_weight_ms = 0.0;
  /// median_iteration_ms over that of K = 0 at the same width.
  double ratio = 0.0;
};

/// Median wall time per training iteration for every (hidden, K) on the
/// pointmass task, normalized by K = 0. Trainers for all K of one width
/// advance in lockstep so that slow drift of the host hits every K alike.
std::vector<BenchRow> bench_throughput(const RunConfig& cfg, std::span<const std::size_t> k_values,
                                       std::span<const std::size_t> hidden_values, std::size_t min_iterations = 20);

void write_bench(const std::filesystem::path& path, std::span<const BenchRow> rows);

}  // namespace iwes

#endif
