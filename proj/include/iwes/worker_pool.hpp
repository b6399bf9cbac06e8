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

#ifndef IWES_WORKER_POOL_HPP
#define IWES_WORKER_POOL_HPP

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <vector>

#include <iwes/environments.hpp>
#include <iwes/noise_table.hpp>

namespace iwes {

enum class TaskKind { kRollout, kWeightChunk };

/// What the master hands a worker: a contiguous index span of the batch and
/// the parameter version it was broadcast with. Only indices and seeds cross
/// the boundary, never noise vectors.
struct TaskSpec {
  TaskKind kind = TaskKind::kRollout;
  std::uint64_t param_version = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::uint64_t episode_seed_base = 0;
};

/// What a worker sends back: one scalar per index (a return or a log weight).
struct TaskResult {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<double> values;
  std::uint64_t env_steps = 0;
};

/// Splits `[0, n)` into `min(n, pool_size)` contiguous spans of length
/// `ceil(n / pool_size)` (the last one possibly shorter).
std::vector<TaskSpec> plan_tasks(TaskKind kind, std::size_t n, std::size_t pool_size, std::uint64_t param_version = 0,
                                 std::uint64_t episode_seed_base = 0);

/// In-process stand-in for a master-worker cluster, backed by OpenMP threads.
/// Tasks must be pure; results always come back in task order.
class WorkerPool {
 public:
  /// `workers == 0` selects the number of available processors.
  explicit WorkerPool(std::size_t workers = 0);

  [[nodiscard]] std::size_t size() const noexcept { return workers_; }
  [[nodiscard]] int threads() const noexcept { return static_cast<int>(workers_); }

  /// Runs `fn` on every task and returns the results indexed like `tasks`.
  /// The first exception thrown by any task is rethrown on the caller.
  std::vector<TaskResult> run(std::span<const TaskSpec> tasks,
                              const std::function<TaskResult(const TaskSpec&)>& fn) const;

 private:
  std::size_t workers_;
};

/// How episode seeds are assigned to the handles of a batch.
enum class EpisodeSeeding {
  /// Handle i plays episode `mix_seed(seed_base, i)`.
  kPerHandle,
  /// Both members of mirrored pair k play episode `mix_seed(seed_base, k)`.
  kPerPair,
};

struct BatchEvaluation {
  std::vector<double> raw_returns;
  std::uint64_t env_steps = 0;
};

/// Episode seed of handle `index`.
std::uint64_t episode_seed(std::uint64_t seed_base, std::size_t index, EpisodeSeeding seeding);

/// Scores every perturbed parameter vector `theta + sigma * sign_i * window_i`
/// on the pool. The result is identical for every pool size.
BatchEvaluation evaluate_batch(const WorkerPool& pool, const Objective& objective, const NoiseTable& table,
                               std::span<const double> theta, std::span<const PerturbationHandle> handles,
                               double sigma, std::uint64_t seed_base,
                               EpisodeSeeding seeding = EpisodeSeeding::kPerHandle, std::uint64_t param_version = 0);

/// Single-threaded reference for `evaluate_batch`.
BatchEvaluation evaluate_batch_serial(const Objective& objective, const NoiseTable& table,
                                      std::span<const double> theta, std::span<const PerturbationHandle> handles,
                                      double sigma, std::uint64_t seed_base,
                                      EpisodeSeeding seeding = EpisodeSeeding::kPerHandle);

/// `out[i] = weight_fn(i)` for `i < n`, computed in WeightChunk tasks on the
/// pool and assembled in index order.
std::vector<double> parallel_map_weights(const WorkerPool& pool, std::size_t n,
                                         const std::function<double(std::size_t)>& weight_fn,
                                         std::uint64_t param_version = 0);

}  // namespace iwes

#endif
