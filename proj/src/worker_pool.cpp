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

#include <iwes/worker_pool.hpp>

#include <stdexcept>

#include <omp.h>

#include <iwes/rng.hpp>

namespace iwes {

std::vector<TaskSpec> plan_tasks(TaskKind kind, std::size_t n, std::size_t pool_size, std::uint64_t param_version,
                                 std::uint64_t episode_seed_base) {
  std::vector<TaskSpec> tasks;
  if (n == 0) {
    return tasks;
  }
  const std::size_t workers = pool_size == 0 ? 1 : pool_size;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    tasks.push_back({kind, param_version, begin, std::min(n, begin + chunk), episode_seed_base});
  }
  return tasks;
}

WorkerPool::WorkerPool(std::size_t workers)
    : workers_{workers == 0 ? static_cast<std::size_t>(omp_get_num_procs()) : workers} {
  if (workers_ == 0) {
    workers_ = 1;
  }
}

std::vector<TaskResult> WorkerPool::run(std::span<const TaskSpec> tasks,
                                        const std::function<TaskResult(const TaskSpec&)>& fn) const {
  std::vector<TaskResult> results(tasks.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for num_threads(threads()) schedule(dynamic, 1)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    try {
      results[static_cast<std::size_t>(t)] = fn(tasks[static_cast<std::size_t>(t)]);
    } catch (...) {
#pragma omp critical(iwes_pool_failure)
      if (!failure) {
        failure = std::current_exception();
      }
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return results;
}

std::uint64_t episode_seed(std::uint64_t seed_base, std::size_t index, EpisodeSeeding seeding) {
  const std::size_t episode = seeding == EpisodeSeeding::kPerPair ? index / 2 : index;
  return mix_seed(seed_base, static_cast<std::uint64_t>(episode));
}

namespace {

void perturb(std::span<const double> theta, const NoiseTable& table, PerturbationHandle h, double sigma,
             std::vector<double>& out) {
  const auto window = table.window(h.offset, theta.size());
  const double scaled = sigma * static_cast<double>(h.sign);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    out[j] = theta[j] + scaled * window[j];
  }
}

}  // namespace

BatchEvaluation evaluate_batch(const WorkerPool& pool, const Objective& objective, const NoiseTable& table,
                               std::span<const double> theta, std::span<const PerturbationHandle> handles,
                               double sigma, std::uint64_t seed_base, EpisodeSeeding seeding,
                               std::uint64_t param_version) {
  const auto tasks = plan_tasks(TaskKind::kRollout, handles.size(), pool.size(), param_version, seed_base);
  const auto results = pool.run(tasks, [&](const TaskSpec& task) {
    TaskResult result{task.begin, task.end, {}, 0};
    result.values.reserve(task.end - task.begin);
    std::vector<double> perturbed(theta.size());
    for (std::size_t i = task.begin; i < task.end; ++i) {
      perturb(theta, table, handles[i], sigma, perturbed);
      const auto episode = objective.evaluate(perturbed, episode_seed(task.episode_seed_base, i, seeding));
      result.values.push_back(episode.ret);
      result.env_steps += episode.steps;
    }
    return result;
  });

  BatchEvaluation out;
  out.raw_returns.reserve(handles.size());
  for (const auto& r : results) {
    out.raw_returns.insert(out.raw_returns.end(), r.values.begin(), r.values.end());
    out.env_steps += r.env_steps;
  }
  return out;
}

BatchEvaluation evaluate_batch_serial(const Objective& objective, const NoiseTable& table,
                                      std::span<const double> theta, std::span<const PerturbationHandle> handles,
                                      double sigma, std::uint64_t seed_base, EpisodeSeeding seeding) {
  BatchEvaluation out;
  out.raw_returns.reserve(handles.size());
  std::vector<double> perturbed(theta.size());
  for (std::size_t i = 0; i < handles.size(); ++i) {
    perturb(theta, table, handles[i], sigma, perturbed);
    const auto episode = objective.evaluate(perturbed, episode_seed(seed_base, i, seeding));
    out.raw_returns.push_back(episode.ret);
    out.env_steps += episode.steps;
  }
  return out;
}

std::vector<double> parallel_map_weights(const WorkerPool& pool, std::size_t n,
                                         const std::function<double(std::size_t)>& weight_fn,
                                         std::uint64_t param_version) {
  const auto tasks = plan_tasks(TaskKind::kWeightChunk, n, pool.size(), param_version);
  const auto results = pool.run(tasks, [&](const TaskSpec& task) {
    TaskResult result{task.begin, task.end, {}, 0};
    result.values.reserve(task.end - task.begin);
    for (std::size_t i = task.begin; i < task.end; ++i) {
      result.values.push_back(weight_fn(i));
    }
    return result;
  });
  std::vector<double> out;
  out.reserve(n);
  for (const auto& r : results) {
    out.insert(out.end(), r.values.begin(), r.values.end());
  }
  return out;
}

}  // namespace iwes
