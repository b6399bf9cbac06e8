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

#ifndef IWES_ES_CORE_HPP
#define IWES_ES_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <iwes/noise_table.hpp>

namespace iwes {

using ParamVector = std::vector<double>;

enum class OptimizerKind { kSgd, kAdam };

enum class FitnessShaping { kCenteredRank, kRaw };

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Search distribution and step rule of the population mean.
struct PopulationConfig {
  double sigma = 0.02;
  /// Mirrored pairs per batch; the batch holds `batch_size()` evaluations.
  std::size_t batch_pairs = 128;
  bool mirrored = true;
  double learning_rate = 1e-4;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  AdamParams adam{};
  double l2_coeff = 0.0;
  FitnessShaping fitness_shaping = FitnessShaping::kCenteredRank;

  /// Number of perturbations per batch: `2 * batch_pairs` when mirrored.
  [[nodiscard]] std::size_t batch_size() const noexcept { return mirrored ? 2 * batch_pairs : batch_pairs; }

  /// Throws ConfigError on a violated invariant.
  void validate() const;
};

/// The evidence of one iteration: where the batch was sampled, which
/// perturbations were drawn and what they scored.
///
/// `base_params` is never modified after the batch is collected; importance
/// weighted updates always measure their drift from it.
struct BatchRecord {
  ParamVector base_params;
  std::vector<PerturbationHandle> handles;
  std::vector<double> raw_returns;
  std::vector<double> shaped_fitness;
  std::uint64_t env_steps = 0;

  [[nodiscard]] std::size_t size() const noexcept { return handles.size(); }
};

struct OptimizerState {
  std::uint64_t step_count = 0;
  ParamVector first_moment;
  ParamVector second_moment;

  void reset() {
    step_count = 0;
    first_moment.assign(first_moment.size(), 0.0);
    second_moment.assign(second_moment.size(), 0.0);
  }
};

/// Centered ranks: the i-th smallest value maps to `i / (n - 1) - 0.5`, ties
/// broken by original index. `kRaw` is the identity.
std::vector<double> shape_fitness(std::span<const double> raw_returns, FitnessShaping shaping);

/// Monte Carlo score-function gradient of the Gaussian-smoothed objective:
///
///     g = 1 / (n sigma^2) * sum_i F_i * eps_i,   eps_i = sigma * sign_i * window_i
///
/// with F the shaped fitness. Returns an ascent direction. Coordinates are
/// reduced in handle order, so the result does not depend on `threads`.
ParamVector estimate_gradient_vanilla(
    const BatchRecord& batch, const PopulationConfig& cfg, const NoiseTable& table, int threads = 1);

/// One ascent step. SGD: `theta + lr * (grad - l2 * theta)`. Adam applies the
/// bias-corrected moment update to the same L2-adjusted direction.
///
/// Throws std::invalid_argument on a shape mismatch and NumericError when the
/// step produces a non-finite parameter.
ParamVector apply_update(
    std::span<const double> theta, std::span<const double> grad, OptimizerState& opt, const PopulationConfig& cfg);

/// Euclidean norm.
double l2_norm(std::span<const double> v);

}  // namespace iwes

#endif
