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

#ifndef IWES_IW_ENGINE_HPP
#define IWES_IW_ENGINE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <iwes/es_core.hpp>
#include <iwes/noise_table.hpp>
#include <iwes/worker_pool.hpp>

/**
 * \file
 * \brief Importance weighted reuse of an ES batch.
 *
 * After the ordinary ES step a batch sampled around `theta_t` can drive K more
 * updates. Each one reweights the stored perturbations by the density ratio
 * of the current search distribution N(theta_now, sigma^2 I) to the sampling
 * distribution N(theta_t, sigma^2 I):
 *
 *     log c_i = (|eps_i|^2 - |eps_i - delta|^2) / (2 sigma^2),  delta = theta_now - theta_t
 *
 * clips `c_i` at 1 and forms the self-normalized estimate
 *
 *     g = 1 / (sigma^2 sum_i c_i) * sum_i F_i * (eps_i - delta) * c_i.
 *
 * The Gaussian normalizers cancel because both distributions share sigma.
 */

namespace iwes {

struct IWConfig {
  /// Importance weighted updates after the plain ES update of each batch.
  std::size_t K = 0;
  /// Stop reusing a batch once ESS < ess_min_fraction * n. Zero disables.
  double ess_min_fraction = 0.0;
  /// Skip the update when sum c_i falls below this. Defaults to 1e-8 * n.
  std::optional<double> weight_sum_min;
  /// Weight raw returns instead of the shaped fitness in IW updates.
  bool iw_uses_raw_returns = false;
  /// Zero the Adam moments at the start of every batch.
  bool reset_adam_per_batch = false;

  [[nodiscard]] double weight_sum_threshold(std::size_t n) const {
    return weight_sum_min.value_or(1e-8 * static_cast<double>(n));
  }

  void validate() const;
};

struct ImportanceWeights {
  /// min(1, exp(log c_i)); zero where the log weight was not finite.
  std::vector<double> weights;
  /// Unclipped log weights.
  std::vector<double> log_weights_raw;
  double ess = 0.0;
  double clip_fraction = 0.0;
  double weight_sum = 0.0;
  std::size_t nonfinite = 0;
};

/// Log importance weight of a single perturbation. The squared norm of the
/// stored perturbation comes from the table's prefix sums in O(1); only
/// `|eps - delta|^2` costs O(dim). Throws NumericError if the result is not finite.
double compute_log_weight(PerturbationHandle handle, std::span<const double> theta_t,
                          std::span<const double> theta_now, double sigma, const NoiseTable& table);

/// Weights of every perturbation in `batch` against `theta_now`, computed on
/// the pool. Deterministic for any pool size. Throws DegenerateBatch when all
/// weights are zero.
ImportanceWeights compute_weights(const BatchRecord& batch, std::span<const double> theta_now, double sigma,
                                  const NoiseTable& table, const WorkerPool& pool);

/// Self-normalized importance weighted gradient (ascent direction).
/// `fitness` defaults to the batch's shaped fitness. Throws DegenerateBatch
/// when `sum c_i <= weight_sum_min`.
ParamVector estimate_gradient_iw(const BatchRecord& batch, std::span<const double> theta_now,
                                 const ImportanceWeights& w, const PopulationConfig& cfg, const NoiseTable& table,
                                 double weight_sum_min, std::span<const double> fitness = {}, int threads = 1);

/// (sum c)^2 / sum c^2. Throws DegenerateBatch for all-zero input and
/// std::invalid_argument for empty or negative input.
double effective_sample_size(std::span<const double> weights);

struct UpdateDiag {
  std::size_t update_index = 0;
  double ess = 0.0;
  double clip_fraction = 0.0;
  double grad_norm = 0.0;
  double weight_sum = 0.0;
  bool skipped = false;
  std::string skip_reason;
  std::size_t nonfinite_weights = 0;
  /// Wall time spent computing the weights of this update.
  double weight_ms = 0.0;
};

struct BatchUpdateResult {
  ParamVector theta;
  std::vector<UpdateDiag> updates;
};

/// One plain ES update followed by up to `iw_cfg.K` importance weighted
/// updates, each reweighting the batch against the latest parameters.
///
/// Reuse stops at the first degenerate batch or ESS below the guard; the
/// stopping update is reported with `skipped = true` and leaves theta as is.
BatchUpdateResult run_batch_updates(std::span<const double> theta, const BatchRecord& batch, const IWConfig& iw_cfg,
                                    const PopulationConfig& pop_cfg, OptimizerState& opt, const NoiseTable& table,
                                    const WorkerPool& pool);

}  // namespace iwes

#endif
