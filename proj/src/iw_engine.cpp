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

#include <iwes/iw_engine.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <iwes/errors.hpp>
#include <iwes/kernels.hpp>

namespace iwes {

void IWConfig::validate() const {
  if (!(ess_min_fraction >= 0.0 && ess_min_fraction <= 1.0)) {
    throw ConfigError("ess_min_fraction must lie in [0, 1]");
  }
  if (weight_sum_min && !(*weight_sum_min > 0.0)) {
    throw ConfigError("weight_sum_min must be positive");
  }
}

namespace {

std::vector<double> drift(std::span<const double> theta_t, std::span<const double> theta_now) {
  if (theta_t.size() != theta_now.size()) {
    throw std::invalid_argument("parameter dimensions differ");
  }
  std::vector<double> delta(theta_t.size());
  for (std::size_t j = 0; j < delta.size(); ++j) {
    delta[j] = theta_now[j] - theta_t[j];
  }
  return delta;
}

// With no drift the two distributions coincide. The prefix-sum norm and the
// direct norm can differ in the last bit, so this case is answered exactly.
bool no_drift(std::span<const double> delta) {
  return std::all_of(delta.begin(), delta.end(), [](double x) { return x == 0.0; });
}

}  // namespace

double compute_log_weight(PerturbationHandle handle, std::span<const double> theta_t,
                          std::span<const double> theta_now, double sigma, const NoiseTable& table) {
  const auto delta = drift(theta_t, theta_now);
  if (no_drift(delta)) {
    return 0.0;
  }
  const std::size_t dim = delta.size();
  const double lw = kernels::log_weight(table.window(handle.offset, dim), handle.sign, sigma, delta,
                                        perturbation_sq_norm(table, handle, dim));
  if (!std::isfinite(lw)) {
    throw NumericError("non-finite log importance weight");
  }
  return lw;
}

double effective_sample_size(std::span<const double> weights) {
  if (weights.empty()) {
    throw std::invalid_argument("effective sample size of an empty weight vector");
  }
  double largest = 0.0;
  for (const double c : weights) {
    if (!(c >= 0.0)) {
      throw std::invalid_argument("importance weights must be non-negative");
    }
    largest = std::max(largest, c);
  }
  if (largest == 0.0) {
    throw DegenerateBatch("all importance weights are zero");
  }
  // Rescaling by the largest weight keeps c^2 from underflowing.
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const double c : weights) {
    const double r = c / largest;
    sum += r;
    sum_sq += r * r;
  }
  return sum * sum / sum_sq;
}

ImportanceWeights compute_weights(const BatchRecord& batch, std::span<const double> theta_now, double sigma,
                                  const NoiseTable& table, const WorkerPool& pool) {
  const std::size_t n = batch.size();
  if (n == 0) {
    throw std::invalid_argument("cannot weight an empty batch");
  }
  const auto delta = drift(batch.base_params, theta_now);
  const std::size_t dim = delta.size();
  const double* noise = table.values().data();

  ImportanceWeights out;
  if (no_drift(delta)) {
    out.log_weights_raw.assign(n, 0.0);
  } else {
    out.log_weights_raw = parallel_map_weights(pool, n, [&](std::size_t i) {
      const auto& h = batch.handles[i];
      return kernels::log_weight({noise + h.offset, dim}, h.sign, sigma, delta, perturbation_sq_norm(table, h, dim));
    });
  }

  out.weights.resize(n);
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lw = out.log_weights_raw[i];
    if (!std::isfinite(lw)) {
      out.weights[i] = 0.0;
      ++out.nonfinite;
      continue;
    }
    if (lw > 0.0) {
      ++clipped;
    }
    out.weights[i] = std::min(1.0, std::exp(lw));
    out.weight_sum += out.weights[i];
  }
  out.clip_fraction = static_cast<double>(clipped) / static_cast<double>(n);
  out.ess = effective_sample_size(out.weights);
  return out;
}

ParamVector estimate_gradient_iw(const BatchRecord& batch, std::span<const double> theta_now,
                                 const ImportanceWeights& w, const PopulationConfig& cfg, const NoiseTable& table,
                                 double weight_sum_min, std::span<const double> fitness, int threads) {
  const std::size_t n = batch.size();
  if (fitness.empty()) {
    fitness = batch.shaped_fitness;
  }
  if (w.weights.size() != n || fitness.size() != n) {
    throw std::invalid_argument("weights, fitness and batch sizes differ");
  }
  double weight_sum = 0.0;
  for (const double c : w.weights) {
    weight_sum += c;
  }
  if (!(weight_sum > weight_sum_min)) {
    throw DegenerateBatch("importance weight sum " + std::to_string(weight_sum) + " is below " +
                          std::to_string(weight_sum_min));
  }
  const auto delta = drift(batch.base_params, theta_now);
  std::vector<double> coef(n);
  for (std::size_t i = 0; i < n; ++i) {
    coef[i] = fitness[i] * w.weights[i];
  }
  ParamVector grad(delta.size(), 0.0);
  kernels::omp::accumulate_windows(table, batch.handles, delta.size(), cfg.sigma, coef, delta, grad, threads);
  const double scale = 1.0 / (cfg.sigma * cfg.sigma * weight_sum);
  for (auto& g : grad) {
    g *= scale;
  }
  return grad;
}

BatchUpdateResult run_batch_updates(std::span<const double> theta, const BatchRecord& batch, const IWConfig& iw_cfg,
                                    const PopulationConfig& pop_cfg, OptimizerState& opt, const NoiseTable& table,
                                    const WorkerPool& pool) {
  const std::size_t n = batch.size();
  if (iw_cfg.reset_adam_per_batch) {
    opt.reset();
  }

  BatchUpdateResult result;
  const auto grad = estimate_gradient_vanilla(batch, pop_cfg, table, pool.threads());
  result.theta = apply_update(theta, grad, opt, pop_cfg);
  UpdateDiag first;
  first.ess = static_cast<double>(n);
  first.grad_norm = l2_norm(grad);
  first.weight_sum = static_cast<double>(n);
  result.updates.push_back(first);

  const std::span<const double> fitness =
      iw_cfg.iw_uses_raw_returns ? std::span<const double>{batch.raw_returns} : std::span<const double>{};
  const double sum_min = iw_cfg.weight_sum_threshold(n);

  for (std::size_t k = 1; k <= iw_cfg.K; ++k) {
    UpdateDiag diag;
    diag.update_index = k;
    try {
      const auto started = std::chrono::steady_clock::now();
      const auto w = compute_weights(batch, result.theta, pop_cfg.sigma, table, pool);
      diag.weight_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
      diag.ess = w.ess;
      diag.clip_fraction = w.clip_fraction;
      diag.weight_sum = w.weight_sum;
      diag.nonfinite_weights = w.nonfinite;
      if (iw_cfg.ess_min_fraction > 0.0 && w.ess < iw_cfg.ess_min_fraction * static_cast<double>(n)) {
        diag.skipped = true;
        diag.skip_reason = "ess";
        result.updates.push_back(diag);
        break;
      }
      const auto g = estimate_gradient_iw(batch, result.theta, w, pop_cfg, table, sum_min, fitness, pool.threads());
      diag.grad_norm = l2_norm(g);
      result.theta = apply_update(result.theta, g, opt, pop_cfg);
      result.updates.push_back(diag);
    } catch (const DegenerateBatch&) {
      diag.skipped = true;
      diag.skip_reason = "degenerate";
      result.updates.push_back(diag);
      break;
    } catch (const NumericError&) {
      diag.skipped = true;
      diag.skip_reason = "numeric";
      result.updates.push_back(diag);
      break;
    }
  }
  return result;
}

}  // namespace iwes
