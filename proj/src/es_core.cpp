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

#include <iwes/es_core.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <iwes/errors.hpp>
#include <iwes/kernels.hpp>

namespace iwes {

namespace {

void check_finite(std::span<const double> v) {
  for (const double x : v) {
    if (!std::isfinite(x)) {
      throw NumericError("parameter update produced a non-finite value");
    }
  }
}

}  // namespace

void PopulationConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sigma must be a positive finite number");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be a positive finite number");
  }
  if (batch_pairs < 1) {
    throw ConfigError("batch_pairs must be at least 1");
  }
  if (!(l2_coeff >= 0.0)) {
    throw ConfigError("l2_coeff must be non-negative");
  }
  if (optimizer == OptimizerKind::kAdam) {
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
      throw ConfigError("Adam betas must lie in [0, 1)");
    }
    if (!(adam.epsilon > 0.0)) {
      throw ConfigError("Adam epsilon must be positive");
    }
  }
}

std::vector<double> shape_fitness(std::span<const double> raw_returns, FitnessShaping shaping) {
  if (shaping == FitnessShaping::kRaw) {
    return {raw_returns.begin(), raw_returns.end()};
  }
  const std::size_t n = raw_returns.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return raw_returns[a] < raw_returns[b]; });
  std::vector<double> shaped(n, 0.0);
  if (n < 2) {
    return shaped;
  }
  const double denom = static_cast<double>(n - 1);
  for (std::size_t rank = 0; rank < n; ++rank) {
    shaped[order[rank]] = static_cast<double>(rank) / denom - 0.5;
  }
  return shaped;
}

ParamVector estimate_gradient_vanilla(
    const BatchRecord& batch, const PopulationConfig& cfg, const NoiseTable& table, int threads) {
  const std::size_t dim = batch.base_params.size();
  const std::size_t n = batch.size();
  ParamVector grad(dim, 0.0);
  if (n == 0) {
    throw std::invalid_argument("cannot estimate a gradient from an empty batch");
  }
  kernels::omp::accumulate_windows(table, batch.handles, dim, cfg.sigma, batch.shaped_fitness, {}, grad, threads);
  const double scale = 1.0 / (static_cast<double>(n) * cfg.sigma * cfg.sigma);
  for (auto& g : grad) {
    g *= scale;
  }
  return grad;
}

ParamVector apply_update(
    std::span<const double> theta, std::span<const double> grad, OptimizerState& opt, const PopulationConfig& cfg) {
  const std::size_t dim = theta.size();
  if (grad.size() != dim) {
    throw std::invalid_argument("gradient and parameter dimensions differ");
  }
  ParamVector next(theta.begin(), theta.end());
  const double lr = cfg.learning_rate;
  const double l2 = cfg.l2_coeff;

  if (cfg.optimizer == OptimizerKind::kSgd) {
    for (std::size_t j = 0; j < dim; ++j) {
      next[j] = theta[j] + lr * grad[j] - lr * l2 * theta[j];
    }
    check_finite(next);
    ++opt.step_count;
    return next;
  }

  // Moments are committed only once the step is known to be finite.
  ParamVector m = opt.first_moment.size() == dim ? opt.first_moment : ParamVector(dim, 0.0);
  ParamVector v = opt.second_moment.size() == dim ? opt.second_moment : ParamVector(dim, 0.0);
  const auto t = static_cast<double>(opt.step_count + 1);
  const double b1 = cfg.adam.beta1;
  const double b2 = cfg.adam.beta2;
  const double bias1 = 1.0 - std::pow(b1, t);
  const double bias2 = 1.0 - std::pow(b2, t);
  for (std::size_t j = 0; j < dim; ++j) {
    const double g = grad[j] - l2 * theta[j];
    m[j] = b1 * m[j] + (1.0 - b1) * g;
    v[j] = b2 * v[j] + (1.0 - b2) * g * g;
    const double m_hat = m[j] / bias1;
    const double v_hat = v[j] / bias2;
    next[j] = theta[j] + lr * m_hat / (std::sqrt(v_hat) + cfg.adam.epsilon);
  }
  check_finite(next);
  opt.first_moment = std::move(m);
  opt.second_moment = std::move(v);
  ++opt.step_count;
  return next;
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) {
    s += x * x;
  }
  return std::sqrt(s);
}

}  // namespace iwes
