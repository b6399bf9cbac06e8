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

#include <iwes/environments.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <iwes/errors.hpp>
#include <iwes/rng.hpp>

namespace iwes {

std::vector<double> Objective::initial_params(std::uint64_t seed) const {
  Engine engine{seed};
  std::vector<double> params(dim());
  for (std::size_t j = 0; j < params.size(); j += 2) {
    double z0 = 0.0;
    double z1 = 0.0;
    standard_normal_pair(engine, z0, z1);
    params[j] = z0;
    if (j + 1 < params.size()) {
      params[j + 1] = z1;
    }
  }
  return params;
}

namespace {

template <class F>
class FunctionObjective final : public Objective {
 public:
  FunctionObjective(std::string name, std::size_t dim, F f) : name_{std::move(name)}, dim_{dim}, f_{f} {
    if (dim == 0) {
      throw ConfigError(name_ + ": dim must be at least 1");
    }
  }

  EpisodeResult evaluate(std::span<const double> params, std::uint64_t) const override {
    if (params.size() != dim_) {
      throw std::invalid_argument(name_ + ": parameter dimension mismatch");
    }
    return {-f_(params), 1};
  }
  [[nodiscard]] std::size_t dim() const override { return dim_; }
  [[nodiscard]] bool deterministic() const override { return true; }
  [[nodiscard]] std::string name() const override { return name_; }

 private:
  std::string name_;
  std::size_t dim_;
  F f_;
};

template <class F>
std::unique_ptr<Objective> make_function(std::string name, std::size_t dim, F f) {
  return std::make_unique<FunctionObjective<F>>(std::move(name), dim, f);
}

}  // namespace

std::unique_ptr<Objective> sphere(std::size_t dim) {
  return make_function("sphere", dim, [](std::span<const double> x) {
    double s = 0.0;
    for (const double v : x) {
      s += v * v;
    }
    return s;
  });
}

std::unique_ptr<Objective> rastrigin(std::size_t dim) {
  return make_function("rastrigin", dim, [](std::span<const double> x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (const double v : x) {
      s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    }
    return s;
  });
}

std::unique_ptr<Objective> rosenbrock(std::size_t dim) {
  return make_function("rosenbrock", dim, [](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double b = 1.0 - x[i];
      s += 100.0 * a * a + b * b;
    }
    return s;
  });
}

std::array<double, 2> PointMassEnv::sample_goal(std::uint64_t episode_seed) {
  Engine engine{episode_seed};
  const double gx = uniform(engine, -1.0, 1.0);
  const double gy = uniform(engine, -1.0, 1.0);
  return {gx, gy};
}

MlpPolicy::MlpPolicy(std::size_t hidden) : hidden_{hidden} {
  if (hidden == 0) {
    throw ConfigError("hidden width must be at least 1");
  }
}

std::array<double, 2> MlpPolicy::act(std::span<const double> params, const std::array<double, 4>& obs,
                                     std::span<double> scratch) const {
  const std::size_t h = hidden_;
  const double* p = params.data();
  double* h1 = scratch.data();
  double* h2 = scratch.data() + h;

  const double* w1 = p;
  const double* b1 = w1 + kObsDim * h;
  for (std::size_t r = 0; r < h; ++r) {
    const double* row = w1 + r * kObsDim;
    double z = b1[r];
    for (std::size_t c = 0; c < kObsDim; ++c) {
      z += row[c] * obs[c];
    }
    h1[r] = std::tanh(z);
  }

  const double* w2 = b1 + h;
  const double* b2 = w2 + h * h;
  for (std::size_t r = 0; r < h; ++r) {
    const double* row = w2 + r * h;
    double z = b2[r];
    for (std::size_t c = 0; c < h; ++c) {
      z += row[c] * h1[c];
    }
    h2[r] = std::tanh(z);
  }

  const double* w3 = b2 + h;
  const double* b3 = w3 + kActDim * h;
  std::array<double, 2> action{};
  for (std::size_t r = 0; r < kActDim; ++r) {
    const double* row = w3 + r * h;
    double z = b3[r];
    for (std::size_t c = 0; c < h; ++c) {
      z += row[c] * h2[c];
    }
    action[r] = z;
  }
  return action;
}

std::vector<double> MlpPolicy::initial_params(std::uint64_t seed) const {
  Engine engine{seed};
  std::vector<double> params(param_count(), 0.0);
  auto fill_normal = [&](std::size_t begin, std::size_t count, double stddev) {
    for (std::size_t k = 0; k < count; k += 2) {
      double z0 = 0.0;
      double z1 = 0.0;
      standard_normal_pair(engine, z0, z1);
      params[begin + k] = stddev * z0;
      if (k + 1 < count) {
        params[begin + k + 1] = stddev * z1;
      }
    }
  };
  const std::size_t h = hidden_;
  const auto fan = [](std::size_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); };
  std::size_t at = 0;
  fill_normal(at, kObsDim * h, fan(kObsDim));
  at += kObsDim * h + h;
  fill_normal(at, h * h, fan(h));
  at += h * h + h;
  fill_normal(at, kActDim * h, 0.01 * fan(h));
  return params;
}

EpisodeResult rollout(const PointMassEnv& env, const MlpPolicy& policy, std::span<const double> params,
                      std::uint64_t episode_seed) {
  if (params.size() != policy.param_count()) {
    throw std::invalid_argument("rollout: parameter dimension mismatch");
  }
  const auto goal = PointMassEnv::sample_goal(episode_seed);
  std::vector<double> scratch(2 * policy.hidden());
  std::array<double, 2> pos{0.0, 0.0};
  std::array<double, 2> vel{0.0, 0.0};
  double ret = 0.0;
  for (std::size_t t = 0; t < env.horizon; ++t) {
    const std::array<double, 4> obs{goal[0] - pos[0], goal[1] - pos[1], vel[0], vel[1]};
    const auto action = policy.act(params, obs, scratch);
    for (std::size_t k = 0; k < 2; ++k) {
      if (!std::isfinite(action[k])) {
        throw NumericError("rollout: non-finite action at step " + std::to_string(t));
      }
      vel[k] = 0.9 * vel[k] + 0.1 * std::clamp(action[k], -1.0, 1.0);
      pos[k] = pos[k] + 0.1 * vel[k];
    }
    const double dx = pos[0] - goal[0];
    const double dy = pos[1] - goal[1];
    ret += -(dx * dx + dy * dy);
  }
  return {ret, env.horizon};
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("median of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) {
    return values[n / 2];
  }
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

PolicyEvaluation evaluate_policy_median(const Objective& objective, std::span<const double> params,
                                        std::size_t n_eval, std::uint64_t seed_base, int threads) {
  if (n_eval == 0) {
    throw std::invalid_argument("n_eval must be at least 1");
  }
  std::vector<double> returns(n_eval);
  std::vector<std::uint64_t> steps(n_eval);
  const auto n = static_cast<std::ptrdiff_t>(n_eval);
  std::exception_ptr failure;
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      const auto r = objective.evaluate(params, mix_seed(seed_base, static_cast<std::uint64_t>(k)));
      returns[static_cast<std::size_t>(k)] = r.ret;
      steps[static_cast<std::size_t>(k)] = r.steps;
    } catch (...) {
#pragma omp critical(iwes_eval_failure)
      if (!failure) {
        failure = std::current_exception();
      }
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  PolicyEvaluation out;
  for (const auto s : steps) {
    out.steps += s;
  }
  out.median_return = median(std::move(returns));
  return out;
}

}  // namespace iwes
