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

#ifndef IWES_ENVIRONMENTS_HPP
#define IWES_ENVIRONMENTS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace iwes {

struct EpisodeResult {
  double ret = 0.0;
  std::uint64_t steps = 0;
};

/// A black-box score to maximize. Implementations are immutable and safe to
/// evaluate concurrently; the same `(params, episode_seed)` always yields the
/// same result.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual EpisodeResult evaluate(std::span<const double> params, std::uint64_t episode_seed) const = 0;
  [[nodiscard]] virtual std::size_t dim() const = 0;
  [[nodiscard]] virtual bool deterministic() const = 0;
  [[nodiscard]] virtual std::string name() const = 0;

  /// Starting point of a run seeded with `seed`.
  [[nodiscard]] virtual std::vector<double> initial_params(std::uint64_t seed) const;
};

/// -sum x^2. Optimum 0 at the origin.
std::unique_ptr<Objective> sphere(std::size_t dim);
/// -(10 d + sum x^2 - 10 cos(2 pi x)). Optimum 0 at the origin.
std::unique_ptr<Objective> rastrigin(std::size_t dim);
/// -sum 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2. Optimum 0 at all-ones.
std::unique_ptr<Objective> rosenbrock(std::size_t dim);

/// Point mass on the plane chasing a goal drawn per episode.
///
/// Dynamics per step: `v <- 0.9 v + 0.1 clamp(a, -1, 1)`, `p <- p + 0.1 v`,
/// reward `-|p - g|^2`. Starts at rest at the origin and always runs exactly
/// `horizon` steps. The goal is uniform over [-1, 1]^2, drawn from
/// `mt19937_64(episode_seed)`.
struct PointMassEnv {
  static constexpr std::size_t kDefaultHorizon = 50;

  std::size_t horizon = kDefaultHorizon;

  [[nodiscard]] static std::array<double, 2> sample_goal(std::uint64_t episode_seed);
};

/// Two tanh hidden layers of width `hidden` and a linear output layer,
/// mapping the observation `(g - p, v)` to a 2-d action.
///
/// Flat parameter layout, layer-major, each layer as its row-major weight
/// matrix `[out][in]` followed by its bias:
/// `W1[h][4], b1[h], W2[h][h], b2[h], W3[2][h], b3[2]`.
class MlpPolicy {
 public:
  static constexpr std::size_t kObsDim = 4;
  static constexpr std::size_t kActDim = 2;

  explicit MlpPolicy(std::size_t hidden);

  [[nodiscard]] std::size_t hidden() const noexcept { return hidden_; }
  [[nodiscard]] std::size_t param_count() const noexcept { return param_count(hidden_); }

  /// `4h + h + h*h + h + 2h + 2`; 4610 for h = 64.
  static constexpr std::size_t param_count(std::size_t hidden) noexcept {
    return kObsDim * hidden + hidden + hidden * hidden + hidden + kActDim * hidden + kActDim;
  }

  /// Forward pass. `scratch` must hold at least `2 * hidden` doubles.
  std::array<double, 2> act(std::span<const double> params, const std::array<double, 4>& obs,
                            std::span<double> scratch) const;

  /// Hidden weights ~ N(0, 1/fan_in), output weights ~ N(0, 1e-4/fan_in), zero biases.
  [[nodiscard]] std::vector<double> initial_params(std::uint64_t seed) const;

 private:
  std::size_t hidden_;
};

/// One episode of `env` under `policy` with parameters `params`.
/// Throws NumericError on a non-finite action or state.
EpisodeResult rollout(const PointMassEnv& env, const MlpPolicy& policy, std::span<const double> params,
                      std::uint64_t episode_seed);

class PointMassObjective final : public Objective {
 public:
  PointMassObjective(PointMassEnv env, MlpPolicy policy) : env_{env}, policy_{policy} {}

  EpisodeResult evaluate(std::span<const double> params, std::uint64_t episode_seed) const override {
    return rollout(env_, policy_, params, episode_seed);
  }
  [[nodiscard]] std::size_t dim() const override { return policy_.param_count(); }
  [[nodiscard]] bool deterministic() const override { return false; }
  [[nodiscard]] std::string name() const override { return "pointmass"; }
  [[nodiscard]] std::vector<double> initial_params(std::uint64_t seed) const override {
    return policy_.initial_params(seed);
  }

  [[nodiscard]] const PointMassEnv& env() const noexcept { return env_; }
  [[nodiscard]] const MlpPolicy& policy() const noexcept { return policy_; }

 private:
  PointMassEnv env_;
  MlpPolicy policy_;
};

/// Median of `values`; the mean of the two central values for even sizes.
double median(std::vector<double> values);

struct PolicyEvaluation {
  double median_return = 0.0;
  std::uint64_t steps = 0;
};

/// Median return over `n_eval` episodes with seeds `mix_seed(seed_base, k)`.
PolicyEvaluation evaluate_policy_median(const Objective& objective, std::span<const double> params,
                                        std::size_t n_eval, std::uint64_t seed_base, int threads = 1);

}  // namespace iwes

#endif
