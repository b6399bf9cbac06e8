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

#ifndef IWES_CONFIG_HPP
#define IWES_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include <iwes/environments.hpp>
#include <iwes/es_core.hpp>
#include <iwes/iw_engine.hpp>
#include <iwes/worker_pool.hpp>

namespace iwes {

enum class Algorithm {
  /// Plain ES; the importance weighting code is never entered.
  kEs,
  /// One ES update plus K importance weighted updates per batch.
  kIwEs,
};

/// Everything a run needs. Parsed from one flat JSON object; unknown keys are
/// rejected so that a typo never silently falls back to a default.
struct RunConfig {
  // Noise table.
  std::uint64_t noise_seed = 7;
  std::size_t noise_table_len = NoiseTable::kDefaultLength;

  PopulationConfig population{};
  IWConfig iw{};
  Algorithm algorithm = Algorithm::kIwEs;

  std::size_t workers = 0;

  // Objective.
  std::string objective = "pointmass";
  std::size_t dim = 10;
  std::size_t hidden = 64;
  std::size_t n_eval = 30;
  std::size_t horizon = PointMassEnv::kDefaultHorizon;
  EpisodeSeeding episode_seeding = EpisodeSeeding::kPerPair;

  // Protocol.
  std::size_t iterations = 200;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::filesystem::path out_dir = "runs/default";
  std::size_t log_every = 1;
  bool parallel_seeds = false;

  // Steps-to-threshold summaries.
  std::optional<double> threshold;
  double threshold_fraction = 0.9;

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  /// Dimension of the parameter vector for the configured objective.
  [[nodiscard]] std::size_t model_dim() const;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& cfg);

/// Reads a JSON document; throws ConfigError if it cannot be read or parsed.
nlohmann::json read_config_file(const std::filesystem::path& path);

/// Applies a `key=value` override. The value is parsed as JSON when possible
/// and taken as a string otherwise.
void apply_override(nlohmann::json& doc, std::string_view assignment);

std::unique_ptr<Objective> make_objective(const RunConfig& cfg);

}  // namespace iwes

#endif
