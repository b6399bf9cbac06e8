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

#include <iwes/config.hpp>

#include <fstream>
#include <set>

#include <iwes/errors.hpp>

namespace iwes {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "noise_seed",   "noise_table_len",  "mirrored",        "sigma",
      "batch_pairs",  "learning_rate",    "optimizer",       "l2_coeff",
      "fitness_shaping", "K",             "ess_min_fraction", "weight_sum_min",
      "iw_uses_raw_returns", "reset_adam_per_batch", "algorithm", "workers",
      "objective",    "dim",              "hidden",          "n_eval",
      "horizon",      "episode_seeding",  "iterations",      "seeds",
      "out_dir",      "log_every",        "parallel_seeds",  "threshold",
      "threshold_fraction"};
  return keys;
}

template <class T>
T get(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key) || doc.at(key).is_null()) {
    return fallback;
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string{"config key '"} + key + "': " + e.what());
  }
}

std::size_t get_count(const json& doc, const char* key, std::size_t fallback) {
  if (!doc.contains(key)) {
    return fallback;
  }
  const auto& v = doc.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(std::string{"config key '"} + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::uint64_t get_seed(const json& v, const char* key) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(std::string{"config key '"} + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

void parse_optimizer(const json& v, PopulationConfig& pop) {
  std::string kind;
  if (v.is_string()) {
    kind = v.get<std::string>();
  } else if (v.is_object()) {
    for (const auto& [k, _] : v.items()) {
      if (k != "kind" && k != "beta1" && k != "beta2" && k != "epsilon") {
        throw ConfigError("optimizer: unknown key '" + k + "'");
      }
    }
    kind = get<std::string>(v, "kind", "adam");
    pop.adam.beta1 = get<double>(v, "beta1", pop.adam.beta1);
    pop.adam.beta2 = get<double>(v, "beta2", pop.adam.beta2);
    pop.adam.epsilon = get<double>(v, "epsilon", pop.adam.epsilon);
  } else {
    throw ConfigError("optimizer must be a string or an object");
  }
  if (kind == "adam") {
    pop.optimizer = OptimizerKind::kAdam;
  } else if (kind == "sgd") {
    pop.optimizer = OptimizerKind::kSgd;
  } else {
    throw ConfigError("optimizer kind must be 'adam' or 'sgd', got '" + kind + "'");
  }
}

}  // namespace

void RunConfig::validate() const {
  population.validate();
  iw.validate();
  if (objective != "pointmass" && objective != "sphere" && objective != "rastrigin" && objective != "rosenbrock") {
    throw ConfigError("objective must be one of sphere, rastrigin, rosenbrock, pointmass; got '" + objective + "'");
  }
  if (objective == "pointmass") {
    if (hidden != 64 && hidden != 256 && hidden != 512) {
      throw ConfigError("hidden must be 64, 256 or 512");
    }
    if (horizon < 1) {
      throw ConfigError("horizon must be at least 1");
    }
  } else if (dim < 1) {
    throw ConfigError("dim must be at least 1");
  }
  if (n_eval < 1) {
    throw ConfigError("n_eval must be at least 1");
  }
  if (seeds.empty()) {
    throw ConfigError("seeds must not be empty");
  }
  if (noise_table_len < model_dim()) {
    throw ConfigError("noise_table_len must be at least the model dimension (" + std::to_string(model_dim()) + ")");
  }
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0)) {
    throw ConfigError("threshold_fraction must lie in (0, 1]");
  }
  if (episode_seeding == EpisodeSeeding::kPerPair && !population.mirrored) {
    throw ConfigError("episode_seeding 'pair' requires mirrored sampling");
  }
}

std::size_t RunConfig::model_dim() const {
  return objective == "pointmass" ? MlpPolicy::param_count(hidden) : dim;
}

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  for (const auto& [key, _] : doc.items()) {
    if (!known_keys().contains(key)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  RunConfig cfg;
  if (doc.contains("noise_seed")) {
    cfg.noise_seed = get_seed(doc.at("noise_seed"), "noise_seed");
  }
  cfg.noise_table_len = get_count(doc, "noise_table_len", cfg.noise_table_len);

  auto& pop = cfg.population;
  pop.mirrored = get<bool>(doc, "mirrored", pop.mirrored);
  pop.sigma = get<double>(doc, "sigma", pop.sigma);
  pop.batch_pairs = get_count(doc, "batch_pairs", pop.batch_pairs);
  pop.learning_rate = get<double>(doc, "learning_rate", pop.learning_rate);
  if (doc.contains("optimizer")) {
    parse_optimizer(doc.at("optimizer"), pop);
  }
  pop.l2_coeff = get<double>(doc, "l2_coeff", pop.l2_coeff);
  const auto shaping = get<std::string>(doc, "fitness_shaping", "centered_rank");
  if (shaping == "centered_rank") {
    pop.fitness_shaping = FitnessShaping::kCenteredRank;
  } else if (shaping == "raw") {
    pop.fitness_shaping = FitnessShaping::kRaw;
  } else {
    throw ConfigError("fitness_shaping must be 'centered_rank' or 'raw'");
  }

  auto& iw = cfg.iw;
  iw.K = get_count(doc, "K", iw.K);
  iw.ess_min_fraction = get<double>(doc, "ess_min_fraction", iw.ess_min_fraction);
  if (doc.contains("weight_sum_min") && !doc.at("weight_sum_min").is_null()) {
    iw.weight_sum_min = get<double>(doc, "weight_sum_min", 0.0);
  }
  iw.iw_uses_raw_returns = get<bool>(doc, "iw_uses_raw_returns", iw.iw_uses_raw_returns);
  iw.reset_adam_per_batch = get<bool>(doc, "reset_adam_per_batch", iw.reset_adam_per_batch);

  const auto algorithm = get<std::string>(doc, "algorithm", "iw-es");
  if (algorithm == "iw-es") {
    cfg.algorithm = Algorithm::kIwEs;
  } else if (algorithm == "es") {
    cfg.algorithm = Algorithm::kEs;
  } else {
    throw ConfigError("algorithm must be 'iw-es' or 'es'");
  }

  cfg.workers = get_count(doc, "workers", cfg.workers);
  cfg.objective = get<std::string>(doc, "objective", cfg.objective);
  cfg.dim = get_count(doc, "dim", cfg.dim);
  cfg.hidden = get_count(doc, "hidden", cfg.hidden);
  cfg.n_eval = get_count(doc, "n_eval", cfg.n_eval);
  cfg.horizon = get_count(doc, "horizon", cfg.horizon);

  const auto seeding = get<std::string>(doc, "episode_seeding", pop.mirrored ? "pair" : "handle");
  if (seeding == "pair") {
    cfg.episode_seeding = EpisodeSeeding::kPerPair;
  } else if (seeding == "handle") {
    cfg.episode_seeding = EpisodeSeeding::kPerHandle;
  } else {
    throw ConfigError("episode_seeding must be 'pair' or 'handle'");
  }

  cfg.iterations = get_count(doc, "iterations", cfg.iterations);
  if (doc.contains("seeds")) {
    const auto& s = doc.at("seeds");
    if (!s.is_array()) {
      throw ConfigError("seeds must be an array of non-negative integers");
    }
    cfg.seeds.clear();
    for (const auto& v : s) {
      cfg.seeds.push_back(get_seed(v, "seeds"));
    }
  }
  cfg.out_dir = get<std::string>(doc, "out_dir", cfg.out_dir.string());
  cfg.log_every = get_count(doc, "log_every", cfg.log_every);
  cfg.parallel_seeds = get<bool>(doc, "parallel_seeds", cfg.parallel_seeds);
  if (doc.contains("threshold") && !doc.at("threshold").is_null()) {
    cfg.threshold = get<double>(doc, "threshold", 0.0);
  }
  cfg.threshold_fraction = get<double>(doc, "threshold_fraction", cfg.threshold_fraction);

  cfg.validate();
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  const auto& pop = cfg.population;
  json optimizer = {{"kind", pop.optimizer == OptimizerKind::kAdam ? "adam" : "sgd"},
                    {"beta1", pop.adam.beta1},
                    {"beta2", pop.adam.beta2},
                    {"epsilon", pop.adam.epsilon}};
  json doc = {
      {"noise_seed", cfg.noise_seed},
      {"noise_table_len", cfg.noise_table_len},
      {"mirrored", pop.mirrored},
      {"sigma", pop.sigma},
      {"batch_pairs", pop.batch_pairs},
      {"learning_rate", pop.learning_rate},
      {"optimizer", optimizer},
      {"l2_coeff", pop.l2_coeff},
      {"fitness_shaping", pop.fitness_shaping == FitnessShaping::kRaw ? "raw" : "centered_rank"},
      {"K", cfg.iw.K},
      {"ess_min_fraction", cfg.iw.ess_min_fraction},
      {"weight_sum_min", cfg.iw.weight_sum_min ? json(*cfg.iw.weight_sum_min) : json(nullptr)},
      {"iw_uses_raw_returns", cfg.iw.iw_uses_raw_returns},
      {"reset_adam_per_batch", cfg.iw.reset_adam_per_batch},
      {"algorithm", cfg.algorithm == Algorithm::kEs ? "es" : "iw-es"},
      {"workers", cfg.workers},
      {"objective", cfg.objective},
      {"dim", cfg.dim},
      {"hidden", cfg.hidden},
      {"n_eval", cfg.n_eval},
      {"horizon", cfg.horizon},
      {"episode_seeding", cfg.episode_seeding == EpisodeSeeding::kPerPair ? "pair" : "handle"},
      {"iterations", cfg.iterations},
      {"seeds", cfg.seeds},
      {"out_dir", cfg.out_dir.string()},
      {"log_every", cfg.log_every},
      {"parallel_seeds", cfg.parallel_seeds},
      {"threshold", cfg.threshold ? json(*cfg.threshold) : json(nullptr)},
      {"threshold_fraction", cfg.threshold_fraction},
  };
  return doc;
}

json read_config_file(const std::filesystem::path& path) {
  std::ifstream in{path};
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override must look like key=value, got '" + std::string{assignment} + "'");
  }
  const std::string key{assignment.substr(0, eq)};
  const std::string text{assignment.substr(eq + 1)};
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) {
    value = text;
  }
  doc[key] = value;
}

std::unique_ptr<Objective> make_objective(const RunConfig& cfg) {
  if (cfg.objective == "sphere") {
    return sphere(cfg.dim);
  }
  if (cfg.objective == "rastrigin") {
    return rastrigin(cfg.dim);
  }
  if (cfg.objective == "rosenbrock") {
    return rosenbrock(cfg.dim);
  }
  if (cfg.objective == "pointmass") {
    return std::make_unique<PointMassObjective>(PointMassEnv{cfg.horizon}, MlpPolicy{cfg.hidden});
  }
  throw ConfigError("unknown objective '" + cfg.objective + "'");
}

}  // namespace iwes
