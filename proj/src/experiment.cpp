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

#include <iwes/experiment.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <iwes/errors.hpp>

namespace iwes {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

IterationLog make_row(std::uint64_t iteration, const UpdateDiag& d) {
  IterationLog row;
  row.iteration = iteration;
  row.update_index = d.update_index;
  row.ess = d.ess;
  row.clip_fraction = d.clip_fraction;
  row.grad_norm = d.grad_norm;
  row.weight_sum = d.weight_sum;
  row.skipped = d.skipped;
  return row;
}

std::string value_label(double value) {
  std::ostringstream os;
  os << value;
  return os.str();
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t run_seed, Stream stream) {
  return mix_seed(run_seed, static_cast<std::uint64_t>(stream));
}

Trainer::Trainer(const RunConfig& cfg, std::uint64_t seed, const NoiseTable& table, const Objective& objective,
                 const WorkerPool& pool)
    : cfg_{cfg},
      seed_{seed},
      table_{table},
      objective_{objective},
      pool_{pool},
      theta_{objective.initial_params(stream_seed(seed, Stream::kInit))},
      sampler_{stream_seed(seed, Stream::kHandles)} {
  if (!table.valid(0, theta_.size())) {
    throw ConfigError("noise table is shorter than the model dimension");
  }
}

IterationOutcome Trainer::step() {
  ++iteration_;
  const auto& pop = cfg_.population;
  const std::size_t dim = theta_.size();

  BatchRecord batch;
  batch.base_params = theta_;
  batch.handles = sample_handles(sampler_, table_, pop.batch_pairs, dim, pop.mirrored);
  const auto episodes = mix_seed(stream_seed(seed_, Stream::kEpisodes), iteration_);
  auto evaluated = evaluate_batch(pool_, objective_, table_, theta_, batch.handles, pop.sigma, episodes,
                                  cfg_.episode_seeding, iteration_);
  batch.raw_returns = std::move(evaluated.raw_returns);
  batch.env_steps = evaluated.env_steps;
  batch.shaped_fitness = shape_fitness(batch.raw_returns, pop.fitness_shaping);

  IterationOutcome out;
  out.iteration = iteration_;
  out.env_steps = batch.env_steps;
  if (cfg_.algorithm == Algorithm::kEs) {
    const auto grad = estimate_gradient_vanilla(batch, pop, table_, pool_.threads());
    theta_ = apply_update(theta_, grad, opt_, pop);
    UpdateDiag d;
    d.ess = static_cast<double>(batch.size());
    d.weight_sum = static_cast<double>(batch.size());
    d.grad_norm = l2_norm(grad);
    out.updates.push_back(d);
  } else {
    auto result = run_batch_updates(theta_, batch, cfg_.iw, pop, opt_, table_, pool_);
    theta_ = std::move(result.theta);
    out.updates = std::move(result.updates);
  }
  for (const auto& d : out.updates) {
    out.weight_ms += d.weight_ms;
    if (d.nonfinite_weights > 0) {
      std::cerr << "warning: seed " << seed_ << " iteration " << iteration_ << " update " << d.update_index << ": "
                << d.nonfinite_weights << " non-finite log weights treated as zero\n";
    }
  }
  return out;
}

PolicyEvaluation Trainer::evaluate() const {
  return evaluate_policy_median(objective_, theta_, cfg_.n_eval, stream_seed(seed_, Stream::kEval), pool_.threads());
}

SeedRun run_seed(const RunConfig& cfg, std::uint64_t seed, const NoiseTable& table, const Objective& objective,
                 const WorkerPool& pool, LogWriter* writer, bool record_trajectory) {
  SeedRun run;
  run.seed = seed;
  Trainer trainer{cfg, seed, table, objective, pool};

  std::uint64_t train_steps = 0;
  std::uint64_t eval_steps = 0;
  const auto started = Clock::now();

  auto emit = [&](IterationLog row) {
    run.log.push_back(row);
    if (writer != nullptr) {
      writer->write_row(row);
    }
  };

  if (cfg.log_every > 0) {
    const auto ev = trainer.evaluate();
    eval_steps += ev.steps;
    UpdateDiag initial;
    const auto n = static_cast<double>(cfg.population.batch_size());
    initial.ess = n;
    initial.weight_sum = n;
    auto row = make_row(0, initial);
    row.eval_env_steps_cum = eval_steps;
    row.wall_ms_cum = elapsed_ms(started);
    row.median_eval_return = ev.median_return;
    emit(row);
    if (writer != nullptr) {
      writer->flush();
    }
  }

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    const auto outcome = trainer.step();
    train_steps += outcome.env_steps;
    if (record_trajectory) {
      run.trajectory.push_back(trainer.params());
    }
    if (cfg.log_every == 0 || t % cfg.log_every != 0) {
      continue;
    }
    const auto ev = trainer.evaluate();
    eval_steps += ev.steps;
    const double wall = elapsed_ms(started);
    for (const auto& d : outcome.updates) {
      auto row = make_row(t, d);
      row.train_env_steps_cum = train_steps;
      row.eval_env_steps_cum = eval_steps;
      row.wall_ms_cum = wall;
      row.median_eval_return = ev.median_return;
      emit(row);
    }
    if (writer != nullptr) {
      writer->flush();
    }
  }
  run.final_params = trainer.params();
  return run;
}

TrainResult train(const RunConfig& cfg, const TrainOptions& options) {
  cfg.validate();
  const auto objective = make_objective(cfg);
  const WorkerPool pool{cfg.workers};

  std::unique_ptr<NoiseTable> owned;
  const NoiseTable* table = options.table;
  if (table == nullptr) {
    owned = std::make_unique<NoiseTable>(build_noise_table(cfg.noise_seed, cfg.noise_table_len, cfg.model_dim()));
    table = owned.get();
  } else if (!table->valid(0, cfg.model_dim())) {
    throw ConfigError("shared noise table is shorter than the model dimension");
  }

  if (options.write_files) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream echo{cfg.out_dir / "config.echo.json"};
    echo << config_to_json(cfg).dump(2) << '\n';
    if (!echo) {
      throw std::runtime_error("cannot write " + (cfg.out_dir / "config.echo.json").string());
    }
  }

  auto one = [&](std::uint64_t seed) {
    std::unique_ptr<LogWriter> writer;
    if (options.write_files) {
      writer = std::make_unique<LogWriter>(cfg.out_dir / ("run_" + std::to_string(seed) + ".csv"));
    }
    auto run = run_seed(cfg, seed, *table, *objective, pool, writer.get(), options.record_trajectory);
    if (options.write_files) {
      save_params(cfg.out_dir / ("params_final_" + std::to_string(seed) + ".bin"), run.final_params);
    }
    return run;
  };

  TrainResult result;
  if (cfg.parallel_seeds && cfg.seeds.size() > 1) {
    std::vector<std::future<SeedRun>> pending;
    for (const auto seed : cfg.seeds) {
      pending.push_back(std::async(std::launch::async, one, seed));
    }
    for (auto& f : pending) {
      result.runs.push_back(f.get());
    }
  } else {
    for (const auto seed : cfg.seeds) {
      result.runs.push_back(one(seed));
    }
  }

  std::vector<std::vector<IterationLog>> logs;
  for (const auto& r : result.runs) {
    logs.push_back(r.log);
  }
  result.aggregate = aggregate_logs(logs);
  const double threshold = cfg.threshold ? *cfg.threshold
                           : result.aggregate.empty()
                               ? 0.0
                               : relative_threshold(result.aggregate, cfg.threshold_fraction);
  result.summary = summarize("run", "-", logs, threshold);

  if (options.write_files) {
    write_aggregate(cfg.out_dir / "aggregate.csv", result.aggregate);
    const std::vector<SummaryRow> summary{result.summary};
    write_summary(cfg.out_dir / "summary.csv", summary);
    save_params(cfg.out_dir / "params_final.bin", result.runs.front().final_params);
  }
  return result;
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "K") {
    return SweepAxis::kK;
  }
  if (name == "hidden") {
    return SweepAxis::kHidden;
  }
  if (name == "lr" || name == "learning_rate") {
    return SweepAxis::kLearningRate;
  }
  throw ConfigError("sweep axis must be K, hidden or lr; got '" + std::string{name} + "'");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kK:
      return "K";
    case SweepAxis::kHidden:
      return "hidden";
    case SweepAxis::kLearningRate:
      return "lr";
  }
  return "?";
}

RunConfig with_axis_value(const RunConfig& cfg, SweepAxis axis, double value) {
  RunConfig out = cfg;
  const auto as_count = [&](const char* what) {
    if (!(value >= 0.0) || std::floor(value) != value) {
      throw ConfigError(std::string{what} + " sweep values must be non-negative integers");
    }
    return static_cast<std::size_t>(value);
  };
  switch (axis) {
    case SweepAxis::kK:
      out.iw.K = as_count("K");
      break;
    case SweepAxis::kHidden:
      out.hidden = as_count("hidden");
      break;
    case SweepAxis::kLearningRate:
      out.population.learning_rate = value;
      break;
  }
  out.validate();
  return out;
}

SweepResult sweep(const RunConfig& cfg, SweepAxis axis, std::span<const double> values, const TrainOptions& options) {
  if (values.empty()) {
    throw ConfigError("sweep needs at least one value");
  }
  std::vector<RunConfig> configs;
  std::size_t table_len = cfg.noise_table_len;
  for (const double v : values) {
    configs.push_back(with_axis_value(cfg, axis, v));
    table_len = std::max(table_len, configs.back().model_dim());
  }

  std::unique_ptr<NoiseTable> owned;
  const NoiseTable* table = options.table;
  if (table == nullptr) {
    owned = std::make_unique<NoiseTable>(build_noise_table(cfg.noise_seed, table_len, configs.front().model_dim()));
    table = owned.get();
  }

  SweepResult result;
  TrainOptions per_value = options;
  per_value.table = table;
  for (std::size_t k = 0; k < values.size(); ++k) {
    result.labels.push_back(value_label(values[k]));
    configs[k].out_dir = cfg.out_dir / (to_string(axis) + "_" + result.labels.back());
    result.per_value.push_back(train(configs[k], per_value));
  }

  std::size_t baseline = 0;
  if (axis == SweepAxis::kK) {
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (values[k] == 0.0) {
        baseline = k;
        break;
      }
    }
  }
  const double threshold =
      cfg.threshold ? *cfg.threshold
                    : relative_threshold(result.per_value[baseline].aggregate, cfg.threshold_fraction);
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::vector<std::vector<IterationLog>> logs;
    for (const auto& r : result.per_value[k].runs) {
      logs.push_back(r.log);
    }
    result.summary.push_back(summarize(to_string(axis), result.labels[k], logs, threshold));
  }
  if (options.write_files) {
    std::filesystem::create_directories(cfg.out_dir);
    write_summary(cfg.out_dir / "summary.csv", result.summary);
  }
  return result;
}

std::vector<BenchRow> bench_throughput(const RunConfig& cfg, std::span<const std::size_t> k_values,
                                       std::span<const std::size_t> hidden_values, std::size_t min_iterations) {
  if (k_values.empty() || hidden_values.empty()) {
    throw ConfigError("bench needs at least one K and one hidden value");
  }
  const std::size_t iterations = std::max<std::size_t>({min_iterations, cfg.iterations, 1});
  const WorkerPool pool{cfg.workers};

  std::size_t table_len = cfg.noise_table_len;
  for (const auto h : hidden_values) {
    table_len = std::max(table_len, MlpPolicy::param_count(h));
  }
  const auto table = build_noise_table(cfg.noise_seed, table_len, MlpPolicy::param_count(hidden_values.front()));

  std::vector<std::size_t> ks{k_values.begin(), k_values.end()};
  if (std::find(ks.begin(), ks.end(), std::size_t{0}) == ks.end()) {
    ks.insert(ks.begin(), 0);
  }

  std::vector<BenchRow> rows;
  for (const auto h : hidden_values) {
    std::vector<RunConfig> configs;
    for (const auto k : ks) {
      RunConfig c = cfg;
      c.objective = "pointmass";
      c.hidden = h;
      c.algorithm = Algorithm::kIwEs;
      c.iw.K = k;
      c.noise_table_len = table_len;
      c.validate();
      configs.push_back(std::move(c));
    }
    const PointMassObjective objective{PointMassEnv{cfg.horizon}, MlpPolicy{h}};
    std::vector<std::unique_ptr<Trainer>> trainers;
    for (const auto& c : configs) {
      trainers.push_back(std::make_unique<Trainer>(c, cfg.seeds.front(), table, objective, pool));
    }
    for (auto& t : trainers) {
      t->step();  // warm-up
    }
    std::vector<std::vector<double>> iter_ms(ks.size());
    std::vector<std::vector<double>> weight_ms(ks.size());
    for (std::size_t it = 0; it < iterations; ++it) {
      for (std::size_t k = 0; k < ks.size(); ++k) {
        const auto started = Clock::now();
        const auto outcome = trainers[k]->step();
        iter_ms[k].push_back(elapsed_ms(started));
        weight_ms[k].push_back(outcome.weight_ms);
      }
    }
    double base = 0.0;
    std::vector<BenchRow> width_rows;
    for (std::size_t k = 0; k < ks.size(); ++k) {
      BenchRow row;
      row.hidden = h;
      row.K = ks[k];
      row.iterations = iterations;
      row.median_iteration_ms = median(iter_ms[k]);
      row.median_weight_ms = median(weight_ms[k]);
      if (ks[k] == 0) {
        base = row.median_iteration_ms;
      }
      width_rows.push_back(row);
    }
    for (auto& row : width_rows) {
      row.ratio = row.median_iteration_ms / base;
      if (std::find(k_values.begin(), k_values.end(), row.K) != k_values.end()) {
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_bench(const std::filesystem::path& path, std::span<const BenchRow> rows) {
  std::ofstream out{path, std::ios::trunc};
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << "hidden,K,iterations,median_iteration_ms,median_weight_ms,ratio\n";
  for (const auto& r : rows) {
    out << r.hidden << ',' << r.K << ',' << r.iterations << ',' << format_real(r.median_iteration_ms) << ','
        << format_real(r.median_weight_ms) << ',' << format_real(r.ratio) << '\n';
  }
  if (!out) {
    throw std::runtime_error("write to " + path.string() + " failed");
  }
}

}  // namespace iwes
