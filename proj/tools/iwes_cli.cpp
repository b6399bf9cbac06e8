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

// Command line front end: train, sweep, bench and eval.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iwes/config.hpp>
#include <iwes/errors.hpp>
#include <iwes/experiment.hpp>
#include <iwes/metrics.hpp>

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  int workers = -1;
  int iterations = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON run configuration")->required();
  cmd->add_option("--set", args.overrides, "Override a config key, e.g. --set K=4 (repeatable)");
  cmd->add_option("--out-dir", args.out_dir, "Output directory (overrides out_dir)");
  cmd->add_option("--workers", args.workers, "Worker threads, 0 = all cores (overrides workers)");
  cmd->add_option("--iterations", args.iterations, "Training iterations (overrides iterations)");
}

iwes::RunConfig load(const CommonArgs& args) {
  auto doc = iwes::read_config_file(args.config_path);
  for (const auto& o : args.overrides) {
    iwes::apply_override(doc, o);
  }
  if (!args.out_dir.empty()) {
    doc["out_dir"] = args.out_dir;
  }
  if (args.workers >= 0) {
    doc["workers"] = args.workers;
  }
  if (args.iterations >= 0) {
    doc["iterations"] = args.iterations;
  }
  return iwes::config_from_json(doc);
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss{text};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) {
      continue;
    }
    std::istringstream is{item};
    T value{};
    if (!(is >> value) || !is.eof()) {
      throw iwes::ConfigError("cannot parse list item '" + item + "'");
    }
    out.push_back(value);
  }
  if (out.empty()) {
    throw iwes::ConfigError("empty value list");
  }
  return out;
}

void print_summary(const std::vector<iwes::SummaryRow>& rows) {
  std::cout << "axis,value,threshold,mean_steps_to_threshold,seeds_reached,seeds,final_median_return_mean\n";
  for (const auto& r : rows) {
    std::cout << r.axis << ',' << r.value << ',' << iwes::format_real(r.threshold) << ','
              << iwes::format_real(r.mean_steps_to_threshold) << ',' << r.seeds_reached << ',' << r.seeds << ','
              << iwes::format_real(r.final_median_return_mean) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolution strategies with importance weighted batch reuse"};
  app.require_subcommand(1);

  CommonArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train on every configured seed");
  add_common(train_cmd, train_args);

  CommonArgs sweep_args;
  std::string axis;
  std::string values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Train once per value of K, hidden or lr");
  add_common(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--axis", axis, "K, hidden or lr")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();

  CommonArgs bench_args;
  std::string k_values = "0,2,4,5";
  std::string hidden_values = "64,512";
  std::size_t min_iterations = 20;
  auto* bench_cmd = app.add_subcommand("bench", "Time per iteration normalized by plain ES");
  add_common(bench_cmd, bench_args);
  bench_cmd->add_option("--k-values", k_values, "Comma-separated K values");
  bench_cmd->add_option("--hidden-values", hidden_values, "Comma-separated hidden widths");
  bench_cmd->add_option("--min-iterations", min_iterations, "Timed iterations per (hidden, K)");

  CommonArgs eval_args;
  std::string params_path;
  std::uint64_t eval_seed = 0;
  auto* eval_cmd = app.add_subcommand("eval", "Median return of saved parameters");
  add_common(eval_cmd, eval_args);
  eval_cmd->add_option("--params", params_path, "params_final.bin to evaluate")->required();
  eval_cmd->add_option("--seed", eval_seed, "Run seed whose evaluation episodes are used");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train_cmd) {
      const auto cfg = load(train_args);
      const auto result = iwes::train(cfg);
      print_summary({result.summary});
      std::cout << "wrote " << cfg.out_dir.string() << '\n';
    } else if (*sweep_cmd) {
      const auto cfg = load(sweep_args);
      const auto parsed_axis = iwes::parse_sweep_axis(axis);
      const auto list = parse_list<double>(values);
      const auto result = iwes::sweep(cfg, parsed_axis, list);
      print_summary(result.summary);
      std::cout << "wrote " << cfg.out_dir.string() << '\n';
    } else if (*bench_cmd) {
      const auto cfg = load(bench_args);
      const auto ks = parse_list<std::size_t>(k_values);
      const auto hs = parse_list<std::size_t>(hidden_values);
      const auto rows = iwes::bench_throughput(cfg, ks, hs, min_iterations);
      std::filesystem::create_directories(cfg.out_dir);
      iwes::write_bench(cfg.out_dir / "bench.csv", rows);
      std::cout << "hidden,K,median_iteration_ms,median_weight_ms,ratio\n";
      for (const auto& r : rows) {
        std::cout << r.hidden << ',' << r.K << ',' << r.median_iteration_ms << ',' << r.median_weight_ms << ','
                  << r.ratio << '\n';
      }
    } else if (*eval_cmd) {
      const auto cfg = load(eval_args);
      const auto params = iwes::load_params(params_path);
      const auto objective = iwes::make_objective(cfg);
      if (params.size() != objective->dim()) {
        throw iwes::ConfigError("parameter file has dimension " + std::to_string(params.size()) +
                                " but the configured objective expects " + std::to_string(objective->dim()));
      }
      const iwes::WorkerPool pool{cfg.workers};
      const auto ev = iwes::evaluate_policy_median(*objective, params, cfg.n_eval,
                                                   iwes::stream_seed(eval_seed, iwes::Stream::kEval), pool.threads());
      nlohmann::json out = {{"median_return", ev.median_return}, {"eval_env_steps", ev.steps}, {"n_eval", cfg.n_eval}};
      std::cout << out.dump() << '\n';
    }
  } catch (const iwes::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
