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

#ifndef IWES_METRICS_HPP
#define IWES_METRICS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace iwes {

/// One row per parameter update.
struct IterationLog {
  std::uint64_t iteration = 0;
  std::uint64_t update_index = 0;
  std::uint64_t train_env_steps_cum = 0;
  std::uint64_t eval_env_steps_cum = 0;
  double wall_ms_cum = 0.0;
  double median_eval_return = 0.0;
  double ess = 0.0;
  double clip_fraction = 0.0;
  double grad_norm = 0.0;
  double weight_sum = 0.0;
  bool skipped = false;

  friend bool operator==(const IterationLog&, const IterationLog&) = default;
};

inline constexpr std::array<std::string_view, 11> kIterationLogColumns = {
    "iteration", "update_index", "train_env_steps_cum", "eval_env_steps_cum", "wall_ms_cum", "median_eval_return",
    "ess",       "clip_fraction", "grad_norm",          "weight_sum",          "skipped"};

/// Shortest-safe, locale-independent rendering at 17 significant digits.
std::string format_real(double value);

std::string csv_header();
std::string format_row(const IterationLog& row);

/// Throws FormatError on a malformed line.
IterationLog parse_row(std::string_view line);

/// Reads a run CSV written by LogWriter; the header must match exactly.
std::vector<IterationLog> read_log(const std::filesystem::path& path);

/// Appends IterationLog rows to a CSV file. The header is written on open;
/// `flush()` is called at every iteration boundary.
class LogWriter {
 public:
  explicit LogWriter(const std::filesystem::path& path);

  void write_row(const IterationLog& row);
  void flush();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Mean over seeds of the last row of each iteration present in every log.
struct AggregateRow {
  std::uint64_t iteration = 0;
  double train_env_steps_cum = 0.0;
  double eval_env_steps_cum = 0.0;
  double wall_ms_cum = 0.0;
  double median_eval_return = 0.0;
  double updates_performed = 0.0;
};

std::vector<AggregateRow> aggregate_logs(std::span<const std::vector<IterationLog>> logs);
void write_aggregate(const std::filesystem::path& path, std::span<const AggregateRow> rows);

/// Training interactions consumed when `median_eval_return` first reaches
/// `threshold`, or nothing if it never does.
std::optional<std::uint64_t> steps_to_threshold(std::span<const IterationLog> log, double threshold);

/// `start + fraction * (best - start)` over the aggregate return curve.
double relative_threshold(std::span<const AggregateRow> baseline, double fraction);

struct SummaryRow {
  std::string axis;
  std::string value;
  double threshold = 0.0;
  /// Seeds that never reach the threshold count with their full budget.
  double mean_steps_to_threshold = 0.0;
  std::size_t seeds_reached = 0;
  std::size_t seeds = 0;
  double final_median_return_mean = 0.0;
};

SummaryRow summarize(std::string axis, std::string value, std::span<const std::vector<IterationLog>> logs,
                     double threshold);
void write_summary(const std::filesystem::path& path, std::span<const SummaryRow> rows);

/// Binary parameter file: "IWES", uint32 version = 1, uint64 dim, then dim
/// IEEE-754 doubles. All integers and doubles little-endian.
inline constexpr std::array<char, 4> kParamsMagic = {'I', 'W', 'E', 'S'};
inline constexpr std::uint32_t kParamsVersion = 1;

void save_params(const std::filesystem::path& path, std::span<const double> theta);
/// Throws FormatError on bad magic or version, or a payload that does not
/// match the header's dimension.
std::vector<double> load_params(const std::filesystem::path& path);

}  // namespace iwes

#endif
