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

#include <iwes/metrics.hpp>

#include <charconv>
#include <cstring>
#include <limits>
#include <sstream>
#include <system_error>

#include <iwes/errors.hpp>

namespace iwes {

std::string format_real(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  if (ec != std::errc{}) {
    throw std::runtime_error("failed to format a real number");
  }
  return {buf.data(), end};
}

std::string csv_header() {
  std::string header;
  for (std::size_t i = 0; i < kIterationLogColumns.size(); ++i) {
    if (i > 0) {
      header += ',';
    }
    header += kIterationLogColumns[i];
  }
  return header;
}

std::string format_row(const IterationLog& row) {
  std::string line;
  line.reserve(200);
  line += std::to_string(row.iteration);
  line += ',';
  line += std::to_string(row.update_index);
  line += ',';
  line += std::to_string(row.train_env_steps_cum);
  line += ',';
  line += std::to_string(row.eval_env_steps_cum);
  for (const double v : {row.wall_ms_cum, row.median_eval_return, row.ess, row.clip_fraction, row.grad_norm,
                         row.weight_sum}) {
    line += ',';
    line += format_real(v);
  }
  line += ',';
  line += row.skipped ? '1' : '0';
  return line;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <class T>
T parse_number(std::string_view field) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw FormatError("malformed numeric field '" + std::string{field} + "'");
  }
  return value;
}

}  // namespace

IterationLog parse_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') {
    line.remove_suffix(1);
  }
  const auto f = split(line, ',');
  if (f.size() != kIterationLogColumns.size()) {
    throw FormatError("expected " + std::to_string(kIterationLogColumns.size()) + " fields, got " +
                      std::to_string(f.size()));
  }
  IterationLog row;
  row.iteration = parse_number<std::uint64_t>(f[0]);
  row.update_index = parse_number<std::uint64_t>(f[1]);
  row.train_env_steps_cum = parse_number<std::uint64_t>(f[2]);
  row.eval_env_steps_cum = parse_number<std::uint64_t>(f[3]);
  row.wall_ms_cum = parse_number<double>(f[4]);
  row.median_eval_return = parse_number<double>(f[5]);
  row.ess = parse_number<double>(f[6]);
  row.clip_fraction = parse_number<double>(f[7]);
  row.grad_norm = parse_number<double>(f[8]);
  row.weight_sum = parse_number<double>(f[9]);
  const auto flag = parse_number<int>(f[10]);
  if (flag != 0 && flag != 1) {
    throw FormatError("skipped flag must be 0 or 1");
  }
  row.skipped = flag == 1;
  return row;
}

std::vector<IterationLog> read_log(const std::filesystem::path& path) {
  std::ifstream in{path};
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) {
    throw FormatError(path.string() + ": missing or unexpected header");
  }
  std::vector<IterationLog> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      rows.push_back(parse_row(line));
    }
  }
  return rows;
}

LogWriter::LogWriter(const std::filesystem::path& path) : path_{path}, out_{path, std::ios::trunc} {
  if (!out_) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out_ << csv_header() << '\n';
  flush();
}

void LogWriter::write_row(const IterationLog& row) {
  out_ << format_row(row) << '\n';
  if (!out_) {
    throw std::runtime_error("write to " + path_.string() + " failed");
  }
}

void LogWriter::flush() {
  out_.flush();
  if (!out_) {
    throw std::runtime_error("flush of " + path_.string() + " failed");
  }
}

std::vector<AggregateRow> aggregate_logs(std::span<const std::vector<IterationLog>> logs) {
  std::vector<AggregateRow> rows;
  if (logs.empty()) {
    return rows;
  }
  struct Last {
    const IterationLog* row = nullptr;
    std::size_t performed = 0;
  };
  // Per log: iteration -> last row and number of applied updates.
  std::vector<std::vector<std::pair<std::uint64_t, Last>>> per_log;
  for (const auto& log : logs) {
    std::vector<std::pair<std::uint64_t, Last>> its;
    for (const auto& r : log) {
      if (its.empty() || its.back().first != r.iteration) {
        its.push_back({r.iteration, {}});
      }
      its.back().second.row = &r;
      if (r.iteration > 0 && !r.skipped) {
        ++its.back().second.performed;
      }
    }
    per_log.push_back(std::move(its));
  }

  std::size_t common = per_log.front().size();
  for (const auto& its : per_log) {
    common = std::min(common, its.size());
  }
  const auto count = static_cast<double>(logs.size());
  for (std::size_t k = 0; k < common; ++k) {
    AggregateRow agg;
    agg.iteration = per_log.front()[k].first;
    bool matched = true;
    for (const auto& its : per_log) {
      if (its[k].first != agg.iteration) {
        matched = false;
        break;
      }
      const auto& last = its[k].second;
      agg.train_env_steps_cum += static_cast<double>(last.row->train_env_steps_cum);
      agg.eval_env_steps_cum += static_cast<double>(last.row->eval_env_steps_cum);
      agg.wall_ms_cum += last.row->wall_ms_cum;
      agg.median_eval_return += last.row->median_eval_return;
      agg.updates_performed += static_cast<double>(last.performed);
    }
    if (!matched) {
      break;
    }
    agg.train_env_steps_cum /= count;
    agg.eval_env_steps_cum /= count;
    agg.wall_ms_cum /= count;
    agg.median_eval_return /= count;
    agg.updates_performed /= count;
    rows.push_back(agg);
  }
  return rows;
}

void write_aggregate(const std::filesystem::path& path, std::span<const AggregateRow> rows) {
  std::ofstream out{path, std::ios::trunc};
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << "iteration,train_env_steps_cum,eval_env_steps_cum,wall_ms_cum,median_eval_return,updates_performed\n";
  for (const auto& r : rows) {
    out << r.iteration << ',' << format_real(r.train_env_steps_cum) << ',' << format_real(r.eval_env_steps_cum)
        << ',' << format_real(r.wall_ms_cum) << ',' << format_real(r.median_eval_return) << ','
        << format_real(r.updates_performed) << '\n';
  }
  if (!out) {
    throw std::runtime_error("write to " + path.string() + " failed");
  }
}

std::optional<std::uint64_t> steps_to_threshold(std::span<const IterationLog> log, double threshold) {
  for (const auto& r : log) {
    if (r.median_eval_return >= threshold) {
      return r.train_env_steps_cum;
    }
  }
  return std::nullopt;
}

double relative_threshold(std::span<const AggregateRow> baseline, double fraction) {
  if (baseline.empty()) {
    throw std::invalid_argument("relative threshold needs a non-empty baseline curve");
  }
  const double start = baseline.front().median_eval_return;
  double best = start;
  for (const auto& r : baseline) {
    best = std::max(best, r.median_eval_return);
  }
  return start + fraction * (best - start);
}

SummaryRow summarize(std::string axis, std::string value, std::span<const std::vector<IterationLog>> logs,
                     double threshold) {
  SummaryRow row;
  row.axis = std::move(axis);
  row.value = std::move(value);
  row.threshold = threshold;
  row.seeds = logs.size();
  double steps_sum = 0.0;
  double final_sum = 0.0;
  for (const auto& log : logs) {
    const auto hit = steps_to_threshold(log, threshold);
    if (hit) {
      ++row.seeds_reached;
      steps_sum += static_cast<double>(*hit);
    } else if (!log.empty()) {
      steps_sum += static_cast<double>(log.back().train_env_steps_cum);
    }
    if (!log.empty()) {
      final_sum += log.back().median_eval_return;
    }
  }
  if (!logs.empty()) {
    row.mean_steps_to_threshold = steps_sum / static_cast<double>(logs.size());
    row.final_median_return_mean = final_sum / static_cast<double>(logs.size());
  }
  return row;
}

void write_summary(const std::filesystem::path& path, std::span<const SummaryRow> rows) {
  std::ofstream out{path, std::ios::trunc};
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << "axis,value,threshold,mean_steps_to_threshold,seeds_reached,seeds,final_median_return_mean\n";
  for (const auto& r : rows) {
    out << r.axis << ',' << r.value << ',' << format_real(r.threshold) << ',' << format_real(r.mean_steps_to_threshold)
        << ',' << r.seeds_reached << ',' << r.seeds << ',' << format_real(r.final_median_return_mean) << '\n';
  }
  if (!out) {
    throw std::runtime_error("write to " + path.string() + " failed");
  }
}

namespace {

void put_le(std::string& out, std::uint64_t v, int bytes) {
  for (int b = 0; b < bytes; ++b) {
    out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
  }
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) {
    v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  }
  return v;
}

constexpr std::size_t kHeaderBytes = 16;

}  // namespace

void save_params(const std::filesystem::path& path, std::span<const double> theta) {
  std::string bytes;
  bytes.reserve(kHeaderBytes + 8 * theta.size());
  bytes.append(kParamsMagic.data(), kParamsMagic.size());
  put_le(bytes, kParamsVersion, 4);
  put_le(bytes, theta.size(), 8);
  for (const double x : theta) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &x, sizeof bits);
    put_le(bytes, bits, 8);
  }
  std::ofstream out{path, std::ios::binary | std::ios::trunc};
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

std::vector<double> load_params(const std::filesystem::path& path) {
  std::ifstream in{path, std::ios::binary};
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::vector<unsigned char> bytes{std::istreambuf_iterator<char>{in}, std::istreambuf_iterator<char>{}};
  if (bytes.size() < kHeaderBytes) {
    throw FormatError(path.string() + ": truncated header");
  }
  if (std::memcmp(bytes.data(), kParamsMagic.data(), kParamsMagic.size()) != 0) {
    throw FormatError(path.string() + ": bad magic");
  }
  const auto version = get_le(bytes.data() + 4, 4);
  if (version != kParamsVersion) {
    throw FormatError(path.string() + ": unsupported version " + std::to_string(version));
  }
  const auto dim = get_le(bytes.data() + 8, 8);
  if (dim > (bytes.size() - kHeaderBytes) / 8 || bytes.size() != kHeaderBytes + 8 * dim) {
    throw FormatError(path.string() + ": payload does not match header dim " + std::to_string(dim));
  }
  std::vector<double> theta(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const std::uint64_t bits = get_le(bytes.data() + kHeaderBytes + 8 * j, 8);
    std::memcpy(&theta[j], &bits, sizeof bits);
  }
  return theta;
}

}  // namespace iwes
