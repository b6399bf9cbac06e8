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

#include <iwes/kernels.hpp>

#include <algorithm>

namespace iwes::kernels {

double log_weight(std::span<const double> window, int sign, double sigma, std::span<const double> shift,
                  double window_sq_norm) {
  const double sigma_sq = sigma * sigma;
  const double scaled = sigma * static_cast<double>(sign);
  double moved_sq = 0.0;
  if (shift.empty()) {
    for (const double w : window) {
      const double x = scaled * w;
      moved_sq += x * x;
    }
  } else {
    for (std::size_t j = 0; j < window.size(); ++j) {
      const double x = scaled * window[j] - shift[j];
      moved_sq += x * x;
    }
  }
  return (sigma_sq * window_sq_norm - moved_sq) / (2.0 * sigma_sq);
}

double log_weight_direct(std::span<const double> window, int sign, double sigma, std::span<const double> shift) {
  const double sigma_sq = sigma * sigma;
  const double scaled = sigma * static_cast<double>(sign);
  double base_sq = 0.0;
  double moved_sq = 0.0;
  for (std::size_t j = 0; j < window.size(); ++j) {
    const double eps = scaled * window[j];
    const double x = shift.empty() ? eps : eps - shift[j];
    base_sq += eps * eps;
    moved_sq += x * x;
  }
  return (base_sq - moved_sq) / (2.0 * sigma_sq);
}

namespace serial {

void log_weights(const NoiseTable& table, std::span<const PerturbationHandle> handles, std::size_t dim, double sigma,
                 std::span<const double> shift, std::span<double> out) {
  for (std::size_t i = 0; i < handles.size(); ++i) {
    const auto& h = handles[i];
    out[i] = log_weight(table.window(h.offset, dim), h.sign, sigma, shift, perturbation_sq_norm(table, h, dim));
  }
}

void log_weights_direct(const NoiseTable& table, std::span<const PerturbationHandle> handles, std::size_t dim,
                        double sigma, std::span<const double> shift, std::span<double> out) {
  for (std::size_t i = 0; i < handles.size(); ++i) {
    const auto& h = handles[i];
    out[i] = log_weight_direct(table.window(h.offset, dim), h.sign, sigma, shift);
  }
}

void accumulate_windows(const NoiseTable& table, std::span<const PerturbationHandle> handles, std::size_t dim,
                        double sigma, std::span<const double> coef, std::span<const double> shift,
                        std::span<double> out) {
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(dim), 0.0);
  const double* noise = table.values().data();
  for (std::size_t i = 0; i < handles.size(); ++i) {
    const double a = coef[i];
    const double scaled = sigma * static_cast<double>(handles[i].sign);
    const double* w = noise + handles[i].offset;
    if (shift.empty()) {
      for (std::size_t j = 0; j < dim; ++j) {
        out[j] += a * (scaled * w[j]);
      }
    } else {
      for (std::size_t j = 0; j < dim; ++j) {
        out[j] += a * (scaled * w[j] - shift[j]);
      }
    }
  }
}

}  // namespace serial

}  // namespace iwes::kernels
