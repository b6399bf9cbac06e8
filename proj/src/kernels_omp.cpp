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
#include <cstddef>

namespace iwes::kernels::omp {

namespace {

// Output coordinates per accumulation task: 512 doubles of output plus the
// matching slice of each window stay in L1/L2 while the batch streams past.
constexpr std::ptrdiff_t kBlock = 512;

}  // namespace

void log_weights(const NoiseTable& table, std::span<const PerturbationHandle> handles, std::size_t dim, double sigma,
                 std::span<const double> shift, std::span<double> out, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(handles.size());
  const double* noise = table.values().data();
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& h = handles[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] =
        log_weight({noise + h.offset, dim}, h.sign, sigma, shift, perturbation_sq_norm(table, h, dim));
  }
}

void log_weights_direct(const NoiseTable& table, std::span<const PerturbationHandle> handles, std::size_t dim,
                        double sigma, std::span<const double> shift, std::span<double> out, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(handles.size());
  const double* noise = table.values().data();
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& h = handles[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = log_weight_direct({noise + h.offset, dim}, h.sign, sigma, shift);
  }
}

void accumulate_windows(const NoiseTable& table, std::span<const PerturbationHandle> handles, std::size_t dim,
                        double sigma, std::span<const double> coef, std::span<const double> shift,
                        std::span<double> out, int threads) {
  const double* noise = table.values().data();
  const auto total = static_cast<std::ptrdiff_t>(dim);
  const std::ptrdiff_t blocks = (total + kBlock - 1) / kBlock;
  const bool shifted = !shift.empty();
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::ptrdiff_t begin = b * kBlock;
    const std::ptrdiff_t end = std::min(total, begin + kBlock);
    double* acc = out.data();
    std::fill(acc + begin, acc + end, 0.0);
    for (std::size_t i = 0; i < handles.size(); ++i) {
      const double a = coef[i];
      const double scaled = sigma * static_cast<double>(handles[i].sign);
      const double* w = noise + handles[i].offset;
      if (shifted) {
        const double* s = shift.data();
        for (std::ptrdiff_t j = begin; j < end; ++j) {
          acc[j] += a * (scaled * w[j] - s[j]);
        }
      } else {
        for (std::ptrdiff_t j = begin; j < end; ++j) {
          acc[j] += a * (scaled * w[j]);
        }
      }
    }
  }
}

}  // namespace iwes::kernels::omp
