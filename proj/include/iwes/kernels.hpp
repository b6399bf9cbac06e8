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

#ifndef IWES_KERNELS_HPP
#define IWES_KERNELS_HPP

#include <cstddef>
#include <span>

#include <iwes/noise_table.hpp>

/**
 * \file
 * \brief Data-parallel inner loops over a batch of noise windows.
 *
 * Each kernel exists twice: a plain loop in `kernels::serial`, kept as the
 * reference, and an OpenMP version in `kernels::omp`. Both visit the batch in
 * the same per-output order, so with floating-point contraction disabled the
 * results are bit-identical for any thread count.
 *
 * Notation: `eps_i = sigma * sign_i * window_i` and `shift = theta_now - theta_base`.
 * An empty `shift` means zero.
 */

namespace iwes::kernels {

/// Log importance weight of one perturbation,
/// `(|eps|^2 - |eps - shift|^2) / (2 sigma^2)`, given the precomputed squared
/// norm of the unscaled window.
double log_weight(std::span<const double> window, int sign, double sigma, std::span<const double> shift,
                  double window_sq_norm);

/// Same quantity with `|eps|^2` summed directly in O(dim).
double log_weight_direct(std::span<const double> window, int sign, double sigma, std::span<const double> shift);

namespace serial {

/// out[i] = log importance weight of handles[i]; denominator from the prefix sums.
void log_weights(const NoiseTable& table, std::span<const PerturbationHandle> handles, std::size_t dim, double sigma,
                 std::span<const double> shift, std::span<double> out);

/// As `log_weights` with the O(dim) denominator.
void log_weights_direct(const NoiseTable& table, std::span<const PerturbationHandle> handles, std::size_t dim,
                        double sigma, std::span<const double> shift, std::span<double> out);

/// out[j] = sum_i coef[i] * (eps_i[j] - shift[j]), summed in i order.
void accumulate_windows(const NoiseTable& table, std::span<const PerturbationHandle> handles, std::size_t dim,
                        double sigma, std::span<const double> coef, std::span<const double> shift,
                        std::span<double> out);

}  // namespace serial

namespace omp {

void log_weights(const NoiseTable& table, std::span<const PerturbationHandle> handles, std::size_t dim, double sigma,
                 std::span<const double> shift, std::span<double> out, int threads);

void log_weights_direct(const NoiseTable& table, std::span<const PerturbationHandle> handles, std::size_t dim,
                        double sigma, std::span<const double> shift, std::span<double> out, int threads);

/// Parallel over blocks of output coordinates; each coordinate still sums in i order.
void accumulate_windows(const NoiseTable& table, std::span<const PerturbationHandle> handles, std::size_t dim,
                        double sigma, std::span<const double> coef, std::span<const double> shift,
                        std::span<double> out, int threads);

}  // namespace omp

}  // namespace iwes::kernels

#endif
