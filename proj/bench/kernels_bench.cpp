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

#include <benchmark/benchmark.h>

#include <omp.h>

#include <iwes/environments.hpp>
#include <iwes/kernels.hpp>

namespace {

using namespace iwes;

struct Fixture {
  explicit Fixture(std::size_t hidden)
      : dim{MlpPolicy::param_count(hidden)}, table{build_noise_table(7, dim + 1'000'000, dim)} {
    Engine engine{1};
    handles = sample_handles(engine, table, 128, dim);
    coef.resize(handles.size());
    for (auto& c : coef) {
      c = uniform(engine, -0.5, 0.5);
    }
    shift.resize(dim);
    for (auto& s : shift) {
      s = uniform(engine, -1e-4, 1e-4);
    }
  }

  std::size_t dim;
  NoiseTable table;
  std::vector<PerturbationHandle> handles;
  std::vector<double> coef;
  std::vector<double> shift;
};

const Fixture& fixture(std::size_t hidden) {
  static const Fixture small{64};
  static const Fixture large{512};
  return hidden == 64 ? small : large;
}

int max_threads() { return omp_get_max_threads(); }

void BM_LogWeightsSerial(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.handles.size());
  for (auto _ : state) {
    kernels::serial::log_weights(f.table, f.handles, f.dim, 0.02, f.shift, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_LogWeightsOmp(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.handles.size());
  for (auto _ : state) {
    kernels::omp::log_weights(f.table, f.handles, f.dim, 0.02, f.shift, out, max_threads());
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_LogWeightsDirectSerial(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.handles.size());
  for (auto _ : state) {
    kernels::serial::log_weights_direct(f.table, f.handles, f.dim, 0.02, f.shift, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_AccumulateSerial(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.dim);
  for (auto _ : state) {
    kernels::serial::accumulate_windows(f.table, f.handles, f.dim, 0.02, f.coef, f.shift, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_AccumulateOmp(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.dim);
  for (auto _ : state) {
    kernels::omp::accumulate_windows(f.table, f.handles, f.dim, 0.02, f.coef, f.shift, out, max_threads());
    benchmark::DoNotOptimize(out.data());
  }
}

BENCHMARK(BM_LogWeightsSerial)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LogWeightsOmp)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LogWeightsDirectSerial)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AccumulateSerial)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AccumulateOmp)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
