/*
 * Copyright 2026 The parity-audit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Serial reference vs OpenMP versions of the data-parallel loops.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "parity/calibrate.hpp"
#include "parity/permtest_kernels.hpp"

namespace {

using namespace parity;

struct Fixture {
    kernels::PooledSample pooled;
    kernels::Threshold threshold;
};

Fixture make_fixture(std::size_t n) {
    std::mt19937_64 eng(7);
    std::normal_distribution<double> dist;
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = dist(eng);
    for (auto& v : b) v = dist(eng) + 0.1;
    Fixture f{kernels::PooledSample(a, b), {}};
    const auto obs = f.pooled.diffs(f.pooled.observed_sums());
    f.threshold.observed = obs.d;
    f.threshold.active = obs.defined;
    return f;
}

void BM_PermutationSerial(benchmark::State& state) {
    const Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::count_extremes_serial(f.pooled, f.threshold, 10'000, 1));
    }
    state.SetItemsProcessed(state.iterations() * 10'000);
}

void BM_PermutationParallel(benchmark::State& state) {
    const Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::count_extremes_parallel(f.pooled, f.threshold, 10'000, 1));
    }
    state.SetItemsProcessed(state.iterations() * 10'000);
}

BENCHMARK(BM_PermutationSerial)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PermutationParallel)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_CalibrationSerial(benchmark::State& state) {
    const auto spec = GeneratorSpec::shifted(Family::normal, 2, 100, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_rejection_rate_serial(spec, 200, 0.05, 200, 3));
    }
}

void BM_CalibrationParallel(benchmark::State& state) {
    const auto spec = GeneratorSpec::shifted(Family::normal, 2, 100, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_rejection_rate(spec, 200, 0.05, 200, 3));
    }
}

BENCHMARK(BM_CalibrationSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CalibrationParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
