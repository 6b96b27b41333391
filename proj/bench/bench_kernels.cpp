/*
 * Copyright (C) 2026 The volbias Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <vector>

#include "volbias/region_model.hpp"
#include "volbias/risk_engine.hpp"
#include "volbias/rng.hpp"
#include "volbias/stats.hpp"

using namespace volbias;

namespace {

RegionModel uncertain_model(int k)
{
    return expand_scenario({100.0, 1.0, 4.0, k, 0.4});
}

void BM_ExpectedSdExhaustive(benchmark::State& state)
{
    const int k = static_cast<int>(state.range(0));
    const ScenarioSpec spec{100.0, 1.0, 4.0, k, 0.4};
    const RegionModel model = uncertain_model(k);
    const PredictionAssignment pred = scenario_prediction(spec, 0.7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(expected_sd_exhaustive(model, pred).value);
    }
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << k));
}

void BM_ExpectedSdReference(benchmark::State& state)
{
    const int k = static_cast<int>(state.range(0));
    const ScenarioSpec spec{100.0, 1.0, 4.0, k, 0.4};
    const RegionModel model = uncertain_model(k);
    const PredictionAssignment pred = scenario_prediction(spec, 0.7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::expected_sd_enumerate(model, pred).value);
    }
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << k));
}

void BM_ExpectedSdBinomial(benchmark::State& state)
{
    const ScenarioSpec spec{100.0, 1.0, 4.0, static_cast<int>(state.range(0)), 0.4};
    for (auto _ : state) {
        benchmark::DoNotOptimize(expected_sd_binomial(spec, 0.7).value);
    }
}

std::pair<std::vector<double>, std::vector<double>> normal_pairs(std::size_t n)
{
    CounterRng rng(1);
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.normal();
        b[i] = rng.normal();
    }
    return {a, b};
}

void BM_BootstrapParallel(benchmark::State& state)
{
    const auto [a, b] = normal_pairs(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bootstrap_paired(a, b, kDefaultResamples, 3).p_greater);
    }
}

void BM_BootstrapSerial(benchmark::State& state)
{
    const auto [a, b] = normal_pairs(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::bootstrap_paired_serial(a, b, kDefaultResamples, 3).p_greater);
    }
}

}  // namespace

BENCHMARK(BM_ExpectedSdExhaustive)->Arg(4)->Arg(10)->Arg(16)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ExpectedSdReference)->Arg(4)->Arg(10)->Arg(16)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ExpectedSdBinomial)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BootstrapParallel)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapSerial)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
