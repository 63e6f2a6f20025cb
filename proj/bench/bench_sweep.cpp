// Copyright 2026 The nessflow Authors
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

#include "nessflow/sweep.hpp"

namespace {

using namespace nessflow;

SweepSpec bench_spec(benchmark::State& state)
{
    SweepSpec spec;
    spec.variable = SweepVariable::c_em;
    spec.from = 1e-3;
    spec.to = 1e3;
    spec.points = static_cast<int>(state.range(0));
    spec.log = true;
    return spec;
}

void bm_sweep_serial(benchmark::State& state)
{
    const auto base = typical_params();
    const auto spec = bench_spec(state);
    for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(base, spec));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_sweep_openmp(benchmark::State& state)
{
    const auto base = typical_params();
    const auto spec = bench_spec(state);
    for (auto _ : state) benchmark::DoNotOptimize(run_sweep(base, spec));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_monte_carlo_serial(benchmark::State& state)
{
    const auto base = typical_params();
    const MonteCarloSpec spec{static_cast<std::size_t>(state.range(0)), 7, SampleMode::inside_cone, true};
    for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_bounds_serial(base, spec));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_monte_carlo_openmp(benchmark::State& state)
{
    const auto base = typical_params();
    const MonteCarloSpec spec{static_cast<std::size_t>(state.range(0)), 7, SampleMode::inside_cone, true};
    for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_bounds(base, spec));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(bm_sweep_serial)->Arg(256)->Arg(4096);
BENCHMARK(bm_sweep_openmp)->Arg(256)->Arg(4096);
BENCHMARK(bm_monte_carlo_serial)->Arg(1000);
BENCHMARK(bm_monte_carlo_openmp)->Arg(1000);

BENCHMARK_MAIN();
