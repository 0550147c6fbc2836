#include <benchmark/benchmark.h>

#include "unitrace/degrade.hpp"
#include "unitrace/engine.hpp"
#include "unitrace/synth.hpp"

using namespace unitrace;

namespace {

Dataset bench_population(std::size_t n) {
    SynthConfig config = default_calibrated_config(PresetScale::small);
    config.n = n;
    config.m = 336;
    return generate(config, 1);
}

}  // namespace

static void RoundOrder(benchmark::State& state) {
    const RoundingOrder order(static_cast<int>(state.range(0)));
    std::uint32_t v = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(round_order(v, order));
        v = (v + 7919) % 36001;
    }
}
BENCHMARK(RoundOrder)->Arg(0)->Arg(1)->Arg(3);

static void DegradeDataset(benchmark::State& state) {
    const Dataset d = bench_population(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(degrade_dataset(d, RoundingOrder(2)));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(d.series_count() * d.timestamp_count()));
}
BENCHMARK(DegradeDataset)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void UniquenessWindow(benchmark::State& state) {
    const Dataset d = bench_population(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(uniqueness_at(d, {10, 5}, RoundingOrder(0), false));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.series_count()));
}
BENCHMARK(UniquenessWindow)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void UniquenessCurve(benchmark::State& state) {
    const Dataset d = bench_population(static_cast<std::size_t>(state.range(0)));
    EngineOptions options;
    options.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(uniqueness_curve(d, 5, RoundingOrder(1), options));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(d.series_count() * (d.timestamp_count() - 4)));
}
BENCHMARK(UniquenessCurve)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void CombinedCurves(benchmark::State& state) {
    const Dataset d = bench_population(static_cast<std::size_t>(state.range(0)));
    EngineOptions options;
    options.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(combined_curves(d, 3, RoundingOrder(0), options));
    }
}
BENCHMARK(CombinedCurves)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
