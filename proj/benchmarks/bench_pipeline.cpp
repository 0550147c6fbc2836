#include <benchmark/benchmark.h>

#include <filesystem>

#include "unitrace/dataset.hpp"
#include "unitrace/stats.hpp"
#include "unitrace/synth.hpp"

using namespace unitrace;

static void Generate(benchmark::State& state) {
    SynthConfig config = default_calibrated_config(PresetScale::small);
    config.n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate(config, 1));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.n * config.m));
}
BENCHMARK(Generate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void CsvRoundTrip(benchmark::State& state) {
    SynthConfig config = default_calibrated_config(PresetScale::small);
    config.n = static_cast<std::size_t>(state.range(0));
    const Dataset d = generate(config, 1);
    const auto path = std::filesystem::temp_directory_path() / "unitrace_bench.csv";
    for (auto _ : state) {
        write_long_csv(d, path);
        benchmark::DoNotOptimize(load_long_csv(path));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(d.series_count() * d.timestamp_count()));
    std::filesystem::remove(path);
    std::filesystem::remove(sidecar_path_for(path));
}
BENCHMARK(CsvRoundTrip)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

static void SummaryScan(benchmark::State& state) {
    SynthConfig config = default_calibrated_config(PresetScale::small);
    config.n = static_cast<std::size_t>(state.range(0));
    const Dataset d = generate(config, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(summary(d));
    }
}
BENCHMARK(SummaryScan)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
