#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "unitrace/dataset.hpp"

namespace unitrace {

/// Configuration for the synthetic load-profile generator. The generator is
/// a statistical mimic of a residential smart-meter population, not a
/// behavioral model: a shared diurnal base profile, per-household log-normal
/// scaling and circular time shift, per-measure multiplicative noise,
/// zero readings, and a bursty missing-data model.
struct SynthConfig {
    std::size_t n = 1000;                 // series count
    std::size_t m = 336;                  // timestamps
    std::int64_t step_seconds = 1800;     // half-hourly
    std::uint64_t seed = 1;

    /// One diurnal cycle of non-negative values; length p must satisfy
    /// p * step_seconds == 86400.
    std::vector<double> base_profile;

    double scale_mu = 0.0;     // log-normal household multiplier: exp(mu + sigma*z)
    double scale_sigma = 0.0;
    double noise_sigma = 0.0;  // per-measure multiplicative log-normal dispersion
    double zero_prob = 0.0;    // per-measure probability of a 0 W reading
    double missing_prob = 0.0;
    std::size_t missing_burst_len = 1;  // bursts of consecutive missing measures
    std::size_t time_shift_max = 0;     // circular shift in [-max, +max] steps
    double seasonal_amplitude = 0.0;    // annual cosine modulation, peak at epoch year start

    std::uint32_t domain_max = kDefaultDomainMax;
    std::int64_t start_epoch = 1609459200;  // first timestamp (2021-01-01T00:00Z)
    Unit unit = Unit::watts;
};

enum class PresetScale { small, medium, large };

/// Calibrated presets (small: n=1,000; medium: n=100,000; large:
/// n=1,000,000; all half-hourly, m=336) targeting the summary statistics of
/// a national residential population: mean ~725 W, population std ~950 W,
/// ~5% zero readings, values within [0, 36000] W.
SynthConfig default_calibrated_config(PresetScale scale);

/// Generates the population. Fully determined by config (including seed):
/// household h draws from an independent SplitMix64 stream seeded with
/// mix64(seed ^ mix64(h+1)), so output is bit-identical for any worker
/// count.
Dataset generate(const SynthConfig& config, unsigned threads = 0);

/// JSON (de)serialization of SynthConfig, for `generate --config`.
SynthConfig synth_config_from_json(const std::string& json_text);
std::string synth_config_to_json(const SynthConfig& config);
SynthConfig load_synth_config(const std::filesystem::path& path);

}  // namespace unitrace
