#include "unitrace/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "unitrace/rng.hpp"

namespace unitrace {

namespace {

constexpr std::int64_t kYearSeconds = 365LL * 86400;

void validate(const SynthConfig& c) {
    if (c.n < 1) throw ConfigError("n must be >= 1");
    if (c.m < 1) throw ConfigError("m must be >= 1");
    if (c.step_seconds <= 0) throw ConfigError("step_seconds must be positive");
    if (c.base_profile.empty()) throw ConfigError("base_profile must not be empty");
    if (static_cast<std::int64_t>(c.base_profile.size()) * c.step_seconds != 86400)
        throw ConfigError("base_profile length * step_seconds must equal 86400 (one day)");
    for (const double v : c.base_profile) {
        if (!(v >= 0.0)) throw ConfigError("base_profile values must be non-negative");
    }
    if (c.scale_sigma < 0.0) throw ConfigError("scale_sigma must be >= 0");
    if (c.noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
    if (c.zero_prob < 0.0 || c.zero_prob > 1.0) throw ConfigError("zero_prob must be in [0, 1]");
    if (c.missing_prob < 0.0 || c.missing_prob > 1.0)
        throw ConfigError("missing_prob must be in [0, 1]");
    if (c.missing_burst_len < 1) throw ConfigError("missing_burst_len must be >= 1");
    if (c.seasonal_amplitude < 0.0) throw ConfigError("seasonal_amplitude must be >= 0");
    if (c.domain_max < 1) throw ConfigError("domain_max must be >= 1");
    if (c.start_epoch < 0) throw ConfigError("start_epoch must be non-negative");
}

std::vector<std::string> make_ids(std::size_t n) {
    std::size_t width = 1;
    for (std::size_t v = n - 1; v >= 10; v /= 10) ++width;
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string digits = std::to_string(i);
        std::string id = "h";
        id.append(width - digits.size(), '0');
        id += digits;
        ids.push_back(std::move(id));
    }
    return ids;
}

}  // namespace

Dataset generate(const SynthConfig& config, unsigned threads) {
    validate(config);
    const std::size_t n = config.n;
    const std::size_t m = config.m;
    const std::size_t p = config.base_profile.size();

    // Burst-start probability calibrated so the stationary missing fraction
    // equals missing_prob: bursts have fixed length L, gaps are geometric.
    const double pl = static_cast<double>(config.missing_burst_len);
    const double missing_start =
        config.missing_prob <= 0.0
            ? 0.0
            : config.missing_prob / (pl - config.missing_prob * (pl - 1.0));

    const double noise_mu = -0.5 * config.noise_sigma * config.noise_sigma;  // unit-mean noise

    // Seasonal factor is shared across households (same timestamps).
    std::vector<double> seasonal(m, 1.0);
    if (config.seasonal_amplitude > 0.0) {
        for (std::size_t t = 0; t < m; ++t) {
            const std::int64_t epoch = config.start_epoch +
                                       static_cast<std::int64_t>(t) * config.step_seconds;
            const double phase = static_cast<double>(epoch % kYearSeconds) /
                                 static_cast<double>(kYearSeconds);
            seasonal[t] = 1.0 + config.seasonal_amplitude *
                                    std::cos(2.0 * 3.141592653589793238462643383 * phase);
        }
    }

    std::vector<std::uint32_t> values(n * m, 0);
    std::vector<std::uint8_t> present(n * m, 0);

    auto generate_household = [&](std::size_t h) {
        // Independent per-household stream: sub_seed = mix64(seed ^ mix64(h+1)).
        SplitMix64 rng(mix64(config.seed ^ mix64(static_cast<std::uint64_t>(h) + 1)));

        std::int64_t shift = 0;
        if (config.time_shift_max > 0) {
            const std::uint64_t span = 2 * static_cast<std::uint64_t>(config.time_shift_max) + 1;
            shift = static_cast<std::int64_t>(rng.next_below(span)) -
                    static_cast<std::int64_t>(config.time_shift_max);
        }
        double scale = std::exp(config.scale_mu);
        if (config.scale_sigma > 0.0)
            scale = std::exp(config.scale_mu + config.scale_sigma * rng.next_normal());

        std::uint32_t* row_values = values.data() + h * m;
        std::uint8_t* row_present = present.data() + h * m;
        std::size_t burst_left = 0;
        for (std::size_t t = 0; t < m; ++t) {
            if (burst_left > 0) {
                --burst_left;
                continue;  // masked missing, cell stays absent
            }
            if (missing_start > 0.0 && rng.next_unit() < missing_start) {
                burst_left = config.missing_burst_len - 1;
                continue;
            }
            double noise = 1.0;
            if (config.noise_sigma > 0.0)
                noise = std::exp(noise_mu + config.noise_sigma * rng.next_normal());
            const std::size_t idx = static_cast<std::size_t>(
                ((static_cast<std::int64_t>(t) + shift) % static_cast<std::int64_t>(p) +
                 static_cast<std::int64_t>(p)) %
                static_cast<std::int64_t>(p));
            const double raw = config.base_profile[idx] * scale * seasonal[t] * noise;
            long long v = std::llround(raw);
            if (v < 0) v = 0;
            if (v > static_cast<long long>(config.domain_max))
                v = static_cast<long long>(config.domain_max);
            if (config.zero_prob > 0.0 && rng.next_unit() < config.zero_prob) v = 0;
            row_values[t] = static_cast<std::uint32_t>(v);
            row_present[t] = 1;
        }
    };

    unsigned workers = threads != 0 ? threads : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t h = 0; h < n; ++h) generate_household(h);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(n, static_cast<std::size_t>(w) * chunk);
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                for (std::size_t h = begin; h < end; ++h) generate_household(h);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<std::int64_t> timestamps(m);
    for (std::size_t t = 0; t < m; ++t)
        timestamps[t] = config.start_epoch + static_cast<std::int64_t>(t) * config.step_seconds;

    return Dataset::create(make_ids(n), std::move(timestamps), config.step_seconds,
                           std::move(values), std::move(present), config.unit, config.domain_max);
}

SynthConfig default_calibrated_config(PresetScale scale) {
    SynthConfig c;
    switch (scale) {
        case PresetScale::small: c.n = 1000; break;
        case PresetScale::medium: c.n = 100000; break;
        case PresetScale::large: c.n = 1000000; break;
    }
    c.m = 336;
    c.step_seconds = 1800;
    c.seed = 746025;
    c.unit = Unit::watts;
    c.domain_max = kDefaultDomainMax;
    c.start_epoch = 1609459200;  // 2021-01-01T00:00:00Z

    // Two-peak diurnal shape (noon and evening), 48 half-hour steps from
    // midnight, scaled below so the population mean lands near 725 W.
    static const double shape[48] = {
        0.40, 0.38, 0.36, 0.35, 0.34, 0.33, 0.32, 0.32,  // 00:00-04:00
        0.33, 0.34, 0.36, 0.38, 0.45, 0.55, 0.68, 0.80,  // 04:00-08:00
        0.88, 0.92, 0.93, 0.95, 1.00, 1.08, 1.18, 1.28,  // 08:00-12:00
        1.34, 1.30, 1.18, 1.05, 0.96, 0.90, 0.88, 0.88,  // 12:00-16:00
        0.92, 1.02, 1.18, 1.38, 1.58, 1.72, 1.78, 1.72,  // 16:00-20:00
        1.58, 1.40, 1.18, 0.96, 0.78, 0.62, 0.52, 0.45,  // 20:00-24:00
    };
    double shape_mean = 0.0;
    for (const double v : shape) shape_mean += v;
    shape_mean /= 48.0;

    c.zero_prob = 0.05;
    c.scale_sigma = 0.85;
    c.scale_mu = -0.5 * c.scale_sigma * c.scale_sigma;  // unit-mean household scale
    c.noise_sigma = 0.004;
    c.time_shift_max = 4;
    c.missing_prob = 0.01;
    c.missing_burst_len = 4;
    c.seasonal_amplitude = 0.0;

    const double target_base_mean = 725.0 / (1.0 - c.zero_prob);
    c.base_profile.resize(48);
    for (std::size_t i = 0; i < 48; ++i)
        c.base_profile[i] = shape[i] * target_base_mean / shape_mean;
    return c;
}

SynthConfig synth_config_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid synth config JSON: ") + e.what());
    }
    SynthConfig c = default_calibrated_config(PresetScale::small);
    try {
        if (j.contains("preset")) {
            const auto name = j.at("preset").get<std::string>();
            if (name == "small") c = default_calibrated_config(PresetScale::small);
            else if (name == "medium") c = default_calibrated_config(PresetScale::medium);
            else if (name == "large") c = default_calibrated_config(PresetScale::large);
            else throw ConfigError("unknown preset '" + name + "'");
        }
        if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
        if (j.contains("m")) c.m = j.at("m").get<std::size_t>();
        if (j.contains("step_seconds")) c.step_seconds = j.at("step_seconds").get<std::int64_t>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("base_profile"))
            c.base_profile = j.at("base_profile").get<std::vector<double>>();
        if (j.contains("scale_mu")) c.scale_mu = j.at("scale_mu").get<double>();
        if (j.contains("scale_sigma")) c.scale_sigma = j.at("scale_sigma").get<double>();
        if (j.contains("noise_sigma")) c.noise_sigma = j.at("noise_sigma").get<double>();
        if (j.contains("zero_prob")) c.zero_prob = j.at("zero_prob").get<double>();
        if (j.contains("missing_prob")) c.missing_prob = j.at("missing_prob").get<double>();
        if (j.contains("missing_burst_len"))
            c.missing_burst_len = j.at("missing_burst_len").get<std::size_t>();
        if (j.contains("time_shift_max"))
            c.time_shift_max = j.at("time_shift_max").get<std::size_t>();
        if (j.contains("seasonal_amplitude"))
            c.seasonal_amplitude = j.at("seasonal_amplitude").get<double>();
        if (j.contains("domain_max")) c.domain_max = j.at("domain_max").get<std::uint32_t>();
        if (j.contains("start_epoch")) c.start_epoch = j.at("start_epoch").get<std::int64_t>();
        if (j.contains("unit")) c.unit = unit_from_name(j.at("unit").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid synth config field: ") + e.what());
    }
    return c;
}

std::string synth_config_to_json(const SynthConfig& c) {
    nlohmann::json j;
    j["n"] = c.n;
    j["m"] = c.m;
    j["step_seconds"] = c.step_seconds;
    j["seed"] = c.seed;
    j["base_profile"] = c.base_profile;
    j["scale_mu"] = c.scale_mu;
    j["scale_sigma"] = c.scale_sigma;
    j["noise_sigma"] = c.noise_sigma;
    j["zero_prob"] = c.zero_prob;
    j["missing_prob"] = c.missing_prob;
    j["missing_burst_len"] = c.missing_burst_len;
    j["time_shift_max"] = c.time_shift_max;
    j["seasonal_amplitude"] = c.seasonal_amplitude;
    j["domain_max"] = c.domain_max;
    j["start_epoch"] = c.start_epoch;
    j["unit"] = std::string(unit_name(c.unit));
    return j.dump(2);
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return synth_config_from_json(text);
}

}  // namespace unitrace
