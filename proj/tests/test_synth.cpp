#include <doctest.h>

#include "support/helpers.hpp"
#include "unitrace/engine.hpp"
#include "unitrace/stats.hpp"
#include "unitrace/synth.hpp"

using namespace unitrace;
using namespace testsupport;

namespace {

SynthConfig tiny_config() {
    SynthConfig c = default_calibrated_config(PresetScale::small);
    c.n = 60;
    c.m = 96;
    return c;
}

}  // namespace

TEST_CASE("generate: same config and seed give bit-identical datasets") {
    const SynthConfig c = tiny_config();
    const Dataset a = generate(c);
    const Dataset b = generate(c);
    CHECK(a == b);

    SynthConfig other = c;
    other.seed = c.seed + 1;
    CHECK_FALSE(generate(other) == a);
}

TEST_CASE("generate: output independent of worker count") {
    const SynthConfig c = tiny_config();
    CHECK(generate(c, 1) == generate(c, 3));
    CHECK(generate(c, 1) == generate(c, 8));
}

TEST_CASE("generate: degenerate config collapses to identical series") {
    SynthConfig c = tiny_config();
    c.noise_sigma = 0.0;
    c.scale_sigma = 0.0;
    c.scale_mu = 0.0;
    c.time_shift_max = 0;
    c.zero_prob = 0.0;
    c.missing_prob = 0.0;
    const Dataset d = generate(c);
    const UniquenessResult r = uniqueness_curve(d, 2, RoundingOrder(0));
    for (const auto& p : r.per_t) {
        CHECK(*p.u == 0.0);
        CHECK(p.included_count == c.n);
    }
}

TEST_CASE("generate: missing_prob=1 leaves every window undefined") {
    SynthConfig c = tiny_config();
    c.n = 10;
    c.missing_prob = 1.0;
    const Dataset d = generate(c);
    const UniquenessResult r = uniqueness_curve(d, 2, RoundingOrder(0));
    CHECK(r.undefined_windows == r.per_t.size());
    CHECK_FALSE(r.mean_u.has_value());
}

TEST_CASE("generate: values stay within the domain") {
    SplitMix64 rng(31337);
    for (int round = 0; round < 5; ++round) {
        SynthConfig c = tiny_config();
        c.seed = rng.next_u64();
        c.scale_sigma = 1.5;  // fat tails to provoke clamping
        const Dataset d = generate(c);
        for (std::size_t r = 0; r < d.series_count(); ++r)
            for (std::size_t col = 0; col < d.timestamp_count(); ++col)
                if (const auto v = d.cell(r, col)) CHECK(*v <= d.domain_max());
    }
}

TEST_CASE("generate: missing fraction tracks missing_prob under bursts") {
    SynthConfig c = tiny_config();
    c.n = 300;
    c.m = 336;
    c.missing_prob = 0.2;
    c.missing_burst_len = 3;
    const SummaryStats s = summary(generate(c));
    CHECK(s.missing_fraction == doctest::Approx(0.2).epsilon(0.08));
}

TEST_CASE("generate: zero_prob drives the zero fraction") {
    SynthConfig c = tiny_config();
    c.n = 300;
    c.zero_prob = 0.25;
    const SummaryStats s = summary(generate(c));
    CHECK(s.zero_fraction >= 0.2);
    CHECK(s.zero_fraction <= 0.32);
}

TEST_CASE("generate: timestamps follow start_epoch and step") {
    SynthConfig c = tiny_config();
    c.m = 4;
    c.n = 2;
    const Dataset d = generate(c);
    CHECK(d.timestamps()[0] == c.start_epoch);
    CHECK(d.timestamps()[3] == c.start_epoch + 3 * c.step_seconds);
    CHECK(d.step_seconds() == c.step_seconds);
}

TEST_CASE("config validation") {
    SynthConfig c = tiny_config();
    c.base_profile.pop_back();  // p*step != 86400
    CHECK_THROWS_AS(generate(c), ConfigError);

    c = tiny_config();
    c.zero_prob = 1.5;
    CHECK_THROWS_AS(generate(c), ConfigError);

    c = tiny_config();
    c.missing_burst_len = 0;
    CHECK_THROWS_AS(generate(c), ConfigError);

    c = tiny_config();
    c.n = 0;
    CHECK_THROWS_AS(generate(c), ConfigError);

    c = tiny_config();
    c.noise_sigma = -0.1;
    CHECK_THROWS_AS(generate(c), ConfigError);
}

TEST_CASE("presets: expected shapes") {
    const SynthConfig small = default_calibrated_config(PresetScale::small);
    CHECK(small.n == 1000);
    CHECK(small.m == 336);
    CHECK(small.step_seconds == 1800);
    CHECK(small.base_profile.size() * small.step_seconds == 86400);

    const SynthConfig medium = default_calibrated_config(PresetScale::medium);
    CHECK(medium.n == 100000);
    const SynthConfig large = default_calibrated_config(PresetScale::large);
    CHECK(large.n == 1000000);

    const Dataset d = generate(small);
    CHECK(d.series_count() == 1000);
    CHECK(d.timestamp_count() == 336);
}

TEST_CASE("small preset lands near the calibration targets") {
    // The binding check (medium preset, tight tolerances) lives in the
    // acceptance suite; this catches gross calibration drift early.
    const Dataset d = generate(default_calibrated_config(PresetScale::small));
    const SummaryStats s = summary(d);
    CHECK(s.mean > 500.0);
    CHECK(s.mean < 1000.0);
    CHECK(s.zero_fraction > 0.02);
    CHECK(s.zero_fraction < 0.12);
}

TEST_CASE("config JSON round trip") {
    SynthConfig c = tiny_config();
    c.seed = 999;
    c.seasonal_amplitude = 0.25;
    const std::string text = synth_config_to_json(c);
    const SynthConfig back = synth_config_from_json(text);
    CHECK(back.n == c.n);
    CHECK(back.m == c.m);
    CHECK(back.seed == 999);
    CHECK(back.seasonal_amplitude == 0.25);
    CHECK(back.base_profile == c.base_profile);
    CHECK(generate(back) == generate(c));

    const SynthConfig preset = synth_config_from_json("{\"preset\": \"medium\", \"n\": 5}");
    CHECK(preset.n == 5);
    CHECK(preset.m == 336);
    CHECK_THROWS_AS(synth_config_from_json("{\"preset\": \"huge\"}"), ConfigError);
    CHECK_THROWS_AS(synth_config_from_json("not json"), ConfigError);
}
