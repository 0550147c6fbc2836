#include <doctest.h>

#include <algorithm>
#include <random>

#include "support/helpers.hpp"
#include "unitrace/dataset.hpp"

using namespace unitrace;
using namespace testsupport;

namespace {

Dataset load_text(const std::string& csv, const ParseOptions& options = {}) {
    const auto dir = scratch_dir("dataset_load");
    const auto path = dir / "d.csv";
    write_text(path, csv);
    return load_long_csv(path, options);
}

}  // namespace

TEST_CASE("load: canonical two-by-two file") {
    const Dataset d = load_text("series_id,timestamp,value\nA,0,10\nA,1,20\nB,0,10\nB,1,30\n");
    CHECK(d.series_count() == 2);
    CHECK(d.timestamp_count() == 2);
    CHECK(d.cell(0, 0) == 10);
    CHECK(d.cell(0, 1) == 20);
    CHECK(d.cell(1, 0) == 10);
    CHECK(d.cell(1, 1) == 30);
    CHECK(d.step_seconds() == 1);
    CHECK(d.unit() == Unit::watts);
}

TEST_CASE("load: absent pair becomes a missing cell") {
    const Dataset d = load_text("series_id,timestamp,value\nA,0,10\nA,2,20\nB,0,5\nB,1,6\nB,2,7\n");
    CHECK(d.timestamp_count() == 3);
    CHECK_FALSE(d.present(0, 1));
    CHECK(d.cell(0, 0) == 10);
    CHECK(d.cell(0, 2) == 20);
    CHECK(d.cell(1, 1) == 6);
}

TEST_CASE("load: empty value field is a missing measure") {
    const Dataset d = load_text("series_id,timestamp,value\nA,0,10\nA,1,\n");
    CHECK(d.series_count() == 1);
    CHECK_FALSE(d.present(0, 1));
}

TEST_CASE("load: negative value names the offending line") {
    try {
        load_text("series_id,timestamp,value\nA,0,-5\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
}

TEST_CASE("load: value above domain_max rejected") {
    CHECK_THROWS_AS(load_text("series_id,timestamp,value\nA,0,36001\n"), ParseError);
    // configurable ceiling
    ParseOptions opts;
    opts.domain_max = 50000;
    const Dataset d = load_text("series_id,timestamp,value\nA,0,36001\n", opts);
    CHECK(d.cell(0, 0) == 36001);
}

TEST_CASE("load: malformed rows") {
    CHECK_THROWS_AS(load_text("series_id,timestamp,value\nA,0,x\n"), ParseError);
    CHECK_THROWS_AS(load_text("series_id,timestamp,value\nA,0\n"), ParseError);
    CHECK_THROWS_AS(load_text("series_id,timestamp,value\nA,zero,5\n"), ParseError);
    CHECK_THROWS_AS(load_text("series_id,timestamp,value\n,0,5\n"), ParseError);
    CHECK_THROWS_AS(load_text("bad,header,here\nA,0,5\n"), ParseError);
}

TEST_CASE("load: duplicate pair rejected, even when one is missing-valued") {
    CHECK_THROWS_AS(load_text("series_id,timestamp,value\nA,0,1\nA,0,2\n"), DuplicateError);
    CHECK_THROWS_AS(load_text("series_id,timestamp,value\nA,0,\nA,0,\n"), DuplicateError);
}

TEST_CASE("load: irregular grid rejected") {
    CHECK_THROWS_AS(load_text("series_id,timestamp,value\nA,0,1\nA,1,2\nA,3,3\n"), GridError);
}

TEST_CASE("load: sidecar metadata applied") {
    const auto dir = scratch_dir("dataset_sidecar");
    write_text(dir / "d.csv", "series_id,timestamp,value\nA,0,10\nA,7200,20\n");
    write_text(dir / "d.meta.json",
               "{\"unit\": \"Wh\", \"step_seconds\": 7200, \"domain_max\": 100}\n");
    const Dataset d = load_long_csv(dir / "d.csv");
    CHECK(d.unit() == Unit::watt_hours);
    CHECK(d.step_seconds() == 7200);
    CHECK(d.domain_max() == 100);

    // sidecar step contradicting the grid
    write_text(dir / "e.csv", "series_id,timestamp,value\nA,0,10\nA,1800,20\n");
    write_text(dir / "e.meta.json", "{\"step_seconds\": 3600}\n");
    CHECK_THROWS_AS(load_long_csv(dir / "e.csv"), GridError);
}

TEST_CASE("create: invariant violations") {
    CHECK_THROWS_AS(make_dataset({{"", {1}}}), ValidationError);
    CHECK_THROWS_AS(make_dataset({{"A", {1}}, {"A", {2}}}), ValidationError);
    CHECK_THROWS_AS(make_dataset({{"A", {50000}}}), ValidationError);
}

TEST_CASE("window: fixture with a missing cell") {
    const Dataset d = make_dataset({
        {"s1", {1, 2, 3}},
        {"s2", {1, 2, 4}},
        {"s3", {std::nullopt, 2, 3}},
    });
    const WindowSet w = window(d, {0, 2});
    REQUIRE(w.rows.size() == 2);
    CHECK(w.excluded_count == 1);
    CHECK(w.rows[0].first == "s1");
    CHECK(w.rows[0].second == std::vector<std::uint32_t>{1, 2});
    CHECK(w.rows[1].first == "s2");

    // identity window on complete data
    const Dataset full = make_dataset({{"a", {1, 2}}, {"b", {3, 4}}});
    const WindowSet idw = window(full, {0, 2});
    CHECK(idw.rows.size() == 2);
    CHECK(idw.excluded_count == 0);
    CHECK(idw.rows[0].second == std::vector<std::uint32_t>{1, 2});

    CHECK_THROWS_AS(window(d, {2, 2}), BoundsError);
    CHECK_THROWS_AS(window(d, {0, 4}), BoundsError);
}

TEST_CASE("subsample: identity, singleton, canonical order") {
    const Dataset d = make_dataset({{"A", {1, 2}}, {"B", {3, 4}}, {"C", {5, 6}}});
    CHECK(subsample(d, d.series_ids()) == d);

    const std::vector<std::string> one{"B"};
    const Dataset s1 = subsample(d, one);
    CHECK(s1.series_count() == 1);
    CHECK(s1.cell(0, 0) == 3);

    const std::vector<std::string> rev{"B", "A"};
    const Dataset s2 = subsample(d, rev);
    REQUIRE(s2.series_count() == 2);
    CHECK(s2.series_ids()[0] == "A");
    CHECK(s2.series_ids()[1] == "B");

    const std::vector<std::string> unknown{"Z"};
    CHECK_THROWS_AS(subsample(d, unknown), LookupError);
    const std::vector<std::string> dup{"A", "A"};
    CHECK_THROWS_AS(subsample(d, dup), LookupError);
}

TEST_CASE("round-trip and order-insensitive loading") {
    SplitMix64 rng(20240601);
    const auto dir = scratch_dir("dataset_roundtrip");
    for (int round = 0; round < 30; ++round) {
        const Dataset d = random_dataset(rng, 40, 12);
        const auto path = dir / "rt.csv";
        write_long_csv(d, path);
        const Dataset back = load_long_csv(path);
        CHECK(back == d);

        // permute the data rows; reload must be identical
        std::string text = read_text(path);
        std::vector<std::string> lines;
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string::npos) end = text.size();
            lines.push_back(text.substr(pos, end - pos));
            pos = end + 1;
        }
        std::mt19937 shuffle_rng(static_cast<unsigned>(round));
        std::shuffle(lines.begin() + 1, lines.end(), shuffle_rng);
        std::string shuffled = lines.front();
        for (std::size_t i = 1; i < lines.size(); ++i) shuffled += "\n" + lines[i];
        shuffled += "\n";
        write_text(path, shuffled);
        CHECK(load_long_csv(path) == d);
    }
}

TEST_CASE("window partition invariant over random data") {
    SplitMix64 rng(77);
    for (int round = 0; round < 40; ++round) {
        const Dataset d = random_dataset(rng, 60, 16);
        const std::size_t m = d.timestamp_count();
        const std::size_t k = 1 + rng.next_below(m);
        const std::size_t t = rng.next_below(m - k + 1);
        const WindowSet w = window(d, {t, k});
        CHECK(w.rows.size() + w.excluded_count == d.series_count());
        for (const auto& [id, values] : w.rows) CHECK(values.size() == k);
        CHECK(subsample(d, d.series_ids()) == d);
    }
}

TEST_CASE("fingerprint: stable and content-sensitive") {
    const Dataset d = make_dataset({{"A", {1, 2}}, {"B", {3, 4}}});
    const Dataset e = make_dataset({{"A", {1, 2}}, {"B", {3, 5}}});
    CHECK(content_fingerprint(d) == content_fingerprint(d));
    CHECK(content_fingerprint(d) != content_fingerprint(e));
    CHECK(fingerprint_string(d).substr(0, 8) == "fnv1a64:");
}
