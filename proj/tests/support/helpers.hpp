#pragma once

// Shared helpers for the test suites: fixture construction, a seeded random
// dataset generator, an independent entropy oracle, and a CLI process
// runner.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "unitrace/dataset.hpp"
#include "unitrace/degrade.hpp"
#include "unitrace/rng.hpp"

namespace testsupport {

using unitrace::Dataset;
using unitrace::RoundingOrder;
using unitrace::SplitMix64;
using unitrace::WindowSpec;

using Cell = std::optional<std::uint32_t>;
using Row = std::pair<std::string, std::vector<Cell>>;

inline Dataset make_dataset(const std::vector<Row>& rows, std::int64_t step = 1,
                            std::int64_t first_ts = 0,
                            std::uint32_t domain_max = unitrace::kDefaultDomainMax) {
    const std::size_t n = rows.size();
    const std::size_t m = rows.front().second.size();
    std::vector<std::string> ids;
    std::vector<std::uint32_t> values(n * m, 0);
    std::vector<std::uint8_t> present(n * m, 0);
    for (std::size_t r = 0; r < n; ++r) {
        ids.push_back(rows[r].first);
        for (std::size_t c = 0; c < m; ++c) {
            if (rows[r].second[c]) {
                values[r * m + c] = *rows[r].second[c];
                present[r * m + c] = 1;
            }
        }
    }
    std::vector<std::int64_t> timestamps(m);
    for (std::size_t c = 0; c < m; ++c) timestamps[c] = first_ts + static_cast<std::int64_t>(c) * step;
    return Dataset::create(std::move(ids), std::move(timestamps), step, std::move(values),
                           std::move(present), unitrace::Unit::watts, domain_max);
}

/// The 4-series fixture used throughout the engine examples.
inline Dataset abcd_fixture() {
    return make_dataset({
        {"A", {1, 2, 3, 4}},
        {"B", {1, 2, 3, 5}},
        {"C", {1, 2, 3, 4}},
        {"D", {0, 2, 3, 4}},
    });
}

/// Random dataset mixing narrow/wide value supports and duplicated rows so
/// collisions actually occur at every rounding order.
inline Dataset random_dataset(SplitMix64& rng, std::size_t max_n = 200, std::size_t max_m = 50,
                              double missing_prob = 0.10) {
    const std::size_t n = 1 + rng.next_below(max_n);
    const std::size_t m = 1 + rng.next_below(max_m);

    // Value support: tiny supports collide even raw, wide ones only after
    // strong rounding.
    std::uint32_t support = 0;
    switch (rng.next_below(4)) {
        case 0: support = 3; break;
        case 1: support = 12; break;
        case 2: support = 600; break;
        default: support = 36000; break;
    }

    std::vector<std::string> ids;
    std::vector<std::uint32_t> values(n * m, 0);
    std::vector<std::uint8_t> present(n * m, 0);
    for (std::size_t r = 0; r < n; ++r) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "s%05zu", r);
        ids.emplace_back(buf);
        const bool copy_row = r > 0 && rng.next_unit() < 0.25;
        if (copy_row) {
            const std::size_t src = rng.next_below(r);
            for (std::size_t c = 0; c < m; ++c) {
                values[r * m + c] = values[src * m + c];
                present[r * m + c] = present[src * m + c];
            }
            continue;
        }
        for (std::size_t c = 0; c < m; ++c) {
            if (missing_prob > 0.0 && rng.next_unit() < missing_prob) continue;
            values[r * m + c] = static_cast<std::uint32_t>(rng.next_below(support + 1));
            present[r * m + c] = 1;
        }
    }
    std::vector<std::int64_t> timestamps(m);
    for (std::size_t c = 0; c < m; ++c) timestamps[c] = static_cast<std::int64_t>(c);
    return Dataset::create(std::move(ids), std::move(timestamps), 1, std::move(values),
                           std::move(present));
}

/// Direct multiset evaluation of window entropy: independent of the
/// engine's hash-grouping path (ordered map keyed by the actual vectors).
inline std::optional<double> entropy_oracle(const Dataset& d, WindowSpec spec,
                                            RoundingOrder order) {
    std::map<std::vector<std::uint32_t>, std::size_t> classes;
    std::size_t included = 0;
    for (std::size_t r = 0; r < d.series_count(); ++r) {
        std::vector<std::uint32_t> window;
        bool complete = true;
        for (std::size_t j = 0; j < spec.k; ++j) {
            const auto cell = d.cell(r, spec.t + j);
            if (!cell) {
                complete = false;
                break;
            }
            window.push_back(unitrace::round_order(*cell, order));
        }
        if (!complete) continue;
        ++included;
        ++classes[window];
    }
    if (included == 0) return std::nullopt;
    double e = 0.0;
    for (const auto& [key, count] : classes) {
        const double p = static_cast<double>(count) / static_cast<double>(included);
        e -= p * std::log2(p);
    }
    return e;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

/// Runs the CLI binary with the given argument string, capturing stdout.
inline CliResult run_cli(const std::string& args) {
    const std::string command = std::string(UNITRACE_CLI_PATH) + " " + args + " 2>/dev/null";
    CliResult result;
    std::FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return result;
    char buffer[4096];
    std::size_t got;
    while ((got = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0)
        result.output.append(buffer, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("unitrace_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testsupport
