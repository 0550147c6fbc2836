// unitrace: re-identification risk analysis for numeric time-series
// populations. Subcommands: generate | audit | sweep | correlate | match.
//
// Exit codes: 0 success, 2 input error, 3 parameter error, 4 alignment
// error, 5 no-match.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unitrace/dataset.hpp"
#include "unitrace/degrade.hpp"
#include "unitrace/engine.hpp"
#include "unitrace/report.hpp"
#include "unitrace/stats.hpp"
#include "unitrace/synth.hpp"

namespace fs = std::filesystem;
using namespace unitrace;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitParams = 3;
constexpr int kExitAlignment = 4;
constexpr int kExitNoMatch = 5;

[[noreturn]] void param_error(const std::string& msg) {
    throw BoundsError(msg);
}

// Parses "1,3,5" and "1-7" (and mixes) into a sorted, deduplicated list.
std::vector<long long> parse_int_list(const std::string& text, const char* what) {
    std::vector<long long> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string token = text.substr(pos, comma - pos);
        if (token.empty()) param_error(std::string("empty element in ") + what + " list");
        const std::size_t dash = token.find('-', 1);  // allow leading digit only
        try {
            if (dash != std::string::npos) {
                const long long lo = std::stoll(token.substr(0, dash));
                const long long hi = std::stoll(token.substr(dash + 1));
                if (hi < lo) param_error(std::string("descending range in ") + what);
                for (long long v = lo; v <= hi; ++v) out.push_back(v);
            } else {
                out.push_back(std::stoll(token));
            }
        } catch (const std::exception&) {
            param_error(std::string("cannot parse ") + what + " element '" + token + "'");
        }
        pos = comma + 1;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) param_error(std::string("empty ") + what + " list");
    return out;
}

std::vector<std::size_t> parse_k_list(const std::string& text) {
    std::vector<std::size_t> ks;
    for (const long long v : parse_int_list(text, "k")) {
        if (v < 1) param_error("k values must be >= 1");
        ks.push_back(static_cast<std::size_t>(v));
    }
    return ks;
}

std::vector<int> parse_order_list(const std::string& text, bool allow_extended) {
    std::vector<int> orders;
    for (const long long v : parse_int_list(text, "rounding order")) {
        if (v < 0 || v > RoundingOrder::kAbsoluteMax)
            param_error("rounding orders must be in [0, 9]");
        if (v > RoundingOrder::kDefaultMax && !allow_extended)
            param_error("rounding orders above 3 need --allow-extended-rounding");
        orders.push_back(static_cast<int>(v));
    }
    return orders;
}

std::vector<int> parse_hours(const std::string& text) {
    std::vector<int> hours;
    for (const long long v : parse_int_list(text, "hours")) {
        if (v < 0 || v > 23) param_error("hours must be in [0, 23]");
        hours.push_back(static_cast<int>(v));
    }
    return hours;
}

struct TimeFlags {
    std::optional<std::int64_t> from_ts;
    std::optional<std::int64_t> to_ts;
    std::string hours_text;
    std::optional<std::int64_t> epoch_origin;
    std::int64_t ts_unit_seconds = 1;
    std::int32_t utc_offset = 0;

    std::vector<int> hours() const {
        return hours_text.empty() ? std::vector<int>{} : parse_hours(hours_text);
    }
};

void add_time_flags(CLI::App* cmd, TimeFlags& flags) {
    cmd->add_option("--from", flags.from_ts, "Keep windows starting at or after this timestamp");
    cmd->add_option("--to", flags.to_ts, "Keep windows starting at or before this timestamp");
    cmd->add_option("--hours", flags.hours_text,
                    "Keep windows whose start falls in these hours of day (list/range)");
    cmd->add_option("--epoch-origin", flags.epoch_origin,
                    "Epoch seconds of timestamp value 0 (for index-style grids)");
    cmd->add_option("--ts-unit-seconds", flags.ts_unit_seconds,
                    "Seconds per timestamp unit when --epoch-origin is used (default 1)");
    cmd->add_option("--utc-offset", flags.utc_offset,
                    "Fixed UTC offset in seconds for calendar grouping");
}

// Timestamps are taken as UTC epoch seconds unless an explicit mapping is
// given; small values are rejected as index-style grids needing one.
EpochMapping resolve_mapping(const Dataset& dataset, const TimeFlags& flags) {
    if (flags.epoch_origin)
        return EpochMapping{*flags.epoch_origin, flags.ts_unit_seconds, flags.utc_offset};
    if (dataset.timestamps().front() < 100000000)
        throw ConfigError(
            "timestamps look like grid indices, not epoch seconds; pass --epoch-origin (and "
            "--ts-unit-seconds) to give them calendar meaning");
    return EpochMapping{0, 1, flags.utc_offset};
}

// Window-start filter over t indices, shared by all k values of a grid.
std::vector<std::size_t> build_t_filter(const Dataset& dataset, const TimeFlags& flags) {
    const std::vector<int> hours = flags.hours();
    if (!flags.from_ts && !flags.to_ts && hours.empty()) return {};
    if (flags.from_ts && flags.to_ts && *flags.from_ts > *flags.to_ts)
        param_error("--from is after --to");

    std::optional<EpochMapping> mapping;
    if (!hours.empty()) mapping = resolve_mapping(dataset, flags);
    std::set<int> hour_set(hours.begin(), hours.end());

    std::vector<std::size_t> ts;
    for (std::size_t t = 0; t < dataset.timestamp_count(); ++t) {
        const std::int64_t stamp = dataset.timestamps()[t];
        if (flags.from_ts && stamp < *flags.from_ts) continue;
        if (flags.to_ts && stamp > *flags.to_ts) continue;
        if (!hour_set.empty()) {
            const std::int64_t local = mapping->to_epoch(stamp) + mapping->utc_offset_seconds;
            const std::int64_t day_sec = ((local % 86400) + 86400) % 86400;
            if (!hour_set.count(static_cast<int>(day_sec / 3600))) continue;
        }
        ts.push_back(t);
    }
    if (ts.empty()) param_error("time filters select no windows");
    return ts;
}

std::size_t defined_windows(const std::vector<GridCell>& grid) {
    std::size_t count = 0;
    for (const GridCell& cell : grid) count += cell.uniqueness.per_t.size();
    return count;
}

void ensure_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
}

std::string cell_csv_name(const char* what, const GridCell& cell) {
    return std::string(what) + "_k" + std::to_string(cell.k) + "_order" +
           std::to_string(cell.order) + ".csv";
}

int cmd_generate(const std::string& preset_name, const std::string& config_path,
                 CLI::App* cmd, SynthConfig flags_config, const std::string& out_path,
                 unsigned threads) {
    SynthConfig config;
    if (!config_path.empty()) {
        config = load_synth_config(config_path);
    } else {
        PresetScale scale = PresetScale::small;
        if (preset_name == "small") scale = PresetScale::small;
        else if (preset_name == "medium") scale = PresetScale::medium;
        else if (preset_name == "large") scale = PresetScale::large;
        else throw ConfigError("unknown preset '" + preset_name + "'");
        config = default_calibrated_config(scale);
    }
    // Explicit flags override preset/config-file values.
    auto passed = [&](const char* name) { return cmd->count(name) > 0; };
    if (passed("--n")) config.n = flags_config.n;
    if (passed("--m")) config.m = flags_config.m;
    if (passed("--seed")) config.seed = flags_config.seed;
    if (passed("--step-seconds")) config.step_seconds = flags_config.step_seconds;
    if (passed("--zero-prob")) config.zero_prob = flags_config.zero_prob;
    if (passed("--missing-prob")) config.missing_prob = flags_config.missing_prob;
    if (passed("--missing-burst")) config.missing_burst_len = flags_config.missing_burst_len;
    if (passed("--noise-sigma")) config.noise_sigma = flags_config.noise_sigma;
    if (passed("--scale-mu")) config.scale_mu = flags_config.scale_mu;
    if (passed("--scale-sigma")) config.scale_sigma = flags_config.scale_sigma;
    if (passed("--shift-max")) config.time_shift_max = flags_config.time_shift_max;
    if (passed("--seasonal-amplitude"))
        config.seasonal_amplitude = flags_config.seasonal_amplitude;
    if (passed("--domain-max")) config.domain_max = flags_config.domain_max;
    if (passed("--start-epoch")) config.start_epoch = flags_config.start_epoch;

    const Dataset dataset = generate(config, threads);
    const fs::path csv_path(out_path);
    if (csv_path.has_parent_path()) ensure_out_dir(csv_path.parent_path());
    write_long_csv(dataset, csv_path);
    write_metadata_sidecar(dataset, sidecar_path_for(csv_path));
    std::cout << build_generate_report(dataset, csv_path, config.seed) << '\n';
    return kExitOk;
}

int cmd_audit(const std::string& input, const std::string& k_text, const std::string& round_text,
              bool allow_extended, bool with_entropy, const TimeFlags& time_flags,
              unsigned threads, const std::string& out_dir, const std::string& format) {
    const std::vector<std::size_t> ks = parse_k_list(k_text);
    const std::vector<int> orders = parse_order_list(round_text, allow_extended);
    if (format != "json" && format != "csv") param_error("--format must be json or csv");

    const Dataset dataset = load_long_csv(input);
    ReportParams params;
    params.ks = ks;
    params.orders = orders;
    params.from_ts = time_flags.from_ts;
    params.to_ts = time_flags.to_ts;
    params.hours = time_flags.hours();
    params.with_entropy = with_entropy;
    params.threads = threads;

    EngineOptions options;
    options.threads = threads;
    options.t_values = build_t_filter(dataset, time_flags);

    const auto start = std::chrono::steady_clock::now();
    const std::vector<GridCell> grid = run_grid(dataset, ks, orders, with_entropy, options);
    TimingInfo timing;
    timing.total_seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();
    if (defined_windows(grid) == 0) param_error("time filters select no windows");

    const std::string report = build_audit_report(dataset, params, grid, timing);
    if (format == "json") {
        std::cout << report << '\n';
    } else {
        std::cout << "k,order,mean_u,min_u,max_u,undefined_windows" << (with_entropy ? ",mean_e" : "")
                  << '\n';
        for (const GridCell& cell : grid) {
            std::cout << cell.k << ',' << cell.order << ','
                      << (cell.uniqueness.mean_u ? std::to_string(*cell.uniqueness.mean_u) : "")
                      << ','
                      << (cell.uniqueness.min_u ? std::to_string(*cell.uniqueness.min_u) : "")
                      << ','
                      << (cell.uniqueness.max_u ? std::to_string(*cell.uniqueness.max_u) : "")
                      << ',' << cell.uniqueness.undefined_windows;
            if (with_entropy)
                std::cout << ','
                          << (cell.entropy && cell.entropy->mean_e
                                  ? std::to_string(*cell.entropy->mean_e)
                                  : "");
            std::cout << '\n';
        }
    }

    if (!out_dir.empty()) {
        ensure_out_dir(out_dir);
        const fs::path dir(out_dir);
        std::ofstream rep(dir / "report.json", std::ios::binary);
        rep << report << '\n';
        for (const GridCell& cell : grid) {
            write_uniqueness_csv(cell.uniqueness, dir / cell_csv_name("uniqueness", cell));
            if (cell.entropy) write_entropy_csv(*cell.entropy, dir / cell_csv_name("entropy", cell));
        }
    }
    return kExitOk;
}

int cmd_sweep(const std::string& input, const std::string& k_text, const std::string& round_text,
              bool allow_extended, const TimeFlags& time_flags, unsigned threads,
              const std::string& out_dir) {
    const std::vector<std::size_t> ks = parse_k_list(k_text);
    const std::vector<int> orders = parse_order_list(round_text, allow_extended);

    const Dataset dataset = load_long_csv(input);
    EngineOptions options;
    options.threads = threads;
    options.t_values = build_t_filter(dataset, time_flags);

    const auto start = std::chrono::steady_clock::now();
    const std::vector<GridCell> grid = run_grid(dataset, ks, orders, false, options);
    const double seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();
    if (defined_windows(grid) == 0) param_error("time filters select no windows");

    ensure_out_dir(out_dir);
    const fs::path dir(out_dir);
    std::vector<std::string> files;
    for (const int order : orders) {
        const fs::path path = dir / ("sweep_order" + std::to_string(order) + ".csv");
        write_sweep_csv(grid, order, path);
        files.push_back(path.string());
    }

    std::cout << "{\n  \"schema\": \"" << kReportSchema << "\",\n  \"command\": \"sweep\",\n"
              << "  \"files\": [";
    for (std::size_t i = 0; i < files.size(); ++i)
        std::cout << (i ? ", " : "") << '"' << files[i] << '"';
    std::cout << "],\n  \"timing\": {\"total_seconds\": " << seconds << "}\n}\n";
    return kExitOk;
}

int cmd_correlate(const std::string& input, std::size_t k, int order_value, bool allow_extended,
                  const std::vector<std::string>& aux_specs, bool monthly, bool hourly,
                  const TimeFlags& time_flags, unsigned threads, const std::string& out_dir) {
    if (order_value < 0 ||
        order_value > (allow_extended ? RoundingOrder::kAbsoluteMax : RoundingOrder::kDefaultMax))
        param_error("invalid rounding order");
    const RoundingOrder order = order_value <= RoundingOrder::kDefaultMax
                                    ? RoundingOrder(order_value)
                                    : RoundingOrder::extended(order_value);

    const Dataset dataset = load_long_csv(input);
    if (k < 1 || k > dataset.timestamp_count()) param_error("k outside [1, m]");

    EngineOptions options;
    options.threads = threads;
    options.t_values = build_t_filter(dataset, time_flags);

    const auto start = std::chrono::steady_clock::now();
    const CurvePair curves = combined_curves(dataset, k, order, options);
    const AuxSeries mean_series = population_mean_series(dataset);

    // Per-window points, defined windows only.
    std::vector<TimePoint> u_points, e_points;
    std::vector<double> u_vals, e_vals;
    for (std::size_t i = 0; i < curves.uniqueness.per_t.size(); ++i) {
        const UniquenessPoint& up = curves.uniqueness.per_t[i];
        const EntropyPoint& ep = curves.entropy.per_t[i];
        if (!up.u || !ep.e) continue;
        u_points.push_back({up.timestamp, *up.u});
        e_points.push_back({ep.timestamp, *ep.e});
        u_vals.push_back(*up.u);
        e_vals.push_back(*ep.e);
    }
    if (u_vals.empty()) param_error("no defined windows to correlate");

    std::vector<CorrelationEntry> correlations;
    std::vector<std::pair<std::string, AlignedPairs>> pair_files;

    correlations.push_back({"uniqueness", "entropy", pearson(u_vals, e_vals), u_vals.size()});
    pair_files.emplace_back("pairs_uniqueness_entropy.csv",
                            AlignedPairs{u_vals, e_vals});

    // Mean consumption at the window start timestamp.
    AlignedPairs u_cons = align(mean_series, u_points);
    correlations.push_back(
        {"mean_consumption", "uniqueness", pearson(u_cons.x, u_cons.y), u_cons.x.size()});
    pair_files.emplace_back("pairs_consumption_uniqueness.csv", u_cons);

    std::vector<TimePoint> cons_points;
    for (std::size_t t = 0; t < mean_series.timestamps.size(); ++t)
        cons_points.push_back({mean_series.timestamps[t], mean_series.values[t]});
    for (const std::string& spec : aux_specs) {
        std::string label, path;
        const std::size_t eq = spec.find('=');
        if (eq != std::string::npos) {
            label = spec.substr(0, eq);
            path = spec.substr(eq + 1);
        } else {
            path = spec;
        }
        const AuxSeries aux = load_aux_csv(path, label);
        AlignedPairs pairs = align(aux, cons_points);
        correlations.push_back(
            {aux.label, "mean_consumption", pearson(pairs.x, pairs.y), pairs.x.size()});
        pair_files.emplace_back("pairs_" + aux.label + "_consumption.csv", pairs);
    }

    std::vector<GroupedSeries> groupings;
    std::vector<std::string> grouping_labels;
    if (monthly || hourly) {
        const std::optional<EpochMapping> mapping = resolve_mapping(dataset, time_flags);
        if (monthly) {
            groupings.push_back(group_by_time(u_points, Granularity::month, mapping));
            grouping_labels.push_back("uniqueness_monthly");
            groupings.push_back(group_by_time(e_points, Granularity::month, mapping));
            grouping_labels.push_back("entropy_monthly");
        }
        if (hourly) {
            groupings.push_back(group_by_time(u_points, Granularity::hour_of_day, mapping));
            grouping_labels.push_back("uniqueness_hourly");
            groupings.push_back(group_by_time(e_points, Granularity::hour_of_day, mapping));
            grouping_labels.push_back("entropy_hourly");
        }
    }

    TimingInfo timing;
    timing.total_seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();

    ReportParams params;
    params.ks = {k};
    params.orders = {order.order()};
    params.from_ts = time_flags.from_ts;
    params.to_ts = time_flags.to_ts;
    params.hours = time_flags.hours();
    params.with_entropy = true;
    params.threads = threads;

    std::cout << build_correlate_report(dataset, params, correlations, groupings, grouping_labels,
                                        timing)
              << '\n';

    if (!out_dir.empty()) {
        ensure_out_dir(out_dir);
        const fs::path dir(out_dir);
        for (const auto& [name, pairs] : pair_files) write_pairs_csv(pairs, dir / name);
        for (std::size_t i = 0; i < groupings.size(); ++i)
            write_groups_csv(groupings[i], dir / ("groups_" + grouping_labels[i] + ".csv"));
    }
    return kExitOk;
}

int cmd_match(const std::string& input, std::size_t t, const std::string& query_text,
              int order_value, bool allow_extended) {
    if (order_value < 0 ||
        order_value > (allow_extended ? RoundingOrder::kAbsoluteMax : RoundingOrder::kDefaultMax))
        param_error("invalid rounding order");
    const RoundingOrder order = order_value <= RoundingOrder::kDefaultMax
                                    ? RoundingOrder(order_value)
                                    : RoundingOrder::extended(order_value);

    // Order matters for the probe, so this is a plain in-order parse.
    std::vector<std::uint32_t> query;
    std::size_t pos = 0;
    while (pos <= query_text.size()) {
        std::size_t comma = query_text.find(',', pos);
        if (comma == std::string::npos) comma = query_text.size();
        const std::string token = query_text.substr(pos, comma - pos);
        try {
            const long long v = std::stoll(token);
            if (v < 0 || v > static_cast<long long>(std::numeric_limits<std::uint32_t>::max()))
                param_error("query values must be non-negative 32-bit integers");
            query.push_back(static_cast<std::uint32_t>(v));
        } catch (const BoundsError&) {
            throw;
        } catch (const std::exception&) {
            param_error("cannot parse query element '" + token + "'");
        }
        pos = comma + 1;
    }
    if (query.empty()) param_error("empty query");

    const Dataset dataset = load_long_csv(input);
    const MatchResult result = match_query(dataset, t, query, order);
    std::cout << build_match_report(result, order.order()) << '\n';
    return result.matches.empty() ? kExitNoMatch : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unitrace: k-subsequence uniqueness and re-identification risk analysis"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a synthetic population (CSV + sidecar)");
    std::string gen_preset = "small", gen_config, gen_out;
    SynthConfig gen_flags;
    unsigned gen_threads = 0;
    gen->add_option("--preset", gen_preset, "Calibrated preset: small|medium|large");
    gen->add_option("--config", gen_config, "SynthConfig JSON file (overrides preset)");
    gen->add_option("--out", gen_out, "Output CSV path")->required();
    gen->add_option("--n", gen_flags.n, "Series count");
    gen->add_option("--m", gen_flags.m, "Timestamps per series");
    gen->add_option("--seed", gen_flags.seed, "PRNG seed");
    gen->add_option("--step-seconds", gen_flags.step_seconds, "Grid step in seconds");
    gen->add_option("--zero-prob", gen_flags.zero_prob, "Per-measure zero probability");
    gen->add_option("--missing-prob", gen_flags.missing_prob, "Missing-data fraction");
    gen->add_option("--missing-burst", gen_flags.missing_burst_len, "Missing burst length");
    gen->add_option("--noise-sigma", gen_flags.noise_sigma, "Per-measure noise dispersion");
    gen->add_option("--scale-mu", gen_flags.scale_mu, "Household scale log-mean");
    gen->add_option("--scale-sigma", gen_flags.scale_sigma, "Household scale log-sigma");
    gen->add_option("--shift-max", gen_flags.time_shift_max, "Max circular shift (steps)");
    gen->add_option("--seasonal-amplitude", gen_flags.seasonal_amplitude,
                    "Annual cosine amplitude");
    gen->add_option("--domain-max", gen_flags.domain_max, "Maximum admissible value");
    gen->add_option("--start-epoch", gen_flags.start_epoch, "First timestamp (epoch seconds)");
    gen->add_option("--threads", gen_threads, "Worker threads (0 = auto)");

    // audit
    auto* audit = app.add_subcommand("audit", "Uniqueness/entropy audit over a k x order grid");
    std::string audit_input, audit_k, audit_round = "0", audit_out, audit_format = "json";
    bool audit_entropy = false, audit_ext = false;
    unsigned audit_threads = 0;
    TimeFlags audit_time;
    audit->add_option("input", audit_input, "Canonical long CSV")->required();
    audit->add_option("--k", audit_k, "Window lengths (list/range, e.g. 2,4 or 1-7)")->required();
    audit->add_option("--round", audit_round, "Rounding orders (list, default 0)");
    audit->add_flag("--entropy", audit_entropy, "Also compute entropy curves");
    audit->add_flag("--allow-extended-rounding", audit_ext, "Permit rounding orders above 3");
    audit->add_option("--threads", audit_threads, "Worker threads (0 = auto)");
    audit->add_option("--out", audit_out, "Directory for report.json and per-window CSVs");
    audit->add_option("--format", audit_format, "Stdout format: json|csv");
    add_time_flags(audit, audit_time);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Mean/min/max uniqueness CSV per rounding order");
    std::string sweep_input, sweep_k, sweep_round = "0,1,2,3", sweep_out;
    bool sweep_ext = false;
    unsigned sweep_threads = 0;
    TimeFlags sweep_time;
    sweep->add_option("input", sweep_input, "Canonical long CSV")->required();
    sweep->add_option("--k", sweep_k, "Window lengths (list/range)")->required();
    sweep->add_option("--round", sweep_round, "Rounding orders (default 0,1,2,3)");
    sweep->add_flag("--allow-extended-rounding", sweep_ext, "Permit rounding orders above 3");
    sweep->add_option("--threads", sweep_threads, "Worker threads (0 = auto)");
    sweep->add_option("--out", sweep_out, "Output directory")->required();
    add_time_flags(sweep, sweep_time);

    // correlate
    auto* corr = app.add_subcommand("correlate",
                                    "Pearson correlations and calendar groupings at one (k, order)");
    std::string corr_input, corr_out;
    std::size_t corr_k = 3;
    int corr_round = 0;
    bool corr_monthly = false, corr_hourly = false, corr_ext = false;
    unsigned corr_threads = 0;
    std::vector<std::string> corr_aux;
    TimeFlags corr_time;
    corr->add_option("input", corr_input, "Canonical long CSV")->required();
    corr->add_option("--k", corr_k, "Window length")->required();
    corr->add_option("--round", corr_round, "Rounding order (default 0)");
    corr->add_option("--aux", corr_aux, "Aux series CSV, `label=path` or path (repeatable)");
    corr->add_flag("--monthly", corr_monthly, "Group uniqueness/entropy by calendar month");
    corr->add_flag("--hourly", corr_hourly, "Group uniqueness/entropy by hour of day");
    corr->add_flag("--allow-extended-rounding", corr_ext, "Permit rounding orders above 3");
    corr->add_option("--threads", corr_threads, "Worker threads (0 = auto)");
    corr->add_option("--out", corr_out, "Directory for pair/group CSVs");
    add_time_flags(corr, corr_time);

    // match
    auto* match = app.add_subcommand("match", "Re-identification probe for a known subsequence");
    std::string match_input, match_query_text;
    std::size_t match_t = 0;
    int match_round = 0;
    bool match_ext = false;
    match->add_option("input", match_input, "Canonical long CSV")->required();
    match->add_option("--t", match_t, "Window start index")->required();
    match->add_option("--query", match_query_text, "Comma-separated measures")->required();
    match->add_option("--round", match_round, "Rounding order (default 0)");
    match->add_flag("--allow-extended-rounding", match_ext, "Permit rounding orders above 3");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParams;
    }

    try {
        if (gen->parsed())
            return cmd_generate(gen_preset, gen_config, gen, gen_flags, gen_out, gen_threads);
        if (audit->parsed())
            return cmd_audit(audit_input, audit_k, audit_round, audit_ext, audit_entropy,
                             audit_time, audit_threads, audit_out, audit_format);
        if (sweep->parsed())
            return cmd_sweep(sweep_input, sweep_k, sweep_round, sweep_ext, sweep_time,
                             sweep_threads, sweep_out);
        if (corr->parsed())
            return cmd_correlate(corr_input, corr_k, corr_round, corr_ext, corr_aux, corr_monthly,
                                 corr_hourly, corr_time, corr_threads, corr_out);
        if (match->parsed())
            return cmd_match(match_input, match_t, match_query_text, match_round, match_ext);
    } catch (const AlignmentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAlignment;
    } catch (const BoundsError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParams;
    } catch (const LookupError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParams;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParams;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParams;
    } catch (const Error& e) {
        // ParseError, GridError, DuplicateError, ValidationError, IoError,
        // DegenerateInputError: bad input data.
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
