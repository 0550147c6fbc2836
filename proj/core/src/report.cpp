#include "unitrace/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace unitrace {

namespace {

using nlohmann::json;

json opt_to_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

json dataset_block(const Dataset& dataset) {
    json j;
    j["n"] = dataset.series_count();
    j["m"] = dataset.timestamp_count();
    j["step_seconds"] = dataset.step_seconds();
    j["unit"] = std::string(unit_name(dataset.unit()));
    j["domain_max"] = dataset.domain_max();
    j["fingerprint"] = fingerprint_string(dataset);
    return j;
}

json params_block(const ReportParams& params) {
    json j;
    j["k"] = params.ks;
    j["orders"] = params.orders;
    j["from"] = params.from_ts ? json(*params.from_ts) : json(nullptr);
    j["to"] = params.to_ts ? json(*params.to_ts) : json(nullptr);
    j["hours"] = params.hours.empty() ? json(nullptr) : json(params.hours);
    j["entropy"] = params.with_entropy;
    return j;
}

json timing_block(const TimingInfo& timing) {
    json j;
    j["total_seconds"] = timing.total_seconds;
    if (!timing.per_cell_seconds.empty()) j["per_cell_seconds"] = timing.per_cell_seconds;
    return j;
}

json uniqueness_summary(const UniquenessResult& r) {
    json j;
    j["mean_u"] = opt_to_json(r.mean_u);
    j["min_u"] = opt_to_json(r.min_u);
    j["max_u"] = opt_to_json(r.max_u);
    j["windows"] = r.per_t.size();
    j["undefined_windows"] = r.undefined_windows;
    return j;
}

json entropy_summary(const EntropyResult& r) {
    json j;
    j["mean_e"] = opt_to_json(r.mean_e);
    j["windows"] = r.per_t.size();
    j["undefined_windows"] = r.undefined_windows;
    return j;
}

void format_double(std::string& out, double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::vector<GridCell> run_grid(const Dataset& dataset, const std::vector<std::size_t>& ks,
                               const std::vector<int>& orders, bool with_entropy,
                               const EngineOptions& options) {
    if (ks.empty()) throw BoundsError("empty k list");
    if (orders.empty()) throw BoundsError("empty rounding-order list");
    for (const std::size_t k : ks) {
        if (k < 1 || k > dataset.timestamp_count())
            throw BoundsError("k=" + std::to_string(k) + " outside [1, m=" +
                              std::to_string(dataset.timestamp_count()) + "]");
    }

    std::vector<GridCell> grid;
    grid.reserve(ks.size() * orders.size());
    for (const int order_value : orders) {
        const RoundingOrder order = order_value <= RoundingOrder::kDefaultMax
                                        ? RoundingOrder(order_value)
                                        : RoundingOrder::extended(order_value);
        // Degrade once per order; curves then run without per-cell rounding.
        std::optional<Dataset> degraded;
        const Dataset& working =
            order.order() == 0 ? dataset : degraded.emplace(degrade_dataset(dataset, order));
        for (const std::size_t k : ks) {
            GridCell cell;
            cell.k = k;
            cell.order = order.order();
            if (with_entropy) {
                CurvePair pair = combined_curves(working, k, RoundingOrder(0), options);
                pair.uniqueness.order = order.order();
                pair.entropy.order = order.order();
                cell.uniqueness = std::move(pair.uniqueness);
                cell.entropy = std::move(pair.entropy);
            } else {
                UniquenessResult r = uniqueness_curve(working, k, RoundingOrder(0), options);
                r.order = order.order();
                cell.uniqueness = std::move(r);
            }
            grid.push_back(std::move(cell));
        }
    }
    return grid;
}

std::string build_audit_report(const Dataset& dataset, const ReportParams& params,
                               const std::vector<GridCell>& grid, const TimingInfo& timing) {
    json j;
    j["schema"] = std::string(kReportSchema);
    j["tool_version"] = std::string(kToolVersion);
    j["command"] = "audit";
    j["dataset"] = dataset_block(dataset);
    j["parameters"] = params_block(params);
    json results = json::array();
    for (const GridCell& cell : grid) {
        json r;
        r["k"] = cell.k;
        r["order"] = cell.order;
        r["uniqueness"] = uniqueness_summary(cell.uniqueness);
        if (cell.entropy) r["entropy"] = entropy_summary(*cell.entropy);
        results.push_back(std::move(r));
    }
    j["results"] = std::move(results);
    j["timing"] = timing_block(timing);
    return j.dump(2);
}

std::string build_correlate_report(const Dataset& dataset, const ReportParams& params,
                                   const std::vector<CorrelationEntry>& correlations,
                                   const std::vector<GroupedSeries>& groupings,
                                   const std::vector<std::string>& grouping_labels,
                                   const TimingInfo& timing) {
    json j;
    j["schema"] = std::string(kReportSchema);
    j["tool_version"] = std::string(kToolVersion);
    j["command"] = "correlate";
    j["dataset"] = dataset_block(dataset);
    j["parameters"] = params_block(params);
    json corr = json::array();
    for (const CorrelationEntry& entry : correlations) {
        json e;
        e["x"] = entry.x_label;
        e["y"] = entry.y_label;
        e["r"] = entry.r;
        e["count"] = entry.count;
        corr.push_back(std::move(e));
    }
    j["correlations"] = std::move(corr);
    json groups = json::object();
    for (std::size_t i = 0; i < groupings.size(); ++i) {
        json gl = json::array();
        for (const auto& g : groupings[i].groups) {
            json gj;
            gj["group"] = g.key;
            gj["mean"] = g.mean;
            gj["min"] = g.min;
            gj["max"] = g.max;
            gj["count"] = g.count;
            gl.push_back(std::move(gj));
        }
        groups[grouping_labels[i]] = std::move(gl);
    }
    j["groupings"] = std::move(groups);
    j["timing"] = timing_block(timing);
    return j.dump(2);
}

std::string build_match_report(const MatchResult& result, int order) {
    json j;
    j["schema"] = std::string(kReportSchema);
    j["tool_version"] = std::string(kToolVersion);
    j["command"] = "match";
    j["t"] = result.t;
    j["order"] = order;
    j["query"] = result.query;
    j["matches"] = result.matches;
    j["match_count"] = result.matches.size();
    j["is_unique"] = result.is_unique;
    return j.dump(2);
}

std::string build_generate_report(const Dataset& dataset, const std::filesystem::path& csv_path,
                                  std::uint64_t seed) {
    json j;
    j["schema"] = std::string(kReportSchema);
    j["tool_version"] = std::string(kToolVersion);
    j["command"] = "generate";
    j["dataset"] = dataset_block(dataset);
    j["seed"] = seed;
    j["csv"] = csv_path.string();
    j["metadata"] = sidecar_path_for(csv_path).string();
    return j.dump(2);
}

void write_uniqueness_csv(const UniquenessResult& result, const std::filesystem::path& path) {
    std::string out = "t,u,unique_count,included_count\n";
    for (const UniquenessPoint& p : result.per_t) {
        out += std::to_string(p.t);
        out += ',';
        if (p.u) format_double(out, *p.u);
        out += ',';
        out += std::to_string(p.unique_count);
        out += ',';
        out += std::to_string(p.included_count);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_entropy_csv(const EntropyResult& result, const std::filesystem::path& path) {
    std::string out = "t,e,class_count,included_count\n";
    for (const EntropyPoint& p : result.per_t) {
        out += std::to_string(p.t);
        out += ',';
        if (p.e) format_double(out, *p.e);
        out += ',';
        out += std::to_string(p.class_count);
        out += ',';
        out += std::to_string(p.included_count);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_sweep_csv(const std::vector<GridCell>& grid, int order,
                     const std::filesystem::path& path) {
    std::string out = "k,mean_u,min_u,max_u\n";
    for (const GridCell& cell : grid) {
        if (cell.order != order) continue;
        out += std::to_string(cell.k);
        out += ',';
        if (cell.uniqueness.mean_u) format_double(out, *cell.uniqueness.mean_u);
        out += ',';
        if (cell.uniqueness.min_u) format_double(out, *cell.uniqueness.min_u);
        out += ',';
        if (cell.uniqueness.max_u) format_double(out, *cell.uniqueness.max_u);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_pairs_csv(const AlignedPairs& pairs, const std::filesystem::path& path) {
    std::string out = "x,y\n";
    for (std::size_t i = 0; i < pairs.x.size(); ++i) {
        format_double(out, pairs.x[i]);
        out += ',';
        format_double(out, pairs.y[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_groups_csv(const GroupedSeries& grouped, const std::filesystem::path& path) {
    std::string out = "group,mean,min,max,count\n";
    for (const auto& g : grouped.groups) {
        out += g.key;
        out += ',';
        format_double(out, g.mean);
        out += ',';
        format_double(out, g.min);
        out += ',';
        format_double(out, g.max);
        out += ',';
        out += std::to_string(g.count);
        out += '\n';
    }
    write_text_file(path, out);
}

}  // namespace unitrace
