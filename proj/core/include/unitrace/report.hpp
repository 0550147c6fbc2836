#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "unitrace/dataset.hpp"
#include "unitrace/engine.hpp"
#include "unitrace/stats.hpp"

namespace unitrace {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::string_view kReportSchema = "unitrace-report/v1";

/// Parameters echoed into reports so a run is reproducible from its output.
struct ReportParams {
    std::vector<std::size_t> ks;
    std::vector<int> orders;
    std::optional<std::int64_t> from_ts;
    std::optional<std::int64_t> to_ts;
    std::vector<int> hours;  // empty = no hour filter
    bool with_entropy = false;
    unsigned threads = 0;
};

/// One (k, order) cell of an audit/sweep grid.
struct GridCell {
    std::size_t k = 1;
    int order = 0;
    UniquenessResult uniqueness;
    std::optional<EntropyResult> entropy;
};

/// Computes the full k x order grid, degrading the dataset once per order.
std::vector<GridCell> run_grid(const Dataset& dataset, const std::vector<std::size_t>& ks,
                               const std::vector<int>& orders, bool with_entropy,
                               const EngineOptions& options = {});

struct TimingInfo {
    double total_seconds = 0.0;
    std::vector<double> per_cell_seconds;
};

/// Audit report JSON (schema unitrace-report/v1). Identical inputs yield
/// identical bytes apart from the "timing" block.
std::string build_audit_report(const Dataset& dataset, const ReportParams& params,
                               const std::vector<GridCell>& grid, const TimingInfo& timing);

struct CorrelationEntry {
    std::string x_label;
    std::string y_label;
    double r = 0.0;
    std::size_t count = 0;
};

std::string build_correlate_report(const Dataset& dataset, const ReportParams& params,
                                   const std::vector<CorrelationEntry>& correlations,
                                   const std::vector<GroupedSeries>& groupings,
                                   const std::vector<std::string>& grouping_labels,
                                   const TimingInfo& timing);

std::string build_match_report(const MatchResult& result, int order);

std::string build_generate_report(const Dataset& dataset, const std::filesystem::path& csv_path,
                                  std::uint64_t seed);

// Plot-ready CSV emission.
void write_uniqueness_csv(const UniquenessResult& result, const std::filesystem::path& path);
void write_entropy_csv(const EntropyResult& result, const std::filesystem::path& path);
/// One sweep CSV per order: `k,mean_u,min_u,max_u` rows in ascending k.
void write_sweep_csv(const std::vector<GridCell>& grid, int order,
                     const std::filesystem::path& path);
void write_pairs_csv(const AlignedPairs& pairs, const std::filesystem::path& path);
void write_groups_csv(const GroupedSeries& grouped, const std::filesystem::path& path);

}  // namespace unitrace
