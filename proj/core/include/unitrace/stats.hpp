#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unitrace/dataset.hpp"

namespace unitrace {

/// A per-timestamp scalar series (temperature, mean consumption, ...).
/// NaN values mark undefined points; they are dropped by align().
struct AuxSeries {
    std::string label;
    std::vector<std::int64_t> timestamps;  // strictly increasing, regular
    std::vector<double> values;
};

/// Loads an aux series CSV: header `timestamp,value`, one point per line.
AuxSeries load_aux_csv(const std::filesystem::path& path, std::string label = {});

/// Sample Pearson correlation coefficient, in [-1, 1]. Inputs must have
/// equal length >= 2 and nonzero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Per-timestamp arithmetic mean over present values. Timestamps where all
/// series are missing yield NaN markers.
AuxSeries population_mean_series(const Dataset& dataset);

struct TimePoint {
    std::int64_t timestamp = 0;
    double value = 0.0;
};

enum class Granularity { month, hour_of_day };

/// Maps dataset timestamps to wall-clock epoch seconds:
/// epoch(ts) = origin_epoch + ts * seconds_per_unit, then shifted by the
/// fixed UTC offset for calendar grouping. Identity mapping (0, 1, 0) is
/// correct when timestamps already are UTC epoch seconds.
struct EpochMapping {
    std::int64_t origin_epoch = 0;
    std::int64_t seconds_per_unit = 1;
    std::int32_t utc_offset_seconds = 0;

    std::int64_t to_epoch(std::int64_t ts) const { return origin_epoch + ts * seconds_per_unit; }
};

struct GroupedSeries {
    Granularity granularity = Granularity::month;
    struct Group {
        std::string key;  // "YYYY-MM" for months, "00".."23" for hours
        double mean = 0.0;
        double min = 0.0;
        double max = 0.0;
        std::size_t count = 0;
    };
    std::vector<Group> groups;  // sorted by key
};

/// Partitions points by calendar month or hour of day and emits
/// mean/min/max/count per group. NaN-valued points are ignored. A missing
/// mapping is a ConfigError: integer-index timestamps carry no calendar
/// semantics on their own.
GroupedSeries group_by_time(std::span<const TimePoint> points, Granularity granularity,
                            const std::optional<EpochMapping>& mapping);

struct SummaryStats {
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation (divide by N)
    double zero_fraction = 0.0;
    double missing_fraction = 0.0;
};

/// Summary over all present values of the dataset.
SummaryStats summary(const Dataset& dataset);

struct AlignedPairs {
    std::vector<double> x;  // aux values
    std::vector<double> y;  // per-t values
};

/// Pairs each point with the aux interval containing its timestamp
/// (intervals are [aux_ts[i], aux_ts[i] + spacing)). Points outside every
/// interval and NaN values on either side are dropped; zero surviving pairs
/// is an AlignmentError.
AlignedPairs align(const AuxSeries& aux, std::span<const TimePoint> points);

}  // namespace unitrace
