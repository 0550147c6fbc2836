#include "unitrace/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

namespace unitrace {

namespace {

// Days-to-civil-date conversion (proleptic Gregorian), valid for the whole
// epoch range used here.
struct CivilDate {
    int year;
    unsigned month;
    unsigned day;
};

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
    return a - floor_div(a, b) * b;
}

bool parse_i64(std::string_view text, std::int64_t& out) {
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

bool parse_double(std::string_view text, double& out) {
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

AuxSeries load_aux_csv(const std::filesystem::path& path, std::string label) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    AuxSeries out;
    out.label = label.empty() ? path.stem().string() : std::move(label);

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line))
        throw ParseError(path.string() + ": empty aux series file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,value")
        throw ParseError(path.string() + ":1: expected header 'timestamp,value'");

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 2 comma-separated fields");
        std::int64_t ts = 0;
        double value = 0.0;
        if (!parse_i64(std::string_view(line).substr(0, comma), ts))
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad timestamp");
        if (!parse_double(std::string_view(line).substr(comma + 1), value))
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad value");
        if (!out.timestamps.empty() && ts <= out.timestamps.back())
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": timestamps must be strictly increasing");
        out.timestamps.push_back(ts);
        out.values.push_back(value);
    }
    if (out.timestamps.empty()) throw ParseError(path.string() + ": no data points");
    return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ShapeError("pearson inputs differ in length (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
    if (x.size() < 2) throw ShapeError("pearson needs at least 2 points");

    const double n = static_cast<double>(x.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;

    double sum_xy = 0.0, sum_x2 = 0.0, sum_y2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sum_xy += dx * dy;
        sum_x2 += dx * dx;
        sum_y2 += dy * dy;
    }
    if (sum_x2 == 0.0 || sum_y2 == 0.0)
        throw DegenerateInputError("pearson input has zero variance");
    return std::clamp(sum_xy / std::sqrt(sum_x2 * sum_y2), -1.0, 1.0);
}

AuxSeries population_mean_series(const Dataset& dataset) {
    const std::size_t n = dataset.series_count();
    const std::size_t m = dataset.timestamp_count();
    AuxSeries out;
    out.label = "mean_consumption";
    out.timestamps = dataset.timestamps();
    out.values.assign(m, 0.0);

    std::vector<double> sums(m, 0.0);
    std::vector<std::size_t> counts(m, 0);
    const std::uint32_t* values = dataset.values_data();
    const std::uint8_t* mask = dataset.present_data();
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t base = r * m;
        for (std::size_t c = 0; c < m; ++c) {
            if (mask[base + c]) {
                sums[c] += values[base + c];
                ++counts[c];
            }
        }
    }
    for (std::size_t c = 0; c < m; ++c) {
        out.values[c] = counts[c] > 0 ? sums[c] / static_cast<double>(counts[c])
                                      : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

GroupedSeries group_by_time(std::span<const TimePoint> points, Granularity granularity,
                            const std::optional<EpochMapping>& mapping) {
    if (!mapping)
        throw ConfigError(
            "calendar grouping needs an epoch mapping; integer-index timestamps carry no "
            "calendar semantics");
    if (mapping->seconds_per_unit <= 0)
        throw ConfigError("epoch mapping seconds_per_unit must be positive");

    std::map<std::string, std::vector<double>> buckets;
    char key[16];
    for (const TimePoint& p : points) {
        if (std::isnan(p.value)) continue;
        const std::int64_t local = mapping->to_epoch(p.timestamp) + mapping->utc_offset_seconds;
        if (granularity == Granularity::hour_of_day) {
            const int hour = static_cast<int>(floor_mod(local, 86400) / 3600);
            std::snprintf(key, sizeof(key), "%02d", hour);
        } else {
            const CivilDate date = civil_from_days(floor_div(local, 86400));
            std::snprintf(key, sizeof(key), "%04d-%02u", date.year, date.month);
        }
        buckets[key].push_back(p.value);
    }

    GroupedSeries out;
    out.granularity = granularity;
    out.groups.reserve(buckets.size());
    for (const auto& [key_str, values] : buckets) {
        GroupedSeries::Group g;
        g.key = key_str;
        g.count = values.size();
        g.min = *std::min_element(values.begin(), values.end());
        g.max = *std::max_element(values.begin(), values.end());
        double sum = 0.0;
        for (const double v : values) sum += v;
        g.mean = sum / static_cast<double>(values.size());
        out.groups.push_back(std::move(g));
    }
    return out;
}

SummaryStats summary(const Dataset& dataset) {
    const std::size_t cells = dataset.series_count() * dataset.timestamp_count();
    const std::uint32_t* values = dataset.values_data();
    const std::uint8_t* mask = dataset.present_data();

    std::size_t present = 0;
    std::size_t zeros = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        if (!mask[i]) continue;
        ++present;
        const double v = static_cast<double>(values[i]);
        sum += v;
        sum_sq += v * v;
        if (values[i] == 0) ++zeros;
    }
    if (present == 0) throw DegenerateInputError("summary of an all-missing dataset");

    SummaryStats out;
    const double n = static_cast<double>(present);
    out.mean = sum / n;
    const double variance = std::max(0.0, sum_sq / n - out.mean * out.mean);
    out.stddev = std::sqrt(variance);
    out.zero_fraction = static_cast<double>(zeros) / n;
    out.missing_fraction = static_cast<double>(cells - present) / static_cast<double>(cells);
    return out;
}

AlignedPairs align(const AuxSeries& aux, std::span<const TimePoint> points) {
    if (aux.timestamps.empty()) throw AlignmentError("aux series is empty");
    std::int64_t spacing = std::numeric_limits<std::int64_t>::max();
    if (aux.timestamps.size() >= 2) {
        spacing = aux.timestamps[1] - aux.timestamps[0];
        for (std::size_t i = 2; i < aux.timestamps.size(); ++i) {
            if (aux.timestamps[i] - aux.timestamps[i - 1] != spacing)
                throw AlignmentError("aux series grid is irregular");
        }
    }

    AlignedPairs out;
    const std::int64_t ts0 = aux.timestamps.front();
    for (const TimePoint& p : points) {
        if (p.timestamp < ts0) continue;
        std::size_t idx;
        if (spacing == std::numeric_limits<std::int64_t>::max()) {
            idx = 0;  // single-point aux covers everything at or after it
        } else {
            idx = static_cast<std::size_t>((p.timestamp - ts0) / spacing);
            if (idx >= aux.timestamps.size()) continue;
        }
        const double x = aux.values[idx];
        if (std::isnan(x) || std::isnan(p.value)) continue;
        out.x.push_back(x);
        out.y.push_back(p.value);
    }
    if (out.x.empty())
        throw AlignmentError("aux series and points have no overlapping defined range");
    return out;
}

}  // namespace unitrace
