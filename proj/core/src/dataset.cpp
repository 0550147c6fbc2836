#include "unitrace/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace unitrace {

namespace {

constexpr std::string_view kCsvHeader = "series_id,timestamp,value";

[[noreturn]] void fail_parse(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::string buffer(static_cast<std::size_t>(size), '\0');
    in.read(buffer.data(), size);
    if (!in) throw IoError("cannot read " + path.string());
    return buffer;
}

// Strips one trailing '\r' so CRLF input parses; the canonical writer only
// ever emits LF.
std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

struct CsvFields {
    std::string_view id;
    std::string_view ts;
    std::string_view value;
};

bool split_fields(std::string_view line, CsvFields& out) {
    const std::size_t c1 = line.find(',');
    if (c1 == std::string_view::npos) return false;
    const std::size_t c2 = line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) return false;
    if (line.find(',', c2 + 1) != std::string_view::npos) return false;
    out.id = line.substr(0, c1);
    out.ts = line.substr(c1 + 1, c2 - c1 - 1);
    out.value = line.substr(c2 + 1);
    return true;
}

bool parse_i64(std::string_view text, std::int64_t& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

struct SidecarMeta {
    std::optional<Unit> unit;
    std::optional<std::int64_t> step_seconds;
    std::optional<std::uint32_t> domain_max;
};

SidecarMeta read_sidecar(const std::filesystem::path& path) {
    SidecarMeta meta;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open metadata sidecar " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid metadata sidecar " + path.string() + ": " + e.what());
    }
    if (j.contains("unit")) meta.unit = unit_from_name(j.at("unit").get<std::string>());
    if (j.contains("step_seconds")) {
        const auto step = j.at("step_seconds").get<std::int64_t>();
        if (step <= 0) throw ParseError("sidecar step_seconds must be positive");
        meta.step_seconds = step;
    }
    if (j.contains("domain_max")) {
        const auto dm = j.at("domain_max").get<std::int64_t>();
        if (dm < 0 || dm > std::numeric_limits<std::uint32_t>::max())
            throw ParseError("sidecar domain_max out of range");
        meta.domain_max = static_cast<std::uint32_t>(dm);
    }
    return meta;
}

// Canonical serialization: header, then every (row, timestamp) cell in
// canonical order with missing cells as empty values. Shared by the CSV
// writer and the fingerprint so the two can never diverge.
template <typename Sink>
void serialize_canonical(const Dataset& d, Sink&& sink) {
    sink(kCsvHeader.data(), kCsvHeader.size());
    sink("\n", 1);
    char buf[32];
    const std::size_t m = d.timestamp_count();
    const auto& timestamps = d.timestamps();
    for (std::size_t r = 0; r < d.series_count(); ++r) {
        const auto& id = d.series_ids()[r];
        const auto values = d.row_values(r);
        const auto mask = d.row_mask(r);
        for (std::size_t c = 0; c < m; ++c) {
            sink(id.data(), id.size());
            sink(",", 1);
            auto [p1, ec1] = std::to_chars(buf, buf + sizeof(buf), timestamps[c]);
            sink(buf, static_cast<std::size_t>(p1 - buf));
            sink(",", 1);
            if (mask[c]) {
                auto [p2, ec2] = std::to_chars(buf, buf + sizeof(buf), values[c]);
                sink(buf, static_cast<std::size_t>(p2 - buf));
            }
            sink("\n", 1);
        }
    }
}

}  // namespace

std::string_view unit_name(Unit unit) {
    return unit == Unit::watts ? "W" : "Wh";
}

Unit unit_from_name(std::string_view name) {
    if (name == "W") return Unit::watts;
    if (name == "Wh") return Unit::watt_hours;
    throw ParseError("unknown unit '" + std::string(name) + "' (expected W or Wh)");
}

Dataset Dataset::create(std::vector<std::string> series_ids, std::vector<std::int64_t> timestamps,
                        std::int64_t step_seconds, std::vector<std::uint32_t> values,
                        std::vector<std::uint8_t> present, Unit unit, std::uint32_t domain_max) {
    const std::size_t n = series_ids.size();
    const std::size_t m = timestamps.size();
    if (n == 0) throw ValidationError("dataset needs at least one series");
    if (m == 0) throw ValidationError("dataset needs at least one timestamp");
    if (step_seconds <= 0) throw ValidationError("step_seconds must be positive");
    if (values.size() != n * m || present.size() != n * m)
        throw ValidationError("value/presence matrix shape does not match n*m");

    for (const auto& id : series_ids) {
        if (id.empty()) throw ValidationError("series ids must be non-empty");
    }
    for (std::size_t c = 1; c < m; ++c) {
        const std::int64_t gap = timestamps[c] - timestamps[c - 1];
        if (gap <= 0) throw ValidationError("timestamps must be strictly increasing");
        if (gap != step_seconds)
            throw GridError("timestamp spacing " + std::to_string(gap) + " does not match step " +
                            std::to_string(step_seconds));
    }

    // Canonical row order: lexicographic by series id.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t a, std::size_t b) { return series_ids[a] < series_ids[b]; });

    Dataset d;
    d.n_ = n;
    d.m_ = m;
    d.step_seconds_ = step_seconds;
    d.unit_ = unit;
    d.domain_max_ = domain_max;
    d.timestamps_ = std::move(timestamps);
    d.series_ids_.reserve(n);
    d.values_.resize(n * m);
    d.present_.resize(n * m);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t src = perm[r];
        d.series_ids_.push_back(std::move(series_ids[src]));
        std::memcpy(d.values_.data() + r * m, values.data() + src * m, m * sizeof(std::uint32_t));
        std::memcpy(d.present_.data() + r * m, present.data() + src * m, m);
    }
    for (std::size_t r = 1; r < n; ++r) {
        if (d.series_ids_[r] == d.series_ids_[r - 1])
            throw ValidationError("duplicate series id '" + d.series_ids_[r] + "'");
    }
    for (std::size_t i = 0; i < n * m; ++i) {
        if (d.present_[i] && d.values_[i] > domain_max)
            throw ValidationError("value " + std::to_string(d.values_[i]) +
                                  " exceeds domain_max " + std::to_string(domain_max));
    }
    return d;
}

std::optional<std::size_t> Dataset::index_of(std::string_view id) const {
    const auto it = std::lower_bound(series_ids_.begin(), series_ids_.end(), id);
    if (it == series_ids_.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - series_ids_.begin());
}

WindowSet window(const Dataset& dataset, WindowSpec spec) {
    const std::size_t m = dataset.timestamp_count();
    if (spec.k < 1) throw BoundsError("window length k must be >= 1");
    if (spec.t + spec.k > m)
        throw BoundsError("window [t=" + std::to_string(spec.t) + ", k=" + std::to_string(spec.k) +
                          ") does not fit m=" + std::to_string(m));

    WindowSet out;
    out.spec = spec;
    for (std::size_t r = 0; r < dataset.series_count(); ++r) {
        const auto mask = dataset.row_mask(r);
        bool complete = true;
        for (std::size_t j = 0; j < spec.k; ++j) {
            if (!mask[spec.t + j]) {
                complete = false;
                break;
            }
        }
        if (!complete) {
            ++out.excluded_count;
            continue;
        }
        const auto values = dataset.row_values(r);
        out.rows.emplace_back(dataset.series_ids()[r],
                              std::vector<std::uint32_t>(values.begin() + spec.t,
                                                         values.begin() + spec.t + spec.k));
    }
    return out;
}

Dataset subsample(const Dataset& dataset, std::span<const std::string> ids) {
    const std::size_t m = dataset.timestamp_count();
    std::vector<std::size_t> rows;
    rows.reserve(ids.size());
    for (const auto& id : ids) {
        const auto idx = dataset.index_of(id);
        if (!idx) throw LookupError("unknown series id '" + id + "'");
        rows.push_back(*idx);
    }
    std::sort(rows.begin(), rows.end());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i] == rows[i - 1])
            throw LookupError("series id '" + dataset.series_ids()[rows[i]] +
                              "' selected more than once");
    }
    if (rows.empty()) throw LookupError("subsample selection is empty");

    Dataset d;
    d.n_ = rows.size();
    d.m_ = m;
    d.step_seconds_ = dataset.step_seconds();
    d.unit_ = dataset.unit();
    d.domain_max_ = dataset.domain_max();
    d.timestamps_ = dataset.timestamps();
    d.series_ids_.reserve(rows.size());
    d.values_.resize(rows.size() * m);
    d.present_.resize(rows.size() * m);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        d.series_ids_.push_back(dataset.series_ids()[rows[r]]);
        std::memcpy(d.values_.data() + r * m, dataset.values_data() + rows[r] * m,
                    m * sizeof(std::uint32_t));
        std::memcpy(d.present_.data() + r * m, dataset.present_data() + rows[r] * m, m);
    }
    return d;
}

std::filesystem::path sidecar_path_for(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension();
    p += ".meta.json";
    return p;
}

Dataset load_long_csv(const std::filesystem::path& path, const ParseOptions& options) {
    const std::string buffer = read_file(path);

    SidecarMeta sidecar;
    if (options.metadata_path) {
        sidecar = read_sidecar(*options.metadata_path);
    } else if (options.use_sidecar) {
        const auto sp = sidecar_path_for(path);
        if (std::filesystem::exists(sp)) sidecar = read_sidecar(sp);
    }

    const std::uint32_t domain_max = options.domain_max.value_or(
        sidecar.domain_max.value_or(kDefaultDomainMax));
    const Unit unit = options.unit.value_or(sidecar.unit.value_or(Unit::watts));

    // Pass 1: gather distinct series ids and timestamps.
    std::size_t line_no = 0;
    std::size_t pos = 0;
    const std::size_t size = buffer.size();
    auto next_line = [&](std::string_view& line) -> bool {
        if (pos >= size) return false;
        std::size_t end = buffer.find('\n', pos);
        if (end == std::string::npos) end = size;
        line = strip_cr(std::string_view(buffer).substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        return true;
    };

    std::string_view line;
    if (!next_line(line) || line != kCsvHeader)
        fail_parse(path, 1, "expected header '" + std::string(kCsvHeader) + "'");

    std::unordered_set<std::string_view> id_set;
    std::unordered_set<std::int64_t> ts_set;
    while (next_line(line)) {
        if (line.empty()) {
            if (pos >= size) break;  // trailing newline
            fail_parse(path, line_no, "empty line");
        }
        CsvFields f;
        if (!split_fields(line, f)) fail_parse(path, line_no, "expected 3 comma-separated fields");
        if (f.id.empty()) fail_parse(path, line_no, "empty series_id");
        std::int64_t ts = 0;
        if (!parse_i64(f.ts, ts) || ts < 0)
            fail_parse(path, line_no, "timestamp must be a non-negative integer");
        id_set.insert(f.id);
        ts_set.insert(ts);
    }
    if (id_set.empty()) fail_parse(path, line_no, "no data rows");

    std::vector<std::string> ids(id_set.begin(), id_set.end());
    std::sort(ids.begin(), ids.end());
    std::vector<std::int64_t> timestamps(ts_set.begin(), ts_set.end());
    std::sort(timestamps.begin(), timestamps.end());

    // Grid: constant spacing over the sorted union of timestamps.
    std::int64_t inferred_step = 1;
    if (timestamps.size() >= 2) {
        inferred_step = timestamps[1] - timestamps[0];
        for (std::size_t c = 2; c < timestamps.size(); ++c) {
            if (timestamps[c] - timestamps[c - 1] != inferred_step)
                throw GridError(path.string() + ": inconsistent timestamp spacing (" +
                                std::to_string(timestamps[c] - timestamps[c - 1]) + " vs " +
                                std::to_string(inferred_step) + ")");
        }
    }
    std::int64_t step = options.step_seconds.value_or(sidecar.step_seconds.value_or(inferred_step));
    if (timestamps.size() >= 2 && step != inferred_step)
        throw GridError(path.string() + ": declared step_seconds " + std::to_string(step) +
                        " does not match grid spacing " + std::to_string(inferred_step));
    if (step <= 0) throw GridError(path.string() + ": step_seconds must be positive");

    const std::size_t n = ids.size();
    const std::size_t m = timestamps.size();
    std::unordered_map<std::string_view, std::uint32_t> id_index;
    id_index.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) id_index.emplace(ids[i], static_cast<std::uint32_t>(i));
    const std::int64_t ts0 = timestamps.front();

    // Pass 2: fill the matrix, checking values and duplicates.
    std::vector<std::uint32_t> values(n * m, 0);
    std::vector<std::uint8_t> present(n * m, 0);
    std::vector<std::uint8_t> seen(n * m, 0);

    pos = 0;
    line_no = 0;
    next_line(line);  // header
    while (next_line(line)) {
        if (line.empty() && pos >= size) break;
        CsvFields f;
        split_fields(line, f);
        std::int64_t ts = 0;
        parse_i64(f.ts, ts);
        const std::size_t row = id_index.find(f.id)->second;
        const std::size_t col = static_cast<std::size_t>((ts - ts0) / step);
        const std::size_t cell = row * m + col;
        if (seen[cell])
            throw DuplicateError(path.string() + ":" + std::to_string(line_no) +
                                 ": duplicate (series_id, timestamp) pair (" + std::string(f.id) +
                                 ", " + std::to_string(ts) + ")");
        seen[cell] = 1;
        if (f.value.empty()) continue;  // missing measure
        std::int64_t v = 0;
        if (!parse_i64(f.value, v)) fail_parse(path, line_no, "value must be an integer or empty");
        if (v < 0) fail_parse(path, line_no, "value must be non-negative");
        if (v > static_cast<std::int64_t>(domain_max))
            fail_parse(path, line_no,
                       "value " + std::to_string(v) + " exceeds domain_max " +
                           std::to_string(domain_max));
        values[cell] = static_cast<std::uint32_t>(v);
        present[cell] = 1;
    }

    return Dataset::create(std::move(ids), std::move(timestamps), step, std::move(values),
                           std::move(present), unit, domain_max);
}

void write_long_csv(const Dataset& dataset, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    std::vector<char> iobuf(1 << 20);
    std::setvbuf(f, iobuf.data(), _IOFBF, iobuf.size());
    bool ok = true;
    serialize_canonical(dataset, [&](const char* data, std::size_t len) {
        if (std::fwrite(data, 1, len, f) != len) ok = false;
    });
    if (std::fclose(f) != 0) ok = false;
    if (!ok) throw IoError("failed writing " + path.string());
}

void write_metadata_sidecar(const Dataset& dataset, const std::filesystem::path& path) {
    nlohmann::json j;
    j["unit"] = std::string(unit_name(dataset.unit()));
    j["step_seconds"] = dataset.step_seconds();
    j["domain_max"] = dataset.domain_max();
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

std::uint64_t content_fingerprint(const Dataset& dataset) {
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a 64 offset basis
    serialize_canonical(dataset, [&](const char* data, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            h ^= static_cast<unsigned char>(data[i]);
            h *= 0x100000001B3ULL;
        }
    });
    return h;
}

std::string fingerprint_string(const Dataset& dataset) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(content_fingerprint(dataset)));
    return buf;
}

}  // namespace unitrace
