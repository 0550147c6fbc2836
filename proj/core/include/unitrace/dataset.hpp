#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unitrace/errors.hpp"

namespace unitrace {

enum class Unit { watts, watt_hours };

std::string_view unit_name(Unit unit);            // "W" / "Wh"
Unit unit_from_name(std::string_view name);       // throws ParseError

inline constexpr std::uint32_t kDefaultDomainMax = 36000;

/// Selects the k consecutive timestamps starting at index t.
struct WindowSpec {
    std::size_t t = 0;
    std::size_t k = 1;
};

/// An immutable population of time series over a regular timestamp grid.
///
/// Values are non-negative integers (W or Wh); each cell is either present
/// or missing, tracked by an explicit per-cell presence mask over the dense
/// row-major matrix. Rows are kept in canonical order (lexicographic by
/// series id), fixed at construction; every downstream result is
/// deterministic given that order. Instances are safe for concurrent reads.
class Dataset {
public:
    /// Validates all invariants, sorts rows into canonical order.
    /// `values` and `present` are row-major n*m, matching `series_ids` order.
    static Dataset create(std::vector<std::string> series_ids,
                          std::vector<std::int64_t> timestamps,
                          std::int64_t step_seconds,
                          std::vector<std::uint32_t> values,
                          std::vector<std::uint8_t> present,
                          Unit unit = Unit::watts,
                          std::uint32_t domain_max = kDefaultDomainMax);

    std::size_t series_count() const { return n_; }     // n
    std::size_t timestamp_count() const { return m_; }  // m

    const std::vector<std::string>& series_ids() const { return series_ids_; }
    const std::vector<std::int64_t>& timestamps() const { return timestamps_; }
    std::int64_t step_seconds() const { return step_seconds_; }
    Unit unit() const { return unit_; }
    std::uint32_t domain_max() const { return domain_max_; }

    bool present(std::size_t row, std::size_t col) const { return present_[row * m_ + col] != 0; }
    std::optional<std::uint32_t> cell(std::size_t row, std::size_t col) const {
        return present(row, col) ? std::optional<std::uint32_t>(values_[row * m_ + col])
                                 : std::nullopt;
    }

    std::span<const std::uint32_t> row_values(std::size_t row) const {
        return {values_.data() + row * m_, m_};
    }
    std::span<const std::uint8_t> row_mask(std::size_t row) const {
        return {present_.data() + row * m_, m_};
    }

    // Raw row-major storage, for the engine's scan loops.
    const std::uint32_t* values_data() const { return values_.data(); }
    const std::uint8_t* present_data() const { return present_.data(); }

    /// Row index of a series id (ids are sorted, so this is a binary search).
    std::optional<std::size_t> index_of(std::string_view id) const;

    bool operator==(const Dataset& other) const = default;

private:
    friend Dataset degrade_unchecked(const Dataset&, std::vector<std::uint32_t>&&);
    friend Dataset subsample(const Dataset&, std::span<const std::string> ids);

    Dataset() = default;

    std::vector<std::string> series_ids_;
    std::vector<std::int64_t> timestamps_;
    std::int64_t step_seconds_ = 1;
    std::vector<std::uint32_t> values_;
    std::vector<std::uint8_t> present_;
    Unit unit_ = Unit::watts;
    std::uint32_t domain_max_ = kDefaultDomainMax;
    std::size_t n_ = 0;
    std::size_t m_ = 0;
};

/// One window over a dataset: only the series with no missing value in
/// [t, t+k), in canonical order.
struct WindowSet {
    WindowSpec spec;
    std::vector<std::pair<std::string, std::vector<std::uint32_t>>> rows;
    std::size_t excluded_count = 0;
};

WindowSet window(const Dataset& dataset, WindowSpec spec);

/// Restriction of the dataset to the given series, canonical order kept.
Dataset subsample(const Dataset& dataset, std::span<const std::string> ids);

struct ParseOptions {
    std::optional<Unit> unit;                      // overrides sidecar/default
    std::optional<std::int64_t> step_seconds;      // overrides inferred spacing
    std::optional<std::uint32_t> domain_max;       // overrides sidecar/default
    std::optional<std::filesystem::path> metadata_path;  // sidecar override
    bool use_sidecar = true;                       // look for <stem>.meta.json
};

/// Loads the canonical long CSV (`series_id,timestamp,value` header; empty
/// value field = missing measure). The timestamp grid is the sorted union of
/// all timestamps and must be evenly spaced. A `<stem>.meta.json` sidecar
/// (unit, step_seconds, domain_max) is honored when present.
Dataset load_long_csv(const std::filesystem::path& path, const ParseOptions& options = {});

/// Writes the canonical long CSV: header, then all n*m cells with rows
/// ordered by (series_id, timestamp) and missing cells as empty values.
/// Reloading the output yields an identical dataset.
void write_long_csv(const Dataset& dataset, const std::filesystem::path& path);

/// Writes the metadata sidecar JSON {unit, step_seconds, domain_max}.
void write_metadata_sidecar(const Dataset& dataset, const std::filesystem::path& path);

/// Sidecar path convention for a CSV path: `<stem>.meta.json` next to it.
std::filesystem::path sidecar_path_for(const std::filesystem::path& csv_path);

/// FNV-1a (64-bit) over the canonical CSV serialization; self-identifying
/// fingerprint used in reports.
std::uint64_t content_fingerprint(const Dataset& dataset);

/// Fingerprint rendered as "fnv1a64:<16 hex digits>".
std::string fingerprint_string(const Dataset& dataset);

}  // namespace unitrace
