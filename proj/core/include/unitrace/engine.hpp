#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "unitrace/dataset.hpp"
#include "unitrace/degrade.hpp"

namespace unitrace {

/// Result of a single-window uniqueness query. `u` is absent when no series
/// is complete in the window (the paper never defines u over an empty set).
struct WindowUniqueness {
    std::optional<double> u;
    std::vector<std::string> unique_ids;  // canonical order; empty if not collected
    std::size_t unique_count = 0;
    std::size_t included_count = 0;
};

struct WindowEntropy {
    std::optional<double> e;  // bits
    std::size_t class_count = 0;
    std::size_t included_count = 0;
};

struct UniquenessPoint {
    std::size_t t = 0;
    std::int64_t timestamp = 0;  // window start timestamp
    std::optional<double> u;
    std::size_t unique_count = 0;
    std::size_t included_count = 0;
};

struct UniquenessResult {
    std::size_t k = 1;
    int order = 0;
    std::vector<UniquenessPoint> per_t;
    std::size_t undefined_windows = 0;
    std::optional<double> mean_u, min_u, max_u;  // over defined windows only
};

struct EntropyPoint {
    std::size_t t = 0;
    std::int64_t timestamp = 0;
    std::optional<double> e;
    std::size_t class_count = 0;
    std::size_t included_count = 0;
};

struct EntropyResult {
    std::size_t k = 1;
    int order = 0;
    std::vector<EntropyPoint> per_t;
    std::size_t undefined_windows = 0;
    std::optional<double> mean_e;
};

struct MatchResult {
    std::vector<std::uint32_t> query;  // as supplied, before degradation
    std::size_t t = 0;
    std::vector<std::string> matches;  // canonical order
    bool is_unique = false;
};

struct EngineOptions {
    unsigned threads = 0;  // 0 = hardware concurrency
    /// Restrict curves to these window starts (strictly increasing). Starts
    /// beyond m-k are ignored; empty = all t. Used by the CLI date/hour
    /// filters.
    std::vector<std::size_t> t_values;
};

/// Uniqueness of k-length subsequences at one window: groups included rows
/// by exact vector equality after degradation and returns the fraction of
/// singleton groups. unique_ids are materialized only when `collect_ids`.
WindowUniqueness uniqueness_at(const Dataset& dataset, WindowSpec spec, RoundingOrder order,
                               bool collect_ids = true);

/// O(n^2) pairwise-comparison reference for uniqueness_at. Intended for
/// small populations; shares no grouping code with the fast path.
WindowUniqueness brute_force_uniqueness(const Dataset& dataset, WindowSpec spec,
                                        RoundingOrder order, bool collect_ids = true);

/// Shannon entropy (bits) of the multiset of k-length subsequences at one
/// window: e = -sum_i (c_i/N) log2(c_i/N) over class sizes c_i.
WindowEntropy entropy_at(const Dataset& dataset, WindowSpec spec, RoundingOrder order);

/// Per-timestamp uniqueness for every window start in [0, m-k], plus
/// mean/min/max over defined windows. Parallelizes over t; output is
/// bit-identical for any worker count.
UniquenessResult uniqueness_curve(const Dataset& dataset, std::size_t k, RoundingOrder order,
                                  const EngineOptions& options = {});

EntropyResult entropy_curve(const Dataset& dataset, std::size_t k, RoundingOrder order,
                            const EngineOptions& options = {});

/// Both curves from a single grouping pass per window.
struct CurvePair {
    UniquenessResult uniqueness;
    EntropyResult entropy;
};
CurvePair combined_curves(const Dataset& dataset, std::size_t k, RoundingOrder order,
                          const EngineOptions& options = {});

/// Re-identification probe: degrades the query with the same order and
/// returns every series whose window at t equals it exactly.
MatchResult match_query(const Dataset& dataset, std::size_t t,
                        std::span<const std::uint32_t> query, RoundingOrder order);

}  // namespace unitrace
