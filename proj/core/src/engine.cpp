#include "unitrace/engine.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <thread>

#include "unitrace/rng.hpp"

namespace unitrace {

namespace {

constexpr std::uint64_t kHashSeed = 0x243F6A8885A308D3ULL;

inline std::uint64_t hash_step(std::uint64_t h, std::uint32_t v) {
    return mix64(h ^ (v + 0x9E3779B97F4A7C15ULL));
}

// Open-addressing table grouping window vectors by exact equality. Slots are
// keyed by a 64-bit hash but membership is always confirmed against the
// representative row's actual values: a hash collision probes onward, it can
// never merge two distinct subsequences.
class GroupTable {
public:
    struct Slot {
        std::uint64_t hash;
        std::uint32_t rep_row;
        std::uint32_t count;
    };

    void reset(std::size_t expected_rows) {
        std::size_t want = std::bit_ceil(std::max<std::size_t>(16, expected_rows * 2));
        if (slots_.size() != want) {
            slots_.assign(want, Slot{});
            stamps_.assign(want, 0);
            epoch_ = 0;
        }
        occupied_.reserve(expected_rows);
        mask_ = want - 1;
    }

    void new_window() {
        ++epoch_;
        occupied_.clear();
        if (epoch_ == 0) {  // stamp wrap-around: start clean
            std::fill(stamps_.begin(), stamps_.end(), 0);
            epoch_ = 1;
        }
    }

    // `equal_rep(rep_row)` must report whether the current row's window
    // equals rep_row's window.
    template <typename EqualFn>
    void insert(std::uint64_t hash, std::uint32_t row, EqualFn&& equal_rep) {
        std::size_t i = static_cast<std::size_t>(hash) & mask_;
        for (;;) {
            if (stamps_[i] != epoch_) {
                stamps_[i] = epoch_;
                slots_[i] = Slot{hash, row, 1};
                occupied_.push_back(static_cast<std::uint32_t>(i));
                return;
            }
            Slot& slot = slots_[i];
            if (slot.hash == hash && equal_rep(slot.rep_row)) {
                ++slot.count;
                return;
            }
            i = (i + 1) & mask_;
        }
    }

    const std::vector<std::uint32_t>& occupied() const { return occupied_; }
    const Slot& slot(std::uint32_t index) const { return slots_[index]; }

private:
    std::vector<Slot> slots_;
    std::vector<std::uint32_t> stamps_;
    std::vector<std::uint32_t> occupied_;
    std::uint64_t mask_ = 0;
    std::uint32_t epoch_ = 0;
};

// Value access for single-window paths: rounding applied on the fly.
struct RoundedAccess {
    const std::uint32_t* values;
    const std::uint8_t* mask;
    std::size_t m;
    std::uint64_t step;
    std::uint64_t half;

    std::uint32_t value(std::size_t row, std::size_t col) const {
        const std::uint32_t v = values[row * m + col];
        return step == 1 ? v : static_cast<std::uint32_t>((v + half) / step * step);
    }
    bool present(std::size_t row, std::size_t col) const { return mask[row * m + col] != 0; }
};

struct WindowCounts {
    std::size_t included = 0;
    std::size_t unique = 0;
    std::size_t classes = 0;
    double sum_c_log2_c = 0.0;  // sum of count*log2(count) over classes
};

// Groups all complete rows of window (t, k). The table retains the final
// class layout so callers can walk `occupied()` afterwards.
template <typename Access>
WindowCounts group_window(const Access& acc, std::size_t n, std::size_t t, std::size_t k,
                          GroupTable& table, bool want_entropy) {
    table.new_window();
    WindowCounts counts;
    for (std::size_t r = 0; r < n; ++r) {
        std::uint64_t h = kHashSeed;
        bool complete = true;
        for (std::size_t j = 0; j < k; ++j) {
            if (!acc.present(r, t + j)) {
                complete = false;
                break;
            }
            h = hash_step(h, acc.value(r, t + j));
        }
        if (!complete) continue;
        ++counts.included;
        table.insert(h, static_cast<std::uint32_t>(r), [&](std::uint32_t rep) {
            for (std::size_t j = 0; j < k; ++j) {
                if (acc.value(rep, t + j) != acc.value(r, t + j)) return false;
            }
            return true;
        });
    }
    counts.classes = table.occupied().size();
    for (const std::uint32_t idx : table.occupied()) {
        const auto& slot = table.slot(idx);
        if (slot.count == 1) {
            ++counts.unique;
        } else if (want_entropy) {
            counts.sum_c_log2_c +=
                static_cast<double>(slot.count) * std::log2(static_cast<double>(slot.count));
        }
    }
    return counts;
}

// Fast path for curves over pre-degraded data: contiguous row windows, raw
// equality via memcmp.
struct RawAccess {
    const std::uint32_t* values;
    const std::uint8_t* mask;
    std::size_t m;

    std::uint32_t value(std::size_t row, std::size_t col) const { return values[row * m + col]; }
    bool present(std::size_t row, std::size_t col) const { return mask[row * m + col] != 0; }
};

WindowCounts group_window_raw(const RawAccess& acc, std::size_t n, std::size_t t, std::size_t k,
                              GroupTable& table, bool want_entropy) {
    table.new_window();
    WindowCounts counts;
    const std::uint32_t* base = acc.values + t;
    const std::uint8_t* mbase = acc.mask + t;
    const std::size_t m = acc.m;
    for (std::size_t r = 0; r < n; ++r) {
        const std::uint32_t* w = base + r * m;
        const std::uint8_t* wm = mbase + r * m;
        std::uint64_t h = kHashSeed;
        bool complete = true;
        for (std::size_t j = 0; j < k; ++j) {
            if (!wm[j]) {
                complete = false;
                break;
            }
            h = hash_step(h, w[j]);
        }
        if (!complete) continue;
        ++counts.included;
        table.insert(h, static_cast<std::uint32_t>(r), [&](std::uint32_t rep) {
            return std::memcmp(base + static_cast<std::size_t>(rep) * m, w,
                               k * sizeof(std::uint32_t)) == 0;
        });
    }
    counts.classes = table.occupied().size();
    for (const std::uint32_t idx : table.occupied()) {
        const auto& slot = table.slot(idx);
        if (slot.count == 1) {
            ++counts.unique;
        } else if (want_entropy) {
            counts.sum_c_log2_c +=
                static_cast<double>(slot.count) * std::log2(static_cast<double>(slot.count));
        }
    }
    return counts;
}

void check_window(const Dataset& dataset, WindowSpec spec) {
    if (spec.k < 1) throw BoundsError("window length k must be >= 1");
    if (spec.t + spec.k > dataset.timestamp_count())
        throw BoundsError("window [t=" + std::to_string(spec.t) +
                          ", k=" + std::to_string(spec.k) +
                          ") does not fit m=" + std::to_string(dataset.timestamp_count()));
}

// Entropy from class sizes: log2(N) - (1/N) * sum c*log2(c). Exactly 0 for a
// single class and exactly log2(N) when all classes are singletons.
double entropy_bits(std::size_t included, double sum_c_log2_c) {
    const double n = static_cast<double>(included);
    return std::log2(n) - sum_c_log2_c / n;
}

std::vector<std::size_t> enumerate_t(const Dataset& dataset, std::size_t k,
                                     const EngineOptions& options) {
    const std::size_t m = dataset.timestamp_count();
    if (k < 1 || k > m)
        throw BoundsError("k=" + std::to_string(k) + " outside [1, m=" + std::to_string(m) + "]");
    const std::size_t t_count = m - k + 1;
    if (options.t_values.empty()) {
        std::vector<std::size_t> ts(t_count);
        for (std::size_t i = 0; i < t_count; ++i) ts[i] = i;
        return ts;
    }
    std::vector<std::size_t> ts;
    ts.reserve(options.t_values.size());
    for (std::size_t i = 0; i < options.t_values.size(); ++i) {
        if (i > 0 && options.t_values[i] <= options.t_values[i - 1])
            throw BoundsError("t filter must be strictly increasing");
        // Starts past m-k are dropped so one filter list can serve every k
        // of a sweep grid.
        if (options.t_values[i] < t_count) ts.push_back(options.t_values[i]);
    }
    return ts;
}

unsigned resolve_threads(unsigned requested, std::size_t work_items) {
    unsigned threads = requested != 0 ? requested : std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, work_items)));
}

struct CurveSlots {
    std::vector<WindowCounts> counts;
};

// Runs the grouping over every enumerated window, statically partitioned
// across workers. Workers own disjoint t ranges and write disjoint slots, so
// the result is independent of scheduling.
CurveSlots run_windows(const Dataset& dataset, std::size_t k,
                       const std::vector<std::size_t>& ts, bool want_entropy, unsigned threads) {
    const std::size_t n = dataset.series_count();
    CurveSlots slots;
    slots.counts.resize(ts.size());
    const RawAccess acc{dataset.values_data(), dataset.present_data(), dataset.timestamp_count()};

    const unsigned workers = resolve_threads(threads, ts.size());
    auto body = [&](std::size_t begin, std::size_t end) {
        GroupTable table;
        table.reset(n);
        for (std::size_t i = begin; i < end; ++i) {
            slots.counts[i] = group_window_raw(acc, n, ts[i], k, table, want_entropy);
        }
    };

    if (workers == 1) {
        body(0, ts.size());
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (ts.size() + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(ts.size(), static_cast<std::size_t>(w) * chunk);
            const std::size_t end = std::min(ts.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(body, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return slots;
}

const Dataset& maybe_degrade(const Dataset& dataset, RoundingOrder order,
                             std::optional<Dataset>& storage) {
    if (order.order() == 0) return dataset;
    storage.emplace(degrade_dataset(dataset, order));
    return *storage;
}

}  // namespace

WindowUniqueness uniqueness_at(const Dataset& dataset, WindowSpec spec, RoundingOrder order,
                               bool collect_ids) {
    check_window(dataset, spec);
    const std::size_t n = dataset.series_count();
    const RoundedAccess acc{dataset.values_data(), dataset.present_data(),
                            dataset.timestamp_count(), order.step(), order.step() / 2};
    GroupTable table;
    table.reset(n);
    const WindowCounts counts = group_window(acc, n, spec.t, spec.k, table, false);

    WindowUniqueness out;
    out.included_count = counts.included;
    out.unique_count = counts.unique;
    if (counts.included > 0)
        out.u = static_cast<double>(counts.unique) / static_cast<double>(counts.included);
    if (collect_ids) {
        out.unique_ids.reserve(counts.unique);
        // Slots were first occupied in ascending row order, so the
        // representatives come out already in canonical order.
        for (const std::uint32_t idx : table.occupied()) {
            const auto& slot = table.slot(idx);
            if (slot.count == 1) out.unique_ids.push_back(dataset.series_ids()[slot.rep_row]);
        }
    }
    return out;
}

WindowUniqueness brute_force_uniqueness(const Dataset& dataset, WindowSpec spec,
                                        RoundingOrder order, bool collect_ids) {
    check_window(dataset, spec);
    const std::size_t n = dataset.series_count();
    const std::size_t t = spec.t;
    const std::size_t k = spec.k;
    const std::uint64_t step = order.step();
    const std::uint64_t half = step / 2;

    auto rounded = [&](std::size_t row, std::size_t j) -> std::uint32_t {
        const std::uint32_t v = dataset.row_values(row)[t + j];
        return step == 1 ? v : static_cast<std::uint32_t>((v + half) / step * step);
    };
    auto complete = [&](std::size_t row) {
        const auto mask = dataset.row_mask(row);
        for (std::size_t j = 0; j < k; ++j) {
            if (!mask[t + j]) return false;
        }
        return true;
    };

    std::vector<std::uint8_t> included(n, 0);
    for (std::size_t r = 0; r < n; ++r) included[r] = complete(r) ? 1 : 0;

    WindowUniqueness out;
    for (std::size_t r = 0; r < n; ++r) {
        if (!included[r]) continue;
        ++out.included_count;
        bool unique = true;
        for (std::size_t other = 0; other < n && unique; ++other) {
            if (other == r || !included[other]) continue;
            bool equal = true;
            for (std::size_t j = 0; j < k; ++j) {
                if (rounded(r, j) != rounded(other, j)) {
                    equal = false;
                    break;
                }
            }
            if (equal) unique = false;
        }
        if (unique) {
            ++out.unique_count;
            if (collect_ids) out.unique_ids.push_back(dataset.series_ids()[r]);
        }
    }
    if (out.included_count > 0)
        out.u = static_cast<double>(out.unique_count) / static_cast<double>(out.included_count);
    return out;
}

WindowEntropy entropy_at(const Dataset& dataset, WindowSpec spec, RoundingOrder order) {
    check_window(dataset, spec);
    const std::size_t n = dataset.series_count();
    const RoundedAccess acc{dataset.values_data(), dataset.present_data(),
                            dataset.timestamp_count(), order.step(), order.step() / 2};
    GroupTable table;
    table.reset(n);
    const WindowCounts counts = group_window(acc, n, spec.t, spec.k, table, true);

    WindowEntropy out;
    out.included_count = counts.included;
    out.class_count = counts.classes;
    if (counts.included > 0) out.e = entropy_bits(counts.included, counts.sum_c_log2_c);
    return out;
}

CurvePair combined_curves(const Dataset& dataset, std::size_t k, RoundingOrder order,
                          const EngineOptions& options) {
    const std::vector<std::size_t> ts = enumerate_t(dataset, k, options);
    std::optional<Dataset> degraded_storage;
    const Dataset& working = maybe_degrade(dataset, order, degraded_storage);
    const CurveSlots slots = run_windows(working, k, ts, true, options.threads);

    CurvePair out;
    out.uniqueness.k = k;
    out.uniqueness.order = order.order();
    out.entropy.k = k;
    out.entropy.order = order.order();
    out.uniqueness.per_t.resize(ts.size());
    out.entropy.per_t.resize(ts.size());

    double sum_u = 0.0, sum_e = 0.0;
    std::size_t defined = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const WindowCounts& c = slots.counts[i];
        UniquenessPoint& up = out.uniqueness.per_t[i];
        EntropyPoint& ep = out.entropy.per_t[i];
        up.t = ts[i];
        ep.t = ts[i];
        up.timestamp = dataset.timestamps()[ts[i]];
        ep.timestamp = up.timestamp;
        up.unique_count = c.unique;
        up.included_count = c.included;
        ep.class_count = c.classes;
        ep.included_count = c.included;
        if (c.included == 0) {
            ++out.uniqueness.undefined_windows;
            ++out.entropy.undefined_windows;
            continue;
        }
        const double u = static_cast<double>(c.unique) / static_cast<double>(c.included);
        const double e = entropy_bits(c.included, c.sum_c_log2_c);
        up.u = u;
        ep.e = e;
        ++defined;
        sum_u += u;
        sum_e += e;
        if (!out.uniqueness.min_u || u < *out.uniqueness.min_u) out.uniqueness.min_u = u;
        if (!out.uniqueness.max_u || u > *out.uniqueness.max_u) out.uniqueness.max_u = u;
    }
    if (defined > 0) {
        out.uniqueness.mean_u = sum_u / static_cast<double>(defined);
        out.entropy.mean_e = sum_e / static_cast<double>(defined);
    }
    return out;
}

UniquenessResult uniqueness_curve(const Dataset& dataset, std::size_t k, RoundingOrder order,
                                  const EngineOptions& options) {
    const std::vector<std::size_t> ts = enumerate_t(dataset, k, options);
    std::optional<Dataset> degraded_storage;
    const Dataset& working = maybe_degrade(dataset, order, degraded_storage);
    const CurveSlots slots = run_windows(working, k, ts, false, options.threads);

    UniquenessResult out;
    out.k = k;
    out.order = order.order();
    out.per_t.resize(ts.size());
    double sum_u = 0.0;
    std::size_t defined = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const WindowCounts& c = slots.counts[i];
        UniquenessPoint& up = out.per_t[i];
        up.t = ts[i];
        up.timestamp = dataset.timestamps()[ts[i]];
        up.unique_count = c.unique;
        up.included_count = c.included;
        if (c.included == 0) {
            ++out.undefined_windows;
            continue;
        }
        const double u = static_cast<double>(c.unique) / static_cast<double>(c.included);
        up.u = u;
        ++defined;
        sum_u += u;
        if (!out.min_u || u < *out.min_u) out.min_u = u;
        if (!out.max_u || u > *out.max_u) out.max_u = u;
    }
    if (defined > 0) out.mean_u = sum_u / static_cast<double>(defined);
    return out;
}

EntropyResult entropy_curve(const Dataset& dataset, std::size_t k, RoundingOrder order,
                            const EngineOptions& options) {
    return combined_curves(dataset, k, order, options).entropy;
}

MatchResult match_query(const Dataset& dataset, std::size_t t,
                        std::span<const std::uint32_t> query, RoundingOrder order) {
    if (query.empty()) throw BoundsError("query must contain at least one value");
    check_window(dataset, WindowSpec{t, query.size()});

    const std::size_t k = query.size();
    const std::uint64_t step = order.step();
    const std::uint64_t half = step / 2;
    std::vector<std::uint32_t> probe(query.begin(), query.end());
    if (step != 1) {
        for (auto& v : probe) v = static_cast<std::uint32_t>((v + half) / step * step);
    }

    MatchResult out;
    out.query.assign(query.begin(), query.end());
    out.t = t;
    for (std::size_t r = 0; r < dataset.series_count(); ++r) {
        const auto mask = dataset.row_mask(r);
        const auto values = dataset.row_values(r);
        bool match = true;
        for (std::size_t j = 0; j < k; ++j) {
            if (!mask[t + j]) {
                match = false;
                break;
            }
            const std::uint32_t v = step == 1
                                        ? values[t + j]
                                        : static_cast<std::uint32_t>((values[t + j] + half) / step * step);
            if (v != probe[j]) {
                match = false;
                break;
            }
        }
        if (match) out.matches.push_back(dataset.series_ids()[r]);
    }
    out.is_unique = out.matches.size() == 1;
    return out;
}

}  // namespace unitrace
