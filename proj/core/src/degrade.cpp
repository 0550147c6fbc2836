#include "unitrace/degrade.hpp"

#include <string>

namespace unitrace {

namespace {

std::uint64_t pow10_u64(int order) {
    std::uint64_t step = 1;
    for (int i = 0; i < order; ++i) step *= 10;
    return step;
}

}  // namespace

RoundingOrder::RoundingOrder(int order) : RoundingOrder(order, true) {
    if (order < 0 || order > kDefaultMax)
        throw ConfigError("rounding order " + std::to_string(order) +
                          " outside [0, 3]; use RoundingOrder::extended for higher orders");
}

RoundingOrder::RoundingOrder(int order, bool) : order_(order), step_(pow10_u64(order)) {}

RoundingOrder RoundingOrder::extended(int order) {
    if (order < 0 || order > kAbsoluteMax)
        throw ConfigError("rounding order " + std::to_string(order) + " outside [0, 9]");
    return RoundingOrder(order, true);
}

std::uint32_t round_order(std::uint32_t value, RoundingOrder order) {
    if (order.order() == 0) return value;
    const std::uint64_t step = order.step();
    // Ties round half away from zero; exact on non-negative integers.
    const std::uint64_t rounded = (static_cast<std::uint64_t>(value) + step / 2) / step * step;
    return static_cast<std::uint32_t>(rounded);
}

// Trusted constructor path: metadata, mask and row order are taken verbatim
// from the source dataset, so no re-validation pass is needed (rounded
// values may legitimately exceed domain_max by less than half a step).
Dataset degrade_unchecked(const Dataset& src, std::vector<std::uint32_t>&& values) {
    Dataset d;
    d.n_ = src.series_count();
    d.m_ = src.timestamp_count();
    d.step_seconds_ = src.step_seconds();
    d.unit_ = src.unit();
    d.domain_max_ = src.domain_max();
    d.timestamps_ = src.timestamps();
    d.series_ids_ = src.series_ids();
    d.values_ = std::move(values);
    d.present_ = std::vector<std::uint8_t>(src.present_data(),
                                           src.present_data() + d.n_ * d.m_);
    return d;
}

Dataset degrade_dataset(const Dataset& dataset, RoundingOrder order) {
    const std::size_t cells = dataset.series_count() * dataset.timestamp_count();
    const std::uint32_t* src = dataset.values_data();
    std::vector<std::uint32_t> values(cells);
    if (order.order() == 0) {
        std::copy(src, src + cells, values.begin());
    } else {
        const std::uint64_t step = order.step();
        const std::uint64_t half = step / 2;
        for (std::size_t i = 0; i < cells; ++i) {
            values[i] = static_cast<std::uint32_t>((src[i] + half) / step * step);
        }
    }
    return degrade_unchecked(dataset, std::move(values));
}

}  // namespace unitrace
