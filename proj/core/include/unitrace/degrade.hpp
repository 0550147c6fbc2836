#pragma once

#include <cstdint>

#include "unitrace/dataset.hpp"

namespace unitrace {

/// Precision degradation level: number of decimal orders of magnitude
/// removed by rounding (0 = none, 1 = nearest 10, 2 = nearest 100,
/// 3 = nearest 1000). Orders above 3 require the explicit `extended`
/// factory.
class RoundingOrder {
public:
    static constexpr int kDefaultMax = 3;
    static constexpr int kAbsoluteMax = 9;

    explicit RoundingOrder(int order);

    /// Override for orders in (3, 9]; deliberate opt-in.
    static RoundingOrder extended(int order);

    int order() const { return order_; }
    std::uint64_t step() const { return step_; }

    bool operator==(const RoundingOrder&) const = default;

private:
    RoundingOrder(int order, bool);  // unchecked
    int order_ = 0;
    std::uint64_t step_ = 1;
};

/// Rounds to the nearest 10^order with ties rounded half away from zero
/// (SQL ROUND semantics). Total on all non-negative inputs; the result is
/// always a multiple of 10^order.
std::uint32_t round_order(std::uint32_t value, RoundingOrder order);

/// Element-wise round_order over every present value. Missing mask and all
/// metadata are unchanged. Results may exceed domain_max by less than half
/// a rounding step; no re-clamping is applied so that every output cell
/// equals round_order of its input cell.
Dataset degrade_dataset(const Dataset& dataset, RoundingOrder order);

}  // namespace unitrace
