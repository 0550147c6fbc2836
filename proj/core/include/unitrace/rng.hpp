#pragma once

#include <cmath>
#include <cstdint>

namespace unitrace {

/// SplitMix64 finalizer. Stateless 64-bit mixer, also used to derive
/// per-household sub-seeds (sub_seed = mix64(seed ^ mix64(index + 1))).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

/// SplitMix64 pseudo-random generator: tiny, seedable and
/// platform-independent, so generated fixtures are portable.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        return mix64(z);
    }

    /// Uniform double in [0, 1), 53 bits of precision.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        // Multiply-shift range reduction; bias is negligible for the small
        // bounds used here and keeps the draw count at exactly one.
        unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * bound;
        return static_cast<std::uint64_t>(wide >> 64);
    }

    /// Standard normal deviate via Box-Muller, caching the spare value.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        double u2 = next_unit();
        while (u1 <= 0.0) u1 = next_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace unitrace
