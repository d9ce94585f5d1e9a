#pragma once

#include <cstdint>
#include <random>

namespace txsc {

/// Seeded random stream with explicit derivations. std::mt19937_64 output is
/// specified bit-for-bit by the standard; the distribution helpers below are
/// written out so results do not depend on the standard library vendor.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform-ish integer in [lo, hi], inclusive.
    std::uint64_t next_in(std::uint64_t lo, std::uint64_t hi) {
        if (hi <= lo) return lo;
        return lo + next_u64() % (hi - lo + 1);
    }

    /// Value in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bool(double p_true) { return next_unit() < p_true; }

private:
    std::mt19937_64 eng_;
};

}  // namespace txsc
