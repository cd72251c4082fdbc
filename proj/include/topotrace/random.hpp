#pragma once

#include <cstdint>

namespace topotrace {

/// SplitMix64 generator. Fixed so seeded outputs are portable.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in [0, n). n must be positive.
    std::uint64_t uniform_int(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    }

    /// Uniform in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform_int(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    /// Independent stream derived from a seed and a salt.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t salt) {
        SplitMix64 mixer(seed ^ (salt * 0xD1B54A32D192ED03ULL));
        return SplitMix64(mixer.next());
    }

private:
    std::uint64_t state_;
};

}  // namespace topotrace
