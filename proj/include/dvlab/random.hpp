#pragma once

// Counter-based, platform-stable randomness. Every generated item draws from
// its own stream derived from (seed, stream tag, item index), so results do
// not depend on thread count or generation order. The std distributions are
// implementation-defined, hence the hand-rolled uniform/normal helpers.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace dvlab {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index) noexcept {
    return mix64(mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL)) + index);
}

/// FNV-1a, used to turn names into stream tags.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace streams {
inline constexpr std::uint64_t kMonteCarlo = 1;
inline constexpr std::uint64_t kSphere = 2;
inline constexpr std::uint64_t kCone = 3;
inline constexpr std::uint64_t kPlantedQuery = 4;
inline constexpr std::uint64_t kPlantedRelevant = 5;
inline constexpr std::uint64_t kNoise = 6;
inline constexpr std::uint64_t kProjection = 7;
inline constexpr std::uint64_t kShuffle = 8;
inline constexpr std::uint64_t kDistractor = 9;
inline constexpr std::uint64_t kKeywords = 10;
}  // namespace streams

/// SplitMix64. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}
    constexpr SplitMix64(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept
        : state_(derive_seed(seed, stream, index)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi], unbiased (rejection on the top range).
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept {
        const std::uint64_t span = hi - lo;
        if (span == std::numeric_limits<std::uint64_t>::max()) return (*this)();
        const std::uint64_t range = span + 1;
        const std::uint64_t limit = max() - max() % range;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return lo + x % range;
    }

private:
    std::uint64_t state_;
};

/// Standard normal variates via the Marsaglia polar method.
class NormalSampler {
public:
    explicit NormalSampler(SplitMix64 rng) noexcept : rng_(rng) {}

    double operator()() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * rng_.uniform01() - 1.0;
            v = 2.0 * rng_.uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    SplitMix64& engine() noexcept { return rng_; }

private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dvlab
