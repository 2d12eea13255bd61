#pragma once

// Random streams shared by every stochastic component.
//
// All draws go through the helpers below instead of <random> distributions so
// that a given seed produces the same stream regardless of the standard
// library in use.

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace lsmrl {

using rng_t = std::mt19937_64;

/// Uniform double in [0, 1) with 53 bits of mantissa.
inline double uniform01(rng_t& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform(rng_t& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

/// Unbiased integer in [0, n) by rejection. n must be positive.
inline std::uint64_t uniform_index(rng_t& rng, std::uint64_t n)
{
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()
                              - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

inline bool bernoulli(rng_t& rng, double p)
{
    return uniform01(rng) < p;
}

/// Independent named sub-stream of a run seed.
inline rng_t make_stream(std::uint64_t seed, std::string_view name)
{
    // FNV-1a over the stream name
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return rng_t{seq};
}

}  // namespace lsmrl
