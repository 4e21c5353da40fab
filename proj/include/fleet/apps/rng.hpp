#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fleet::apps {

// mt19937_64 output is fixed by the standard; the std distributions are not,
// so bounded draws go through these helpers to keep traces portable.
using Rng = std::mt19937_64;

// Uniform in [0, bound). bound must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound)
{
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

// Uniform in [lo, hi], inclusive.
inline std::int64_t uniform_between(Rng& rng, std::int64_t lo, std::int64_t hi)
{
    return lo + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text, std::uint64_t hash = 0xcbf29ce484222325ULL)
{
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

// Per-activity seed from the scenario seed, the device index and the package.
inline std::uint64_t derive_seed(std::uint64_t scenario_seed, std::uint64_t device_index, std::string_view package)
{
    std::uint64_t h = splitmix64(scenario_seed);
    h = splitmix64(h ^ device_index);
    return splitmix64(h ^ fnv1a64(package));
}

}  // namespace fleet::apps
