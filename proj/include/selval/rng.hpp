#pragma once

#include <cstdint>
#include <random>

namespace selval {

inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent generator for stream `index` under `seed`; the same pair always
// yields the same sequence regardless of which thread asks for it.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index)
{
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(~index)));
}

} // namespace selval
