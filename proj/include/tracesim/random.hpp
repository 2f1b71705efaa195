#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tracesim {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a; stable across platforms, used to key sweep cells.
constexpr std::uint64_t hash_string(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Distinct sub-streams of one seed (e.g. topology vs. per-node rates).
enum class Stream : std::uint64_t {
    topology = 0x746f706fULL,
    node_rates = 0x72617465ULL,
    dynamics = 0x64796e61ULL,
};

inline Rng make_rng(std::uint64_t seed, Stream stream = Stream::dynamics)
{
    return Rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream))));
}

inline double uniform01(Rng& rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

} // namespace tracesim
