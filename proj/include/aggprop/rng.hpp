#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace aggprop::rng {

// std::uniform_int_distribution and std::shuffle are implementation-defined,
// so draws are done by hand on top of mt19937_64 (whose output is fixed by
// the standard). Same seed, same sequence, on every toolchain.

using Engine = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a, 64-bit.
inline constexpr std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL)
{
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Independent stream for a named purpose under one run seed.
inline Engine stream(std::uint64_t seed, std::string_view purpose)
{
    return Engine(splitmix64(seed ^ fnv1a(purpose)));
}

/// Uniform integer in [0, bound), bound > 0, without modulo bias.
inline std::uint64_t below(Engine& eng, std::uint64_t bound)
{
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = eng();
        if (r >= threshold)
            return r % bound;
    }
}

inline double unit(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

template <class T>
void shuffle(std::span<T> items, Engine& eng)
{
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(below(eng, i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

} // namespace aggprop::rng
