#ifndef IQSWITCH_RNG_HPP
#define IQSWITCH_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace iqswitch {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for substream `path` of `master`. Each path component is folded in
// through the mixer, so (seed, a, b) and (seed, b, a) land on unrelated streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = splitmix64(master);
    for (const auto p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace iqswitch

#endif  // IQSWITCH_RNG_HPP
