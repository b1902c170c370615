#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mdlab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive decorrelated substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic seed for the substream identified by `keys` under `master`.
/// Every random draw in the pipeline goes through one of these so that the
/// result of a task never depends on scheduling order.
inline std::uint64_t substream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = splitmix64(master);
    for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    return Rng(substream_seed(master, keys));
}

}  // namespace mdlab
