#pragma once

#include <cstdint>
#include <random>

namespace tzinf {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for sub-stream `index` of `seed`, tagged by purpose so that, e.g., the
// design and the noise of one replication never share a stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t tag = 0) {
    return mix_seed(mix_seed(mix_seed(seed) ^ index) ^ (tag * 0x2545f4914f6cdd1dULL));
}

} // namespace tzinf
