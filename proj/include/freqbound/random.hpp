#pragma once

#include <cstdint>
#include <random>

namespace freqbound {

/// Caller-owned random stream. One per thread; never shared.
using RandomStream = std::mt19937_64;

/// SplitMix64 finalizer, used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream for item `index` of a run seeded with `seed`. Depends only on the
/// pair, so results do not depend on execution order.
inline RandomStream derive_stream(std::uint64_t seed, std::uint64_t index) {
    return RandomStream(mix_seed(mix_seed(seed) ^ mix_seed(index + 0x632be59bd9b4e019ULL)));
}

}  // namespace freqbound
