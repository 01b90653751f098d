#pragma once

#include <cstdint>
#include <random>

namespace survival {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent generator for work item `index` of a run seeded with `seed`.
// Depends only on (seed, index), never on which worker runs the item.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(mix64(seed)),
                      static_cast<std::uint32_t>(mix64(seed) >> 32),
                      static_cast<std::uint32_t>(mix64(seed ^ mix64(index))),
                      static_cast<std::uint32_t>(mix64(seed ^ mix64(index)) >> 32)};
    return Rng(seq);
}

} // namespace survival
