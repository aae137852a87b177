#pragma once

#include <cstdint>
#include <random>

namespace clustercache {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to decorrelate (seed, stream) pairs.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent generator for sub-stream `stream` of a base seed. Trial i of a
/// Monte Carlo run always draws from make_stream(seed, i), whatever thread
/// executes it.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(mix64(stream)),
                    static_cast<std::uint32_t>(mix64(stream) >> 32)};
  return Rng(seq);
}

}  // namespace clustercache
