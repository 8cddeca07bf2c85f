#pragma once

#include <cstdint>
#include <random>

namespace spikecode {

using Rng = std::mt19937_64;

/// Deterministically mixes a base seed with a stream tag (SplitMix64 finalizer),
/// so independent stages never share a generator state.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng{derive_seed(seed, stream)};
}

}  // namespace spikecode
