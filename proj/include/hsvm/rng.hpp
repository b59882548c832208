#pragma once

#include <cstdint>
#include <random>

namespace hsvm {

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream, substream); the same triple always
/// yields the same sequence.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32),
                    0x68737666u};
  return Rng(seq);
}

}  // namespace hsvm
