#pragma once

#include <cstdint>
#include <random>

namespace anolab {

using Rng = std::mt19937_64;

/// Independent streams derived from one run seed. Changing how many draws one
/// role consumes never shifts another role's stream.
enum class StreamRole : std::uint32_t {
  kData = 1,
  kMinibatch = 2,
  kNoise = 3,
  kInit = 4,
  kFuzz = 5,
};

inline Rng make_stream(std::uint64_t seed, StreamRole role) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(role), 0x616e6fu};
  return Rng(seq);
}

}  // namespace anolab
