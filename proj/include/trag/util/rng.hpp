#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace trag::util {

// std::uniform_*_distribution output differs between standard libraries, so
// anything that must be reproducible draws through these helpers instead.

/// Unbiased integer in [0, bound) by rejection sampling. bound > 0.
inline std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double unit_double(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace trag::util
