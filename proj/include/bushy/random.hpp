#pragma once

#include <cstdint>
#include <random>

#include "bushy/natural.hpp"

namespace bushy {

/// SplitMix64 finalizer. Used to derive independent trial seeds from a base seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-mode seed derivation: trial `counter` of a batch seeded with `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter) {
  return splitmix64(splitmix64(base) ^ (counter * 0xd1b54a32d192ed03ULL + 1));
}

/// Seeded random source. The engine is std::mt19937_64 (fully specified by the
/// standard); the bounded draws are rejection samplers written here so results
/// do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
  }

  /// Uniform in [0, bound) for arbitrary-precision bounds.
  Natural below(const Natural& bound) {
    if (bound <= 1) return 0;
    if (bound <= std::numeric_limits<std::uint64_t>::max()) {
      return below(static_cast<std::uint64_t>(bound));
    }
    // Draw bit_length(bound - 1) random bits and reject values >= bound.
    const std::uint64_t bits = bit_length(bound - 1);
    const std::uint64_t words = (bits + 63) / 64;
    const unsigned top_bits = static_cast<unsigned>(bits - (words - 1) * 64);
    for (;;) {
      Natural x = 0;
      for (std::uint64_t w = 0; w < words; ++w) {
        std::uint64_t word = next();
        if (w == 0 && top_bits < 64) word &= (std::uint64_t{1} << top_bits) - 1;
        x <<= 64;
        x |= word;
      }
      if (x < bound) return x;
    }
  }

  /// Uniform in [1, n].
  Natural one_to(const Natural& n) { return below(n) + 1; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bushy
