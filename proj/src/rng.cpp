#include "avoid/rng.hpp"

#include "avoid/errors.hpp"

namespace avoid {

uint64_t SplitRng::mix(uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

uint64_t SplitRng::below(uint64_t bound) {
  if (bound == 0) throw ParameterError("SplitRng::below: bound must be positive");
  // 2^64 mod bound; draws at or above 2^64 - rem are rejected.
  const uint64_t rem = (UINT64_MAX % bound + 1) % bound;
  for (;;) {
    const uint64_t r = next();
    if (rem == 0 || r <= UINT64_MAX - rem) return r % bound;
  }
}

}  // namespace avoid
