#pragma once

#include <cstdint>

namespace avoid {

// Deterministic splittable generator, scheme "splitmix64-v1".
//
// split(stream) derives an independent child stream without advancing the
// parent, so generators can be handed out per output / per instance in a
// reproducible way. The scheme identifier is written into generated file
// headers so corpora can be regenerated bit for bit.
class SplitRng {
 public:
  static constexpr const char* kScheme = "splitmix64-v1";

  explicit SplitRng(uint64_t seed) : state_(seed) {}

  SplitRng split(uint64_t stream) const {
    return SplitRng(mix(state_ + kGamma * (stream + 1)));
  }

  uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  bool coin() { return next() >> 63; }

  // Uniform draw from [0, bound) via rejection.
  uint64_t below(uint64_t bound);

 private:
  static constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ull;
  static uint64_t mix(uint64_t z);
  uint64_t state_;
};

}  // namespace avoid
