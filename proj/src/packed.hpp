#pragma once

// Internal enumeration helpers: flat evaluators over word-packed inputs for
// the exhaustive oracle and brute-force paths. Requires n <= 63, which every
// 2^n <= limit precondition already enforces.

#include <cstdint>
#include <optional>
#include <vector>

#include "avoid/circuit.hpp"
#include "avoid/gf2.hpp"

namespace avoid::detail {

class PackedFn {
 public:
  static PackedFn from(const LocalCircuit& c);
  static PackedFn from(const PolyFunction& p);

  uint32_t n() const { return n_; }
  uint32_t m() const { return m_; }

  bool eval_output(uint32_t j, uint64_t x) const {
    if (circuit_) {
      uint64_t p = 0;
      for (uint32_t t = out_start_[j], i = 0; t < out_start_[j + 1]; ++t, ++i)
        p |= ((x >> idx_[t]) & 1) << i;
      return (tt_[tt_start_[j] + p]) != 0;
    }
    bool acc = false;
    for (uint32_t t = out_start_[j]; t < out_start_[j + 1]; ++t)
      acc ^= (x & mask_[t]) == mask_[t];
    return acc;
  }

  // Outputs packed with output 0 as the most significant bit, so ascending
  // packed values are ascending lexicographic strings. Requires m <= 64.
  uint64_t eval_msb(uint64_t x) const {
    uint64_t acc = 0;
    for (uint32_t j = 0; j < m_; ++j) acc = (acc << 1) | uint64_t{eval_output(j, x)};
    return acc;
  }

  void eval_into(uint64_t x, GF2Vector& out) const {
    for (uint32_t j = 0; j < m_; ++j) out.set(j, eval_output(j, x));
  }

 private:
  bool circuit_ = true;
  uint32_t n_ = 0, m_ = 0;
  std::vector<uint32_t> out_start_;  // m+1 entries into idx_ / mask_
  std::vector<uint32_t> idx_;
  std::vector<uint32_t> tt_start_;
  std::vector<uint8_t> tt_;
  std::vector<uint64_t> mask_;
};

// Packs the first min(len, 64) coordinates MSB-first; the caller guarantees
// len <= 64 for exact round trips.
uint64_t pack_msb(const GF2Vector& v);

// y with the last 64 (or all, when m <= 64) coordinates set from `value`
// MSB-first and every earlier coordinate zero.
GF2Vector unpack_msb(uint64_t value, uint32_t m);

// Least value in [0, 2^m) missed by the function's range, scanning all 2^n
// inputs; nullopt when the range covers everything (possible only if m <= n).
std::optional<uint64_t> range_mex(const PackedFn& fn, uint64_t limit,
                                  uint32_t workers);

// Does any input map to y? Full enumeration with early exit.
bool range_contains(const PackedFn& fn, const GF2Vector& y, uint64_t limit);

}  // namespace avoid::detail
