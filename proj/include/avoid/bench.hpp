#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "avoid/solvers.hpp"

namespace avoid {

// How the output count is derived from n for generated bench instances.
struct MRule {
  enum class Kind { kConst, kLinearN, kNPlus, kOneSub };
  Kind kind = Kind::kLinearN;
  uint64_t value = 3;

  uint64_t apply(uint32_t n) const;
  std::string text() const;
  // Accepts "<K>", "<K>n", "n+<K>", and "onesub".
  static MRule parse(const std::string& s);
};

struct BenchRow {
  uint32_t n, m, k;
  std::string alg;
  uint32_t t;
  uint32_t iters;
  uint64_t micros;
  bool verified;
};

// One row per (n, rule, seed, algorithm), instances from gen_random_nc0 with
// seed = seed_base + index; every output is checked against the exhaustive
// oracle.
std::vector<BenchRow> run_bench(uint32_t k, uint32_t n_lo, uint32_t n_hi,
                                const std::vector<MRule>& rules, uint32_t seeds,
                                const std::vector<std::string>& algs,
                                uint64_t seed_base, uint64_t enum_limit,
                                const SubspaceUnionOptions& options = {});

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace avoid
