#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "avoid/circuit.hpp"
#include "avoid/encoding.hpp"
#include "avoid/gf2.hpp"

namespace avoid {

// Counters every solver can report; fields not meaningful for a given
// algorithm stay zero.
struct SolveStats {
  uint32_t iterations = 0;    // output-fixing steps taken
  uint32_t branch_count = 0;  // t, the number of branched inputs
  double max_step_ratio = 0;  // largest per-step union shrink ratio observed
};

// Lexicographically least y outside the range, by full enumeration.
GF2Vector brute_force_avoid(const LocalCircuit& c, uint64_t limit,
                            uint32_t workers = 1);
GF2Vector brute_force_avoid(const PolyFunction& p, uint64_t limit,
                            uint32_t workers = 1);

// Range scan without the stretch precondition: nullopt when the range covers
// the whole output space (possible only when m <= n).
std::optional<GF2Vector> brute_force_scan(const LocalCircuit& c, uint64_t limit,
                                          uint32_t workers = 1);
std::optional<GF2Vector> brute_force_scan(const PolyFunction& p, uint64_t limit,
                                          uint32_t workers = 1);

// Splits s into (s0, s1) with every x in s satisfying f(x)=b landing in s_b
// and size(s0) + size(s1) <= 3/2 * size(s).
std::pair<AffineSubspace, AffineSubspace> affine_reduce(const AffineSubspace& s,
                                                        const TwoLocalFunction& f);

// Dimension-reduction solver for circuits of locality at most 2, m >= n+1.
GF2Vector solve_nc02(const LocalCircuit& c, SolveStats* stats = nullptr);

// High-degree input set I and the outputs O that each read at least k-2
// inputs from I. Requires every output to read exactly k inputs.
struct DenseSelection {
  std::vector<uint32_t> inputs;   // I, ascending
  std::vector<uint32_t> outputs;  // O, ascending
  uint32_t c;
};
DenseSelection select_dense_sets(const LocalCircuit& c, uint32_t cparam);

// Test hook: state after one output fix inside subspace_union.
struct SubspaceUnionStep {
  uint32_t step;
  uint32_t output_index;
  bool chosen_bit;
  const PartialAssignment& assignment;
  const std::vector<AffineSubspace>& branches;
};

struct SubspaceUnionOptions {
  uint32_t branch_cap = 26;
  uint32_t workers = 1;
  std::function<void(const SubspaceUnionStep&)> observer;
};

// Branch-and-reduce solver for locality k and stretch m >= 3 n^(k-2).
GF2Vector subspace_union(const LocalCircuit& c,
                         const SubspaceUnionOptions& options = {},
                         SolveStats* stats = nullptr);

// Single-subspace solver for locality 3 and stretch m >= C(n,2)/3 + 2n.
GF2Vector one_subspace(const LocalCircuit& c, SolveStats* stats = nullptr);

enum class Degree2Strategy { kBrute, kSubspaceUnion, kOneSubspace };

// Encodes a degree-<=2 map into locality 3, solves with the chosen strategy,
// and decodes; the decoded point avoids the source map.
GF2Vector solve_degree2(const PolyFunction& p, Degree2Strategy strategy,
                        uint64_t enum_limit,
                        const SubspaceUnionOptions& options = {},
                        SolveStats* stats = nullptr);

}  // namespace avoid
