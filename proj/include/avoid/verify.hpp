#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "avoid/circuit.hpp"
#include "avoid/encoding.hpp"
#include "avoid/gf2.hpp"
#include "avoid/solvers.hpp"

namespace avoid {

// Exhaustive range membership: true when some input maps to y.
bool in_range(const LocalCircuit& c, const GF2Vector& y, uint64_t limit);
bool in_range(const PolyFunction& p, const GF2Vector& y, uint64_t limit);

// Membership oracle for repeated queries against one function. With at most
// 30 output bits the whole range is materialized as a bitmap up front;
// otherwise each query streams over all inputs.
class RangeOracle {
 public:
  RangeOracle(const LocalCircuit& c, uint64_t limit, uint32_t workers = 1);
  RangeOracle(const PolyFunction& p, uint64_t limit, uint32_t workers = 1);
  bool contains(const GF2Vector& y) const;

 private:
  void build(uint32_t workers);
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// True exactly when y has the right length and lies outside the range.
bool check_avoid_solution(const LocalCircuit& c, const GF2Vector& y, uint64_t limit);
bool check_avoid_solution(const PolyFunction& p, const GF2Vector& y, uint64_t limit);

enum class RigidVerdict { kRigid, kNonRigid };

// Outcome of an exhaustive rigidity decision. A non-rigid verdict carries a
// decomposition m = l*r + s with rank(l*r) <= rank_budget and every row of s
// of weight <= sparsity_budget; a rigid verdict certifies the search space
// was exhausted.
struct RigidityCertificate {
  GF2Matrix m;
  uint32_t rank_budget;
  uint32_t sparsity_budget;
  RigidVerdict verdict;
  std::optional<GF2Matrix> l, r, s;
};

// Decides (r, s)-rigidity by enumerating low-rank parts: row spaces in
// reduced row-echelon form times all coefficient matrices.
RigidityCertificate is_rigid(const GF2Matrix& m, uint32_t r, uint32_t s,
                             uint64_t budget);

// Independent cross-check: enumerates every row-sparse S and tests
// rank(M + S) <= r. Exponentially more work; intended for tiny sides.
RigidityCertificate is_rigid_dual(const GF2Matrix& m, uint32_t r, uint32_t s,
                                  uint64_t budget);

std::string write_certificate(const RigidityCertificate& cert);

enum class PipelineStrategy { kBrute, kSubspaceUnion, kOneSubspace };

struct RigidPipelineResult {
  GF2Matrix matrix;
  RigidityCertificate cert;
  SolveStats stats;
  uint64_t instance_inputs;
  uint64_t instance_outputs;
};

// Builds the degree-2 instance, finds a point outside its range, reshapes it
// to an n x n matrix, and certifies rigidity. The brute strategy scans the
// instance directly (even without stretch); the others go through the
// locality-3 encoding. A non-rigid certificate is an internal failure.
RigidPipelineResult rigid_pipeline(uint32_t n, uint32_t r, uint32_t s,
                                   PipelineStrategy strategy, uint64_t enum_limit,
                                   uint64_t rigid_budget,
                                   const SubspaceUnionOptions& options = {});

}  // namespace avoid
