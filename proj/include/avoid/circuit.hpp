#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "avoid/gf2.hpp"
#include "avoid/rng.hpp"

namespace avoid {

// One output of a local circuit: the sorted input indices it reads and a
// truth table of 2^arity bits. Table position p holds the value of the
// assignment where the i-th read input (in index order) equals bit i of p,
// least significant first. This bit order is shared by every module.
struct CircuitOutput {
  std::vector<uint32_t> inputs;
  std::vector<uint8_t> table;
};

// Multi-output circuit where output j reads at most k inputs.
class LocalCircuit {
 public:
  LocalCircuit(uint32_t n, uint32_t m, uint32_t k,
               std::vector<CircuitOutput> outputs);

  uint32_t n() const { return n_; }
  uint32_t m() const { return m_; }
  uint32_t k() const { return k_; }
  const CircuitOutput& output(size_t j) const { return outputs_[j]; }
  const std::vector<CircuitOutput>& outputs() const { return outputs_; }
  uint32_t max_arity() const;

  GF2Vector eval(const GF2Vector& x) const;
  bool eval_output(size_t j, const GF2Vector& x) const;

 private:
  uint32_t n_, m_, k_;
  std::vector<CircuitOutput> outputs_;
};

// Product of the listed variables; the empty set is the constant 1.
struct Monomial {
  std::vector<uint32_t> vars;

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend bool operator<(const Monomial& a, const Monomial& b) {
    if (a.vars.size() != b.vars.size()) return a.vars.size() < b.vars.size();
    return a.vars < b.vars;
  }
};

struct PolyOutput {
  std::vector<Monomial> monomials;  // canonically ordered, no duplicates
};

// Multi-output polynomial map over GF(2) with per-output degree at most d.
class PolyFunction {
 public:
  PolyFunction(uint32_t n, uint32_t m, uint32_t d, std::vector<PolyOutput> outputs);

  uint32_t n() const { return n_; }
  uint32_t m() const { return m_; }
  uint32_t degree() const { return d_; }
  const PolyOutput& output(size_t j) const { return outputs_[j]; }
  const std::vector<PolyOutput>& outputs() const { return outputs_; }
  // Largest per-output monomial count.
  uint32_t max_terms() const;

  GF2Vector eval(const GF2Vector& x) const;
  bool eval_output(size_t j, const GF2Vector& x) const;

 private:
  uint32_t n_, m_, d_;
  std::vector<PolyOutput> outputs_;
};

// Output assignment under construction: each position is 0, 1, or unset, and
// a set position is never overwritten.
class PartialAssignment {
 public:
  explicit PartialAssignment(size_t m) : v_(m, kUnset) {}

  size_t size() const { return v_.size(); }
  bool is_set(size_t i) const { return v_[i] != kUnset; }
  bool get(size_t i) const { return v_[i] == 1; }
  void set(size_t i, bool val);
  size_t assigned_count() const;

  // Full vector with unset positions filled by `fill`.
  GF2Vector to_vector(bool fill = false) const;

 private:
  static constexpr int8_t kUnset = -1;
  std::vector<int8_t> v_;
};

// Canonical form of a function of at most two inputs, split into the three
// shapes the dimension-reduction step distinguishes.
struct TwoLocalFunction {
  enum class Kind : uint8_t { kConstant, kAffine, kQuadratic };

  Kind kind = Kind::kConstant;
  // Watched input indices; j is -1 when fewer than two are read, i likewise.
  int32_t i = -1, j = -1;
  // kAffine:    a1*x_i + a2*x_j + c
  // kQuadratic: (x_i + a1)*(x_j + a2) + c
  bool a1 = false, a2 = false, c = false;

  bool eval(bool xi, bool xj) const;
};

// Unique ANF of a <=2-input truth table, folded into the three-case form.
TwoLocalFunction classify_two_local(const std::vector<uint8_t>& table,
                                    const std::vector<uint32_t>& indices);

// Every output reads exactly `arity` inputs afterwards; padding indices are
// the lowest-numbered inputs not already read, and evaluation is unchanged.
LocalCircuit pad_to_arity(const LocalCircuit& c, uint32_t arity);

// Substitutes fixed input bits into each truth table. Input numbering is
// unchanged; arities shrink by the number of fixed inputs read.
LocalCircuit restrict_inputs(const LocalCircuit& c,
                             const std::vector<std::pair<uint32_t, bool>>& fixing);

// Text formats. Writers emit the canonical form; parse(write(x)) == x.
LocalCircuit parse_nc0(const std::string& text);
std::string write_nc0(const LocalCircuit& c,
                      const std::vector<std::string>& header_comments = {});
PolyFunction parse_poly(const std::string& text);
std::string write_poly(const PolyFunction& p,
                       const std::vector<std::string>& header_comments = {});
GF2Vector parse_vec(const std::string& text);
std::string write_vec(const GF2Vector& v);

// Comment lines of the form "# key=value ..." carried by a generated file.
std::vector<std::string> scan_header_comments(const std::string& text);

// Seeded generators; deterministic functions of their arguments.
LocalCircuit gen_random_nc0(uint32_t n, uint32_t m, uint32_t k, uint64_t seed);
PolyFunction gen_random_poly(uint32_t n, uint32_t m, uint32_t d, uint64_t seed,
                             double include_prob = 0.5);

}  // namespace avoid
