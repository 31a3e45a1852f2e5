#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "avoid/circuit.hpp"
#include "avoid/gf2.hpp"

namespace avoid {

// Offsets of one source output's material inside the encoded circuit:
// its 2k-output block and its private r- and s-input blocks.
struct EncodedBlockLayout {
  uint64_t out_off;
  uint64_t r_off;
  uint64_t s_off;
};

// Shape header that lets decode run standalone, without the source function.
struct EncodingLayout {
  uint32_t n = 0, m = 0;
  uint32_t terms = 0;   // per-output monomial count after padding
  uint32_t degree = 0;
  uint64_t nhat = 0, mhat = 0;
  std::vector<EncodedBlockLayout> blocks;
};

// Low-locality encoding of a degree-d polynomial map. Inputs of fhat are
// (x, r^(0..m-1), s^(0..m-1)); outputs are one 2k block per source output.
struct EncodedCircuit {
  LocalCircuit fhat;
  PolyFunction source;
  uint32_t terms;
  std::vector<EncodedBlockLayout> blocks;
  uint64_t nhat, mhat;

  EncodingLayout layout() const;
};

// Builds fhat with n + (2k-1)m inputs and 2km outputs, k the largest
// per-output monomial count; shorter outputs are padded with zero terms so
// every block has the same stride. Each output of fhat reads at most
// degree+1 inputs (for degree >= 2).
EncodedCircuit encode_degree_d(const PolyFunction& p);

// Output i is the parity of block i.
GF2Vector decode(const EncodedCircuit& e, const GF2Vector& yhat);
GF2Vector decode_with_layout(const EncodingLayout& layout, const GF2Vector& yhat);

// Completion (r, s) with fhat(x, r, s) = yhat; requires decode(yhat) = P(x).
std::pair<GF2Vector, GF2Vector> encoding_witness(const EncodedCircuit& e,
                                                 const GF2Vector& x,
                                                 const GF2Vector& yhat);

// Concatenates (x, r, s) in fhat's input order.
GF2Vector assemble_encoded_input(const EncodedCircuit& e, const GF2Vector& x,
                                 const GF2Vector& r, const GF2Vector& s);

std::string write_layout(const EncodingLayout& layout);
EncodingLayout parse_layout(const std::string& text);

// Degree-d map on s*ell inputs whose range contains every vector of weight
// at most s: vertex labels in F2^s, output i the generalized inner product
// over edge i. Input (row t, vertex v) sits at index t*ell + v.
struct HypergraphEncoder {
  uint32_t n, s, d;
  uint32_t ell;
  std::vector<std::vector<uint32_t>> edges;  // n sorted d-subsets of [ell]
  PolyFunction f;
  bool within_sparsity_bound;  // s*d < n^(1-1/d), checked exactly
};

HypergraphEncoder build_sparse_encoder(uint32_t n, uint32_t s, uint32_t d);

// Labeling X with f(X) = y, defined for weight(y) <= s.
GF2Vector sparse_witness(const HypergraphEncoder& h, const GF2Vector& y);

// Degree-2 map whose range contains every matrix L*R + S with rank(L*R) <= r
// and row weight of S at most s. Inputs: L (n x r, row-major), R (r x n,
// row-major), then one sparse-encoder block per row of S.
struct RigidInstance {
  uint32_t n, r, s;
  HypergraphEncoder row_encoder;  // shared shape for every row block
  PolyFunction g;
  uint64_t l_off, r_off, enc_off;
  uint32_t enc_inputs;  // per-row block width
  bool within_sparsity_bound;
};

RigidInstance build_rigid_instance(uint32_t n, uint32_t r, uint32_t s);

// Input vector with g(input) = L*R + S, entry-wise.
GF2Vector rigid_witness(const RigidInstance& ri, const GF2Matrix& l,
                        const GF2Matrix& r, const GF2Matrix& s);

}  // namespace avoid
