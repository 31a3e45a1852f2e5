#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "avoid/errors.hpp"

namespace avoid {

// Bit-packed vector over GF(2). Coordinate 0 is the first character of the
// text form. Bits beyond size() are kept zero in the packed words.
class GF2Vector {
 public:
  GF2Vector() = default;
  explicit GF2Vector(size_t len) : len_(len), words_((len + 63) / 64, 0) {}

  static GF2Vector from_string(std::string_view text);
  static GF2Vector from_words(size_t len, std::span<const uint64_t> words);

  size_t size() const { return len_; }

  bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  void set(size_t i, bool v) {
    const uint64_t bit = uint64_t{1} << (i & 63);
    if (v)
      words_[i >> 6] |= bit;
    else
      words_[i >> 6] &= ~bit;
  }

  void flip(size_t i) { words_[i >> 6] ^= uint64_t{1} << (i & 63); }

  bool dot(const GF2Vector& o) const;  // inner product mod 2
  void xor_with(const GF2Vector& o);
  size_t weight() const;
  bool is_zero() const;
  // Index of the first set bit, or size() when zero.
  size_t first_set() const;

  std::span<const uint64_t> words() const { return words_; }

  std::string to_string() const;

  friend bool operator==(const GF2Vector&, const GF2Vector&) = default;

 private:
  size_t len_ = 0;
  std::vector<uint64_t> words_;
};

// Row-major bit-packed matrix over GF(2).
class GF2Matrix {
 public:
  GF2Matrix() = default;
  GF2Matrix(size_t rows, size_t cols)
      : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), w_(rows * wpr_, 0) {}

  static GF2Matrix identity(size_t n);
  static GF2Matrix from_strings(std::initializer_list<std::string_view> rows);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  bool get(size_t r, size_t c) const {
    return (w_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1;
  }
  void set(size_t r, size_t c, bool v) {
    const uint64_t bit = uint64_t{1} << (c & 63);
    if (v)
      w_[r * wpr_ + (c >> 6)] |= bit;
    else
      w_[r * wpr_ + (c >> 6)] &= ~bit;
  }

  GF2Vector row(size_t r) const;
  void set_row(size_t r, const GF2Vector& v);
  size_t row_weight(size_t r) const;
  bool row_is_zero(size_t r) const;
  // row[dst] ^= row[src]
  void xor_rows(size_t dst, size_t src);
  void swap_rows(size_t a, size_t b);
  bool dot_row(size_t r, const GF2Vector& x) const;

  GF2Matrix transposed() const;
  GF2Matrix multiplied(const GF2Matrix& rhs) const;
  GF2Matrix added(const GF2Matrix& rhs) const;
  GF2Vector apply(const GF2Vector& x) const;  // A * x

  std::string to_string() const;

  friend bool operator==(const GF2Matrix&, const GF2Matrix&) = default;

 private:
  size_t rows_ = 0, cols_ = 0, wpr_ = 0;
  std::vector<uint64_t> w_;

  std::span<uint64_t> row_span(size_t r) { return {w_.data() + r * wpr_, wpr_}; }
  std::span<const uint64_t> row_span(size_t r) const {
    return {w_.data() + r * wpr_, wpr_};
  }
};

// GF(2) row rank by Gaussian elimination.
size_t rank(const GF2Matrix& m);

// Solution set of a linear system A*x = b over GF(2), kept in reduced
// row-echelon form so that equality, dimension, and emptiness are immediate.
// The empty subspace is a distinguished value, never an error.
class AffineSubspace {
 public:
  static AffineSubspace full(size_t ambient_dim);
  static AffineSubspace empty_space(size_t ambient_dim);
  static AffineSubspace from_constraints(const GF2Matrix& a, const GF2Vector& b);

  size_t ambient_dim() const { return n_; }
  bool is_empty() const { return empty_; }

  // Dimension of a non-empty subspace; calling this on the empty subspace is
  // a logic error.
  size_t dimension() const;

  // 2^dimension, or 0 when empty. Dimensions of 64 and above overflow.
  uint64_t size() const;

  AffineSubspace intersect_hyperplane(const GF2Vector& normal, bool rhs_bit) const;
  AffineSubspace intersect(const AffineSubspace& other) const;

  bool contains(const GF2Vector& x) const;
  // True when the constraint normal.x = rhs_bit holds on every point.
  bool implies(const GF2Vector& normal, bool rhs_bit) const;
  bool subset_of(const AffineSubspace& other) const;

  // All points, free variables counted up in lexicographic index order.
  std::vector<GF2Vector> enumerate_points(uint64_t limit) const;

  const GF2Matrix& constraints() const { return a_; }
  const GF2Vector& rhs() const { return b_; }

  friend bool operator==(const AffineSubspace& x, const AffineSubspace& y) {
    return x.n_ == y.n_ && x.empty_ == y.empty_ && x.a_ == y.a_ && x.b_ == y.b_;
  }

 private:
  AffineSubspace(size_t n, GF2Matrix a, GF2Vector b)
      : n_(n), a_(std::move(a)), b_(std::move(b)) {}

  void canonicalize();
  void mark_empty();

  size_t n_ = 0;
  bool empty_ = false;
  GF2Matrix a_;                   // canonical RREF; rows == rank
  GF2Vector b_;
  std::vector<uint32_t> pivots_;  // pivot column per row, ascending
};

}  // namespace avoid
