#include "avoid/gf2.hpp"

#include <algorithm>
#include <bit>

namespace avoid {

namespace {

void check_same_length(size_t a, size_t b, const char* what) {
  if (a != b) {
    throw ParameterError(std::string(what) + ": length mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

GF2Vector GF2Vector::from_string(std::string_view text) {
  GF2Vector v(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1')
      v.set(i, true);
    else if (text[i] != '0')
      throw ParameterError("GF2Vector: expected only 0/1 characters");
  }
  return v;
}

GF2Vector GF2Vector::from_words(size_t len, std::span<const uint64_t> words) {
  GF2Vector v(len);
  if (words.size() != v.words_.size())
    throw ParameterError("from_words: word count mismatch");
  std::copy(words.begin(), words.end(), v.words_.begin());
  if (len & 63 && !v.words_.empty())
    v.words_.back() &= (uint64_t{1} << (len & 63)) - 1;
  return v;
}

bool GF2Vector::dot(const GF2Vector& o) const {
  check_same_length(len_, o.len_, "dot");
  uint64_t acc = 0;
  for (size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & o.words_[i];
  return std::popcount(acc) & 1;
}

void GF2Vector::xor_with(const GF2Vector& o) {
  check_same_length(len_, o.len_, "xor_with");
  for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
}

size_t GF2Vector::weight() const {
  size_t w = 0;
  for (uint64_t x : words_) w += std::popcount(x);
  return w;
}

bool GF2Vector::is_zero() const {
  for (uint64_t x : words_)
    if (x) return false;
  return true;
}

size_t GF2Vector::first_set() const {
  for (size_t i = 0; i < words_.size(); ++i)
    if (words_[i]) return i * 64 + std::countr_zero(words_[i]);
  return len_;
}

std::string GF2Vector::to_string() const {
  std::string s(len_, '0');
  for (size_t i = 0; i < len_; ++i)
    if (get(i)) s[i] = '1';
  return s;
}

GF2Matrix GF2Matrix::identity(size_t n) {
  GF2Matrix m(n, n);
  for (size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

GF2Matrix GF2Matrix::from_strings(std::initializer_list<std::string_view> rows) {
  const size_t r = rows.size();
  const size_t c = r ? rows.begin()->size() : 0;
  GF2Matrix m(r, c);
  size_t i = 0;
  for (std::string_view s : rows) {
    if (s.size() != c) throw ParameterError("GF2Matrix: ragged rows");
    m.set_row(i++, GF2Vector::from_string(s));
  }
  return m;
}

GF2Vector GF2Matrix::row(size_t r) const {
  return GF2Vector::from_words(cols_, row_span(r));
}

void GF2Matrix::set_row(size_t r, const GF2Vector& v) {
  check_same_length(v.size(), cols_, "set_row");
  auto src = v.words();
  std::copy(src.begin(), src.end(), w_.data() + r * wpr_);
}

size_t GF2Matrix::row_weight(size_t r) const {
  size_t w = 0;
  for (uint64_t x : row_span(r)) w += std::popcount(x);
  return w;
}

bool GF2Matrix::row_is_zero(size_t r) const {
  for (uint64_t x : row_span(r))
    if (x) return false;
  return true;
}

void GF2Matrix::xor_rows(size_t dst, size_t src) {
  uint64_t* d = w_.data() + dst * wpr_;
  const uint64_t* s = w_.data() + src * wpr_;
  for (size_t i = 0; i < wpr_; ++i) d[i] ^= s[i];
}

void GF2Matrix::swap_rows(size_t a, size_t b) {
  if (a == b) return;
  uint64_t* pa = w_.data() + a * wpr_;
  uint64_t* pb = w_.data() + b * wpr_;
  for (size_t i = 0; i < wpr_; ++i) std::swap(pa[i], pb[i]);
}

bool GF2Matrix::dot_row(size_t r, const GF2Vector& x) const {
  check_same_length(x.size(), cols_, "dot_row");
  auto rw = row_span(r);
  auto xw = x.words();
  uint64_t acc = 0;
  for (size_t i = 0; i < wpr_; ++i) acc ^= rw[i] & xw[i];
  return std::popcount(acc) & 1;
}

GF2Matrix GF2Matrix::transposed() const {
  GF2Matrix t(cols_, rows_);
  for (size_t r = 0; r < rows_; ++r)
    for (size_t c = 0; c < cols_; ++c)
      if (get(r, c)) t.set(c, r, true);
  return t;
}

GF2Matrix GF2Matrix::multiplied(const GF2Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw ParameterError("multiplied: shape mismatch");
  GF2Matrix out(rows_, rhs.cols_);
  for (size_t r = 0; r < rows_; ++r) {
    for (size_t t = 0; t < cols_; ++t) {
      if (!get(r, t)) continue;
      uint64_t* d = out.w_.data() + r * out.wpr_;
      const uint64_t* s = rhs.w_.data() + t * rhs.wpr_;
      for (size_t i = 0; i < rhs.wpr_; ++i) d[i] ^= s[i];
    }
  }
  return out;
}

GF2Matrix GF2Matrix::added(const GF2Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw ParameterError("added: shape mismatch");
  GF2Matrix out = *this;
  for (size_t i = 0; i < w_.size(); ++i) out.w_[i] ^= rhs.w_[i];
  return out;
}

GF2Vector GF2Matrix::apply(const GF2Vector& x) const {
  check_same_length(x.size(), cols_, "apply");
  GF2Vector y(rows_);
  for (size_t r = 0; r < rows_; ++r) y.set(r, dot_row(r, x));
  return y;
}

std::string GF2Matrix::to_string() const {
  std::string s;
  for (size_t r = 0; r < rows_; ++r) {
    s += row(r).to_string();
    s += '\n';
  }
  return s;
}

size_t rank(const GF2Matrix& m) {
  GF2Matrix w = m;
  size_t r = 0;
  for (size_t c = 0; c < w.cols() && r < w.rows(); ++c) {
    size_t pivot = r;
    while (pivot < w.rows() && !w.get(pivot, c)) ++pivot;
    if (pivot == w.rows()) continue;
    w.swap_rows(r, pivot);
    for (size_t rr = pivot + 1; rr < w.rows(); ++rr)
      if (w.get(rr, c)) w.xor_rows(rr, r);
    ++r;
  }
  return r;
}

AffineSubspace AffineSubspace::full(size_t ambient_dim) {
  return AffineSubspace(ambient_dim, GF2Matrix(0, ambient_dim), GF2Vector(0));
}

AffineSubspace AffineSubspace::empty_space(size_t ambient_dim) {
  AffineSubspace s = full(ambient_dim);
  s.mark_empty();
  return s;
}

AffineSubspace AffineSubspace::from_constraints(const GF2Matrix& a,
                                                const GF2Vector& b) {
  if (b.size() != a.rows())
    throw ParameterError("from_constraints: rhs length must match constraint count");
  AffineSubspace s(a.cols(), a, b);
  s.canonicalize();
  return s;
}

void AffineSubspace::mark_empty() {
  empty_ = true;
  a_ = GF2Matrix(0, n_);
  b_ = GF2Vector(0);
  pivots_.clear();
}

void AffineSubspace::canonicalize() {
  const size_t rows = a_.rows();
  size_t r = 0;
  pivots_.clear();
  for (size_t c = 0; c < n_ && r < rows; ++c) {
    size_t pivot = r;
    while (pivot < rows && !a_.get(pivot, c)) ++pivot;
    if (pivot == rows) continue;
    a_.swap_rows(r, pivot);
    {
      const bool br = b_.get(r), bp = b_.get(pivot);
      b_.set(r, bp);
      b_.set(pivot, br);
    }
    for (size_t rr = 0; rr < rows; ++rr) {
      if (rr != r && a_.get(rr, c)) {
        a_.xor_rows(rr, r);
        b_.set(rr, b_.get(rr) ^ b_.get(r));
      }
    }
    pivots_.push_back(static_cast<uint32_t>(c));
    ++r;
  }
  // Rows past r have zero coefficients; any with rhs 1 witness inconsistency.
  for (size_t rr = r; rr < rows; ++rr) {
    if (b_.get(rr)) {
      mark_empty();
      return;
    }
  }
  GF2Matrix na(r, n_);
  GF2Vector nb(r);
  for (size_t i = 0; i < r; ++i) {
    na.set_row(i, a_.row(i));
    nb.set(i, b_.get(i));
  }
  a_ = std::move(na);
  b_ = std::move(nb);
}

size_t AffineSubspace::dimension() const {
  if (empty_) throw Error("dimension() called on the empty subspace");
  return n_ - a_.rows();
}

uint64_t AffineSubspace::size() const {
  if (empty_) return 0;
  const size_t d = dimension();
  if (d >= 64) throw Error("size(): dimension too large for a 64-bit count");
  return uint64_t{1} << d;
}

AffineSubspace AffineSubspace::intersect_hyperplane(const GF2Vector& normal,
                                                    bool rhs_bit) const {
  if (normal.size() != n_)
    throw ParameterError("intersect_hyperplane: normal length must equal ambient dim");
  if (empty_) return *this;

  GF2Vector row = normal;
  bool bit = rhs_bit;
  for (size_t i = 0; i < pivots_.size(); ++i) {
    if (row.get(pivots_[i])) {
      row.xor_with(a_.row(i));
      bit ^= b_.get(i);
    }
  }
  if (row.is_zero()) return bit ? empty_space(n_) : *this;

  const size_t q = row.first_set();
  const size_t pos =
      std::lower_bound(pivots_.begin(), pivots_.end(), q) - pivots_.begin();
  const size_t rows = a_.rows();

  AffineSubspace out(n_, GF2Matrix(rows + 1, n_), GF2Vector(rows + 1));
  out.pivots_.reserve(rows + 1);
  for (size_t i = 0; i < pos; ++i) {
    out.a_.set_row(i, a_.row(i));
    out.b_.set(i, b_.get(i));
    out.pivots_.push_back(pivots_[i]);
  }
  out.a_.set_row(pos, row);
  out.b_.set(pos, bit);
  out.pivots_.push_back(static_cast<uint32_t>(q));
  for (size_t i = pos; i < rows; ++i) {
    out.a_.set_row(i + 1, a_.row(i));
    out.b_.set(i + 1, b_.get(i));
    out.pivots_.push_back(pivots_[i]);
  }
  // Clear column q from every other row to restore the Jordan form.
  for (size_t i = 0; i <= rows; ++i) {
    if (i != pos && out.a_.get(i, q)) {
      out.a_.xor_rows(i, pos);
      out.b_.set(i, out.b_.get(i) ^ bit);
    }
  }
  return out;
}

AffineSubspace AffineSubspace::intersect(const AffineSubspace& other) const {
  if (other.n_ != n_) throw ParameterError("intersect: ambient dim mismatch");
  if (other.empty_) return other;
  AffineSubspace out = *this;
  for (size_t i = 0; i < other.a_.rows() && !out.empty_; ++i)
    out = out.intersect_hyperplane(other.a_.row(i), other.b_.get(i));
  return out;
}

bool AffineSubspace::contains(const GF2Vector& x) const {
  if (x.size() != n_) throw ParameterError("contains: point length must equal ambient dim");
  if (empty_) return false;
  for (size_t i = 0; i < a_.rows(); ++i)
    if (a_.dot_row(i, x) != b_.get(i)) return false;
  return true;
}

bool AffineSubspace::implies(const GF2Vector& normal, bool rhs_bit) const {
  if (normal.size() != n_) throw ParameterError("implies: normal length must equal ambient dim");
  if (empty_) return true;
  GF2Vector row = normal;
  bool bit = rhs_bit;
  for (size_t i = 0; i < pivots_.size(); ++i) {
    if (row.get(pivots_[i])) {
      row.xor_with(a_.row(i));
      bit ^= b_.get(i);
    }
  }
  return row.is_zero() && !bit;
}

bool AffineSubspace::subset_of(const AffineSubspace& other) const {
  if (other.n_ != n_) throw ParameterError("subset_of: ambient dim mismatch");
  if (empty_) return true;
  if (other.empty_) return false;
  for (size_t i = 0; i < other.a_.rows(); ++i)
    if (!implies(other.a_.row(i), other.b_.get(i))) return false;
  return true;
}

std::vector<GF2Vector> AffineSubspace::enumerate_points(uint64_t limit) const {
  if (empty_) return {};
  const size_t d = dimension();
  if (d >= 64 || (uint64_t{1} << d) > limit)
    throw BudgetError("enumerate_points: 2^" + std::to_string(d) +
                      " points exceed the limit of " + std::to_string(limit));

  std::vector<uint32_t> free_cols;
  free_cols.reserve(d);
  {
    size_t pi = 0;
    for (size_t c = 0; c < n_; ++c) {
      if (pi < pivots_.size() && pivots_[pi] == c)
        ++pi;
      else
        free_cols.push_back(static_cast<uint32_t>(c));
    }
  }

  std::vector<GF2Vector> points;
  points.reserve(uint64_t{1} << d);
  for (uint64_t cnt = 0; cnt < (uint64_t{1} << d); ++cnt) {
    GF2Vector x(n_);
    for (size_t i = 0; i < free_cols.size(); ++i)
      if ((cnt >> i) & 1) x.set(free_cols[i], true);
    for (size_t i = 0; i < pivots_.size(); ++i) {
      // Row i reads only its pivot and free columns, so the dot picks up
      // exactly the free-variable contribution.
      x.set(pivots_[i], b_.get(i) ^ a_.dot_row(i, x));
    }
    points.push_back(std::move(x));
  }
  return points;
}

}  // namespace avoid
