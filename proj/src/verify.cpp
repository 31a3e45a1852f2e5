#include "avoid/verify.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <memory>
#include <sstream>
#include <thread>

#include "packed.hpp"

namespace avoid {

bool in_range(const LocalCircuit& c, const GF2Vector& y, uint64_t limit) {
  return detail::range_contains(detail::PackedFn::from(c), y, limit);
}

bool in_range(const PolyFunction& p, const GF2Vector& y, uint64_t limit) {
  return detail::range_contains(detail::PackedFn::from(p), y, limit);
}

struct RangeOracle::Impl {
  detail::PackedFn fn;
  uint64_t limit;
  bool bitmapped = false;
  std::vector<uint64_t> bitmap;
};

RangeOracle::RangeOracle(const LocalCircuit& c, uint64_t limit, uint32_t workers)
    : impl_(std::make_shared<Impl>(Impl{detail::PackedFn::from(c), limit, false, {}})) {
  build(workers);
}

RangeOracle::RangeOracle(const PolyFunction& p, uint64_t limit, uint32_t workers)
    : impl_(std::make_shared<Impl>(Impl{detail::PackedFn::from(p), limit, false, {}})) {
  build(workers);
}

void RangeOracle::build(uint32_t workers) {
  auto& im = *impl_;
  if (im.fn.n() > 63 || (uint64_t{1} << im.fn.n()) > im.limit)
    throw BudgetError("range oracle: enumeration of 2^" + std::to_string(im.fn.n()) +
                      " inputs exceeds the limit of " + std::to_string(im.limit));
  if (im.fn.m() > 30) return;  // stream per query instead

  const uint64_t space = uint64_t{1} << im.fn.m();
  const size_t words = (space + 63) / 64;
  const uint64_t inputs = uint64_t{1} << im.fn.n();
  auto shared = std::make_unique<std::atomic<uint64_t>[]>(words);
  for (size_t i = 0; i < words; ++i) shared[i].store(0, std::memory_order_relaxed);
  auto mark = [&](uint64_t lo, uint64_t hi) {
    for (uint64_t x = lo; x < hi; ++x) {
      const uint64_t v = im.fn.eval_msb(x);
      shared[v >> 6].fetch_or(uint64_t{1} << (v & 63), std::memory_order_relaxed);
    }
  };
  if (workers <= 1 || inputs < 4096) {
    mark(0, inputs);
  } else {
    std::vector<std::thread> pool;
    const uint64_t chunk = (inputs + workers - 1) / workers;
    for (uint32_t w = 0; w < workers; ++w) {
      const uint64_t lo = w * chunk, hi = std::min(inputs, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&mark, lo, hi] { mark(lo, hi); });
    }
    for (auto& th : pool) th.join();
  }
  im.bitmap.resize(words);
  for (size_t i = 0; i < words; ++i)
    im.bitmap[i] = shared[i].load(std::memory_order_relaxed);
  im.bitmapped = true;
}

bool RangeOracle::contains(const GF2Vector& y) const {
  const auto& im = *impl_;
  if (y.size() != im.fn.m())
    throw ParameterError("range oracle: point length must equal m");
  if (im.bitmapped) {
    const uint64_t v = detail::pack_msb(y);
    return (im.bitmap[v >> 6] >> (v & 63)) & 1;
  }
  return detail::range_contains(im.fn, y, im.limit);
}

bool check_avoid_solution(const LocalCircuit& c, const GF2Vector& y, uint64_t limit) {
  if (y.size() != c.m())
    throw ParameterError("check_avoid_solution: expected " + std::to_string(c.m()) +
                         " bits, got " + std::to_string(y.size()));
  return !in_range(c, y, limit);
}

bool check_avoid_solution(const PolyFunction& p, const GF2Vector& y, uint64_t limit) {
  if (y.size() != p.m())
    throw ParameterError("check_avoid_solution: expected " + std::to_string(p.m()) +
                         " bits, got " + std::to_string(y.size()));
  return !in_range(p, y, limit);
}

namespace {

using uint128 = unsigned __int128;

std::vector<uint64_t> matrix_rows(const GF2Matrix& m) {
  std::vector<uint64_t> rows(m.rows(), 0);
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j)
      if (m.get(i, j)) rows[i] |= uint64_t{1} << j;
  return rows;
}

uint32_t mask_rank(std::vector<uint64_t> rows) {
  uint32_t rank = 0;
  for (size_t c = 0; c < 64; ++c) {
    size_t pivot = rank;
    while (pivot < rows.size() && !((rows[pivot] >> c) & 1)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (size_t r = 0; r < rows.size(); ++r)
      if (r != rank && ((rows[r] >> c) & 1)) rows[r] ^= rows[rank];
    if (++rank == rows.size()) break;
  }
  return rank;
}

// Enumerates the reduced row-echelon matrices with j rows over n columns,
// rank j, as packed row masks. calls back for each; returns the count.
template <class Body>
uint64_t for_each_rref(uint32_t j, uint32_t n, bool count_only, Body body) {
  if (j == 0) {
    if (!count_only) body(std::vector<uint64_t>{});
    return 1;
  }
  uint64_t total = 0;
  std::vector<uint32_t> pivots(j);
  for (uint32_t i = 0; i < j; ++i) pivots[i] = i;
  for (;;) {
    // Free positions: (row, col) with col right of the row's pivot and not
    // itself a pivot column.
    std::vector<std::pair<uint32_t, uint32_t>> free;
    for (uint32_t row = 0; row < j; ++row)
      for (uint32_t col = pivots[row] + 1; col < n; ++col)
        if (!std::binary_search(pivots.begin(), pivots.end(), col))
          free.emplace_back(row, col);
    const uint64_t combos = uint64_t{1} << free.size();
    if (!count_only) {
      for (uint64_t bits = 0; bits < combos; ++bits) {
        std::vector<uint64_t> rows(j, 0);
        for (uint32_t row = 0; row < j; ++row) rows[row] = uint64_t{1} << pivots[row];
        for (size_t f = 0; f < free.size(); ++f)
          if ((bits >> f) & 1) rows[free[f].first] |= uint64_t{1} << free[f].second;
        body(rows);
      }
    }
    total += combos;
    int64_t i = j - 1;
    while (i >= 0 && pivots[i] == n - j + i) --i;
    if (i < 0) break;
    ++pivots[i];
    for (uint32_t t = i + 1; t < j; ++t) pivots[t] = pivots[t - 1] + 1;
  }
  return total;
}

GF2Matrix mask_rows_to_matrix(const std::vector<uint64_t>& rows, size_t n,
                              size_t pad_rows) {
  GF2Matrix m(std::max(rows.size(), pad_rows), n);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < n; ++j)
      if ((rows[i] >> j) & 1) m.set(i, j, true);
  return m;
}

}  // namespace

RigidityCertificate is_rigid(const GF2Matrix& m, uint32_t r, uint32_t s,
                             uint64_t budget) {
  const size_t n = m.rows();
  if (n == 0 || m.cols() != n)
    throw ParameterError("is_rigid: matrix must be square and non-empty");
  if (n > 63) throw ParameterError("is_rigid: supported up to 63 x 63");
  if (r > n) r = static_cast<uint32_t>(n);

  // Search size: sum over j <= r of #RREF(j, n) * 2^(n*j).
  uint128 work = 0;
  for (uint32_t j = 0; j <= r; ++j) {
    const uint64_t rrefs = for_each_rref(j, static_cast<uint32_t>(n), true,
                                         [](const std::vector<uint64_t>&) {});
    work += uint128{rrefs} << (n * j);
    if (work > uint128{budget})
      throw BudgetError("is_rigid: search needs more than " + std::to_string(budget) +
                        " (L, R) pairs; raise the budget");
  }

  const std::vector<uint64_t> mrows = matrix_rows(m);
  RigidityCertificate cert{m, r, s, RigidVerdict::kRigid, std::nullopt,
                           std::nullopt, std::nullopt};
  for (uint32_t j = 0; j <= r && cert.verdict == RigidVerdict::kRigid; ++j) {
    for_each_rref(j, static_cast<uint32_t>(n), false,
                  [&](const std::vector<uint64_t>& rrows) {
      if (cert.verdict == RigidVerdict::kNonRigid) return;
      // XOR of every subset of the RREF rows, indexed by coefficient bits.
      std::vector<uint64_t> combo(size_t{1} << j, 0);
      for (uint64_t bits = 1; bits < combo.size(); ++bits)
        combo[bits] = combo[bits & (bits - 1)] ^ rrows[std::countr_zero(bits)];
      const uint64_t lcount = uint64_t{1} << (n * j);
      const uint64_t lmask = (j == 0) ? 0 : ((uint64_t{1} << j) - 1);
      for (uint64_t lbits = 0; lbits < lcount; ++lbits) {
        bool ok = true;
        for (size_t row = 0; row < n; ++row) {
          const uint64_t srow = mrows[row] ^ combo[(lbits >> (row * j)) & lmask];
          if (std::popcount(srow) > int(s)) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        // Found m = L*R + S within budgets; pad L and R up to rank r.
        GF2Matrix lmat(n, std::max<uint32_t>(r, 1));
        for (size_t row = 0; row < n; ++row)
          for (uint32_t t = 0; t < j; ++t)
            if ((lbits >> (row * j + t)) & 1) lmat.set(row, t, true);
        GF2Matrix rmat = mask_rows_to_matrix(rrows, n, std::max<uint32_t>(r, 1));
        GF2Matrix smat(n, n);
        for (size_t row = 0; row < n; ++row) {
          const uint64_t srow = mrows[row] ^ combo[(lbits >> (row * j)) & lmask];
          for (size_t col = 0; col < n; ++col)
            if ((srow >> col) & 1) smat.set(row, col, true);
        }
        cert.verdict = RigidVerdict::kNonRigid;
        cert.l = std::move(lmat);
        cert.r = std::move(rmat);
        cert.s = std::move(smat);
        return;
      }
    });
  }
  return cert;
}

RigidityCertificate is_rigid_dual(const GF2Matrix& m, uint32_t r, uint32_t s,
                                  uint64_t budget) {
  const size_t n = m.rows();
  if (n == 0 || m.cols() != n)
    throw ParameterError("is_rigid_dual: matrix must be square and non-empty");
  if (n > 63) throw ParameterError("is_rigid_dual: supported up to 63 x 63");

  // Row choices: every mask of weight <= s, ascending.
  std::vector<uint64_t> choices;
  for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask)
    if (std::popcount(mask) <= int(s)) choices.push_back(mask);
  uint128 work = 1;
  for (size_t i = 0; i < n; ++i) {
    work *= choices.size();
    if (work > uint128{budget})
      throw BudgetError("is_rigid_dual: search needs more than " +
                        std::to_string(budget) + " sparse matrices");
  }

  const std::vector<uint64_t> mrows = matrix_rows(m);
  std::vector<size_t> pick(n, 0);
  RigidityCertificate cert{m, r, s, RigidVerdict::kRigid, std::nullopt,
                           std::nullopt, std::nullopt};
  for (;;) {
    std::vector<uint64_t> qrows(n);
    for (size_t i = 0; i < n; ++i) qrows[i] = mrows[i] ^ choices[pick[i]];
    if (mask_rank(qrows) <= r) {
      // Q = m + S has rank <= r; factor through its row space.
      std::vector<uint64_t> basis;
      std::vector<uint32_t> pivcols;
      for (size_t i = 0; i < n; ++i) {
        uint64_t row = qrows[i];
        for (size_t b = 0; b < basis.size(); ++b)
          if ((row >> pivcols[b]) & 1) row ^= basis[b];
        if (row) {
          const uint32_t piv = std::countr_zero(row);
          // reduce existing basis rows by the new one
          for (size_t b = 0; b < basis.size(); ++b)
            if ((basis[b] >> piv) & 1) basis[b] ^= row;
          basis.push_back(row);
          pivcols.push_back(piv);
        }
      }
      // Sort basis rows by pivot so R is in echelon form.
      std::vector<size_t> order(basis.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](size_t a, size_t b) { return pivcols[a] < pivcols[b]; });
      const uint32_t width = std::max<uint32_t>(r, 1);
      GF2Matrix rmat(width, n);
      for (size_t t = 0; t < order.size(); ++t)
        for (size_t col = 0; col < n; ++col)
          if ((basis[order[t]] >> col) & 1) rmat.set(t, col, true);
      GF2Matrix lmat(n, width);
      for (size_t i = 0; i < n; ++i)
        for (size_t t = 0; t < order.size(); ++t)
          if ((qrows[i] >> pivcols[order[t]]) & 1) lmat.set(i, t, true);
      GF2Matrix smat(n, n);
      for (size_t i = 0; i < n; ++i)
        for (size_t col = 0; col < n; ++col)
          if ((choices[pick[i]] >> col) & 1) smat.set(i, col, true);
      cert.verdict = RigidVerdict::kNonRigid;
      cert.l = std::move(lmat);
      cert.r = std::move(rmat);
      cert.s = std::move(smat);
      return cert;
    }
    size_t i = 0;
    while (i < n && ++pick[i] == choices.size()) pick[i++] = 0;
    if (i == n) break;
  }
  return cert;
}

std::string write_certificate(const RigidityCertificate& cert) {
  std::ostringstream out;
  out << "# rigidity n=" << cert.m.rows() << " r=" << cert.rank_budget
      << " s=" << cert.sparsity_budget << "\n";
  out << "verdict " << (cert.verdict == RigidVerdict::kRigid ? "rigid" : "nonrigid")
      << "\n";
  if (cert.verdict == RigidVerdict::kNonRigid) {
    out << "L\n" << cert.l->to_string();
    out << "R\n" << cert.r->to_string();
    out << "S\n" << cert.s->to_string();
  }
  return out.str();
}

RigidPipelineResult rigid_pipeline(uint32_t n, uint32_t r, uint32_t s,
                                   PipelineStrategy strategy, uint64_t enum_limit,
                                   uint64_t rigid_budget,
                                   const SubspaceUnionOptions& options) {
  RigidInstance ri = build_rigid_instance(n, r, s);
  SolveStats stats;
  GF2Vector point(0);

  switch (strategy) {
    case PipelineStrategy::kBrute: {
      // The instance may lack stretch; scan its range directly and fail
      // honestly when nothing is avoided.
      if (ri.g.n() > 63 || (uint64_t{1} << ri.g.n()) > enum_limit)
        throw StretchError(
            "rigid instance has " + std::to_string(ri.g.n()) + " inputs and " +
            std::to_string(ri.g.m()) +
            " outputs; no stretch and direct enumeration exceeds the limit");
      auto found = brute_force_scan(ri.g, enum_limit, options.workers);
      if (!found)
        throw StretchError(
            "the degree-2 instance covers every output value at n=" +
            std::to_string(n) + ", r=" + std::to_string(r) + ", s=" +
            std::to_string(s) + "; every matrix decomposes within these budgets");
      point = std::move(*found);
      break;
    }
    case PipelineStrategy::kSubspaceUnion:
      point = solve_degree2(ri.g, Degree2Strategy::kSubspaceUnion, enum_limit,
                            options, &stats);
      break;
    case PipelineStrategy::kOneSubspace:
      point = solve_degree2(ri.g, Degree2Strategy::kOneSubspace, enum_limit,
                            options, &stats);
      break;
  }

  GF2Matrix matrix(n, n);
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < n; ++j)
      matrix.set(i, j, point.get(uint64_t{i} * n + j));

  RigidityCertificate cert = is_rigid(matrix, r, s, rigid_budget);
  if (cert.verdict != RigidVerdict::kRigid)
    throw Error(
        "rigid pipeline failure: the avoided point decodes to a non-rigid "
        "matrix; the solver or the instance builder is broken");
  return RigidPipelineResult{std::move(matrix), std::move(cert), stats, ri.g.n(),
                             ri.g.m()};
}

}  // namespace avoid
