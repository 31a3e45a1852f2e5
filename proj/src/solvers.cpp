#include "avoid/solvers.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include "packed.hpp"

namespace avoid {

namespace {

using uint128 = unsigned __int128;

uint128 ipow128(uint64_t base, uint32_t exp) {
  uint128 acc = 1;
  for (uint32_t i = 0; i < exp; ++i) {
    acc *= base;
    if (acc > (uint128{1} << 126)) throw ParameterError("parameter power overflow");
  }
  return acc;
}

uint128 size128(const AffineSubspace& s) {
  if (s.is_empty()) return 0;
  return uint128{1} << s.dimension();
}

std::string u128_str(uint128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v) {
    s += char('0' + int(v % 10));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

// Side with fewer points; ties prefer bit 0.
bool pick_smaller(const AffineSubspace& s0, const AffineSubspace& s1) {
  if (s0.is_empty()) return false;
  if (s1.is_empty()) return true;
  return s1.dimension() < s0.dimension();
}

GF2Vector scan_to_vector(std::optional<uint64_t> mex, uint32_t m) {
  if (!mex) throw Error("internal: range scan found no avoided point despite m > n");
  return detail::unpack_msb(*mex, m);
}

// Truth table of one output after fixing a subset of its read inputs.
// fixed_pos/free_pos index into the output's sorted input list; pat bit t is
// the value of the t-th fixed input.
std::vector<uint8_t> restrict_table(const CircuitOutput& out,
                                    const std::vector<uint32_t>& fixed_pos,
                                    const std::vector<uint32_t>& free_pos,
                                    uint64_t pat) {
  std::vector<uint8_t> table(size_t{1} << free_pos.size());
  size_t fixed_bits = 0;
  for (size_t t = 0; t < fixed_pos.size(); ++t)
    fixed_bits |= ((pat >> t) & 1) << fixed_pos[t];
  for (size_t q = 0; q < table.size(); ++q) {
    size_t p = fixed_bits;
    for (size_t u = 0; u < free_pos.size(); ++u) p |= ((q >> u) & 1) << free_pos[u];
    table[q] = out.table[p];
  }
  return table;
}

}  // namespace

std::optional<GF2Vector> brute_force_scan(const LocalCircuit& c, uint64_t limit,
                                          uint32_t workers) {
  auto fn = detail::PackedFn::from(c);
  auto mex = detail::range_mex(fn, limit, workers);
  if (!mex) return std::nullopt;
  return detail::unpack_msb(*mex, c.m());
}

std::optional<GF2Vector> brute_force_scan(const PolyFunction& p, uint64_t limit,
                                          uint32_t workers) {
  auto fn = detail::PackedFn::from(p);
  auto mex = detail::range_mex(fn, limit, workers);
  if (!mex) return std::nullopt;
  return detail::unpack_msb(*mex, p.m());
}

GF2Vector brute_force_avoid(const LocalCircuit& c, uint64_t limit, uint32_t workers) {
  if (c.m() <= c.n())
    throw StretchError("brute force requires stretch m > n (m=" +
                       std::to_string(c.m()) + ", n=" + std::to_string(c.n()) + ")");
  auto fn = detail::PackedFn::from(c);
  return scan_to_vector(detail::range_mex(fn, limit, workers), c.m());
}

GF2Vector brute_force_avoid(const PolyFunction& p, uint64_t limit, uint32_t workers) {
  if (p.m() <= p.n())
    throw StretchError("brute force requires stretch m > n (m=" +
                       std::to_string(p.m()) + ", n=" + std::to_string(p.n()) + ")");
  auto fn = detail::PackedFn::from(p);
  return scan_to_vector(detail::range_mex(fn, limit, workers), p.m());
}

std::pair<AffineSubspace, AffineSubspace> affine_reduce(const AffineSubspace& s,
                                                        const TwoLocalFunction& f) {
  const size_t n = s.ambient_dim();
  if ((f.i >= 0 && size_t(f.i) >= n) || (f.j >= 0 && size_t(f.j) >= n))
    throw ParameterError("affine_reduce: watched index outside the ambient space");
  const AffineSubspace none = AffineSubspace::empty_space(n);
  if (s.is_empty()) return {none, none};

  switch (f.kind) {
    case TwoLocalFunction::Kind::kConstant:
      return f.c ? std::make_pair(none, s) : std::make_pair(s, none);

    case TwoLocalFunction::Kind::kAffine: {
      GF2Vector normal(n);
      if (f.i >= 0 && f.a1) normal.set(f.i, true);
      if (f.j >= 0 && f.a2) normal.set(f.j, true);
      // a1 x_i + a2 x_j + c = b  <=>  a.x = b + c
      return {s.intersect_hyperplane(normal, f.c),
              s.intersect_hyperplane(normal, !f.c)};
    }

    case TwoLocalFunction::Kind::kQuadratic: {
      // f(x) = 1-c exactly on the corner x_i = 1+a1, x_j = 1+a2.
      GF2Vector ei(n), ej(n);
      ei.set(f.i, true);
      ej.set(f.j, true);
      AffineSubspace hit =
          s.intersect_hyperplane(ei, !f.a1).intersect_hyperplane(ej, !f.a2);
      const bool shrunk = hit.is_empty() || hit.dimension() < s.dimension();
      // When the corner contains all of s, every point maps to 1-c.
      AffineSubspace other = shrunk ? s : none;
      return f.c ? std::make_pair(std::move(hit), std::move(other))
                 : std::make_pair(std::move(other), std::move(hit));
    }
  }
  throw Error("internal: unhandled classification");
}

GF2Vector solve_nc02(const LocalCircuit& c, SolveStats* stats) {
  if (c.m() <= c.n())
    throw StretchError("nc02 solver requires stretch m >= n+1 (m=" +
                       std::to_string(c.m()) + ", n=" + std::to_string(c.n()) + ")");
  if (c.max_arity() > 2)
    throw StretchError(
        "nc02 solver requires locality <= 2, instance has an output reading " +
        std::to_string(c.max_arity()) + " inputs");

  AffineSubspace as = AffineSubspace::full(c.n());
  PartialAssignment y(c.m());
  uint32_t iters = 0;
  for (uint32_t j = 0; j < c.m() && !as.is_empty(); ++j) {
    const auto& out = c.output(j);
    auto [s0, s1] = affine_reduce(as, classify_two_local(out.table, out.inputs));
    const bool b = pick_smaller(s0, s1);
    y.set(j, b);
    as = b ? std::move(s1) : std::move(s0);
    ++iters;
  }
  if (!as.is_empty())
    throw Error("internal: consistent set never emptied despite m > n");
  if (stats) {
    *stats = {};
    stats->iterations = iters;
  }
  return y.to_vector(false);
}

DenseSelection select_dense_sets(const LocalCircuit& c, uint32_t cparam) {
  const uint32_t n = c.n();
  const uint32_t k = c.k();
  const uint64_t m = c.m();
  if (cparam < 1) throw ParameterError("select_dense_sets: c must be >= 1");
  if (k < 2) throw ParameterError("select_dense_sets: locality must be >= 2");
  for (size_t j = 0; j < c.m(); ++j)
    if (c.output(j).inputs.size() != k)
      throw ParameterError("select_dense_sets: output " + std::to_string(j) +
                           " must read exactly k inputs; pad first");
  if (uint128{m} < uint128{cparam} * ipow128(n, k - 2))
    throw StretchError("select_dense_sets: need m >= c*n^(k-2), have m=" +
                       std::to_string(m));

  const uint32_t r = k - 2;
  // All r-subsets of [n] in lexicographic order.
  std::vector<std::vector<uint32_t>> subsets;
  {
    std::vector<uint32_t> combo(r);
    for (uint32_t i = 0; i < r; ++i) combo[i] = i;
    for (;;) {
      subsets.push_back(combo);
      if (r == 0) break;
      int64_t i = r - 1;
      while (i >= 0 && combo[i] == n - r + i) --i;
      if (i < 0) break;
      ++combo[i];
      for (uint32_t t = i + 1; t < r; ++t) combo[t] = combo[t - 1] + 1;
    }
  }
  std::map<std::vector<uint32_t>, uint32_t> index_of;
  for (uint32_t i = 0; i < subsets.size(); ++i) index_of[subsets[i]] = i;

  // Subset/output incidence: degree and neighborhood per r-subset.
  std::vector<uint64_t> degree(subsets.size(), 0);
  std::vector<std::vector<uint32_t>> outputs_of(subsets.size());
  for (uint32_t j = 0; j < c.m(); ++j) {
    const auto& reads = c.output(j).inputs;
    std::vector<uint32_t> combo(r);
    std::vector<uint32_t> sel(r);
    for (uint32_t i = 0; i < r; ++i) sel[i] = i;
    for (;;) {
      for (uint32_t i = 0; i < r; ++i) combo[i] = reads[sel[i]];
      const uint32_t id = index_of.at(combo);
      ++degree[id];
      outputs_of[id].push_back(j);
      if (r == 0) break;
      int64_t i = r - 1;
      while (i >= 0 && sel[i] == k - r + i) --i;
      if (i < 0) break;
      ++sel[i];
      for (uint32_t t = i + 1; t < r; ++t) sel[t] = sel[t - 1] + 1;
    }
  }

  // t highest-degree subsets, ties to the lexicographically least.
  const uint128 numer = uint128{cparam} * n * subsets.size();
  uint64_t want = static_cast<uint64_t>((numer + m - 1) / m);
  want = std::min<uint64_t>(want, subsets.size());
  std::vector<uint32_t> order(subsets.size());
  for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](uint32_t a, uint32_t b) { return degree[a] > degree[b]; });

  std::vector<uint32_t> inputs;
  std::vector<uint8_t> out_mark(c.m(), 0);
  for (uint64_t pick = 0; pick < want; ++pick) {
    const uint32_t id = order[pick];
    for (uint32_t v : subsets[id]) inputs.push_back(v);
    for (uint32_t j : outputs_of[id]) out_mark[j] = 1;
  }
  std::sort(inputs.begin(), inputs.end());
  inputs.erase(std::unique(inputs.begin(), inputs.end()), inputs.end());
  std::vector<uint32_t> outputs;
  for (uint32_t j = 0; j < c.m(); ++j)
    if (out_mark[j]) outputs.push_back(j);
  return DenseSelection{std::move(inputs), std::move(outputs), cparam};
}

GF2Vector subspace_union(const LocalCircuit& c0, const SubspaceUnionOptions& options,
                         SolveStats* stats) {
  const uint32_t n = c0.n();
  const uint64_t m = c0.m();
  if (m <= n)
    throw StretchError("subspace union requires stretch m > n (m=" +
                       std::to_string(m) + ", n=" + std::to_string(n) + ")");
  if (n > 125) throw ParameterError("subspace union supports n <= 125");
  const uint32_t k = std::max<uint32_t>(2, c0.max_arity());
  if (n < k)
    throw StretchError("subspace union needs n >= " + std::to_string(k) +
                       " to pad outputs to exact arity");
  if (uint128{m} < 3 * ipow128(n, k - 2))
    throw StretchError("subspace union requires m >= 3*n^(k-2), have m=" +
                       std::to_string(m) + " at n=" + std::to_string(n) +
                       ", k=" + std::to_string(k));

  const LocalCircuit c = pad_to_arity(c0, k);
  const DenseSelection sel = select_dense_sets(c, 3);
  const uint32_t t = static_cast<uint32_t>(sel.inputs.size());
  if (t > options.branch_cap)
    throw BudgetError("branch count t=" + std::to_string(t) + " exceeds the cap of " +
                      std::to_string(options.branch_cap));

  // Branch j fixes input I[i] to bit i of j.
  const uint64_t branch_count = uint64_t{1} << t;
  std::vector<AffineSubspace> branches;
  branches.reserve(branch_count);
  for (uint64_t j = 0; j < branch_count; ++j) {
    GF2Matrix a(t, n);
    GF2Vector b(t);
    for (uint32_t i = 0; i < t; ++i) {
      a.set(i, sel.inputs[i], true);
      b.set(i, (j >> i) & 1);
    }
    branches.push_back(AffineSubspace::from_constraints(a, b));
  }

  PartialAssignment y(m);
  uint128 total = uint128{1} << n;
  const uint64_t steps = std::min<uint64_t>(sel.outputs.size(), 3 * uint64_t{n});
  uint32_t iters = 0;
  double max_ratio = 0;

  std::vector<AffineSubspace> side0(branch_count, AffineSubspace::empty_space(n));
  std::vector<AffineSubspace> side1(branch_count, AffineSubspace::empty_space(n));

  for (uint64_t step = 0; step < steps && total != 0; ++step) {
    const uint32_t o = sel.outputs[step];
    const auto& out = c.output(o);

    // Positions of the output's reads inside I (with their branch bit) and
    // the at most two reads outside I.
    std::vector<uint32_t> fixed_pos, free_pos, branch_bit;
    std::vector<uint32_t> free_idx;
    for (uint32_t pos = 0; pos < out.inputs.size(); ++pos) {
      const auto it =
          std::lower_bound(sel.inputs.begin(), sel.inputs.end(), out.inputs[pos]);
      if (it != sel.inputs.end() && *it == out.inputs[pos]) {
        fixed_pos.push_back(pos);
        branch_bit.push_back(static_cast<uint32_t>(it - sel.inputs.begin()));
      } else {
        free_pos.push_back(pos);
        free_idx.push_back(out.inputs[pos]);
      }
    }
    if (free_pos.size() > 2)
      throw Error("internal: selected output reads more than two free inputs");

    // One classification per pattern of the fixed reads.
    std::vector<TwoLocalFunction> shapes(size_t{1} << fixed_pos.size());
    for (uint64_t pat = 0; pat < shapes.size(); ++pat)
      shapes[pat] =
          classify_two_local(restrict_table(out, fixed_pos, free_pos, pat), free_idx);

    const uint32_t workers = std::max<uint32_t>(1, options.workers);
    std::vector<uint128> sums0(workers, 0), sums1(workers, 0);
    auto body = [&](uint32_t slot, uint64_t lo, uint64_t hi) {
      for (uint64_t j = lo; j < hi; ++j) {
        if (branches[j].is_empty()) {
          side0[j] = branches[j];
          side1[j] = branches[j];
          continue;
        }
        uint64_t pat = 0;
        for (size_t i = 0; i < branch_bit.size(); ++i)
          pat |= ((j >> branch_bit[i]) & 1) << i;
        auto [s0, s1] = affine_reduce(branches[j], shapes[pat]);
        sums0[slot] += size128(s0);
        sums1[slot] += size128(s1);
        side0[j] = std::move(s0);
        side1[j] = std::move(s1);
      }
    };
    if (workers <= 1 || branch_count < 256) {
      body(0, 0, branch_count);
    } else {
      std::vector<std::thread> pool;
      const uint64_t chunk = (branch_count + workers - 1) / workers;
      for (uint32_t w = 0; w < workers; ++w) {
        const uint64_t lo = w * chunk, hi = std::min(branch_count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, w, lo, hi] { body(w, lo, hi); });
      }
      for (auto& th : pool) th.join();
    }
    uint128 sum0 = 0, sum1 = 0;
    for (uint32_t w = 0; w < workers; ++w) {
      sum0 += sums0[w];
      sum1 += sums1[w];
    }

    const bool b = sum1 < sum0;
    const uint128 chosen = b ? sum1 : sum0;
    if (chosen * 4 > total * 3)
      throw Error("internal: union shrank by less than 4/3 (" + u128_str(chosen) +
                  " of " + u128_str(total) + ")");
    max_ratio = std::max(max_ratio, double(chosen) / double(total));
    y.set(o, b);
    auto& winner = b ? side1 : side0;
    for (uint64_t j = 0; j < branch_count; ++j) branches[j] = std::move(winner[j]);
    total = chosen;
    ++iters;
    if (options.observer)
      options.observer(
          SubspaceUnionStep{static_cast<uint32_t>(step), o, b, y, branches});
  }
  if (total != 0)
    throw Error("internal: union still holds " + u128_str(total) +
                " points after all selected outputs");
  if (stats) {
    *stats = {};
    stats->iterations = iters;
    stats->branch_count = t;
    stats->max_step_ratio = max_ratio;
  }
  return y.to_vector(false);
}

namespace {

// Lexicographically least (a, c) with a nonzero and a.p = c on every pattern.
// Patterns are bit strings over u local variables, LSB first; inside `a` the
// most significant of the low u+1 bits is a_1.
std::pair<uint32_t, bool> least_hyperplane(const std::vector<uint32_t>& patterns,
                                           uint32_t u) {
  for (uint32_t val = 1; val < (uint32_t{2} << u); ++val) {
    const uint32_t abits = val >> 1;
    const bool cbit = val & 1;
    if (abits == 0) continue;
    bool ok = true;
    for (uint32_t p : patterns) {
      bool dot = false;
      for (uint32_t i = 0; i < u; ++i)
        if (((abits >> (u - 1 - i)) & 1) && ((p >> i) & 1)) dot = !dot;
      if (dot != cbit) {
        ok = false;
        break;
      }
    }
    if (ok) return {abits, cbit};
  }
  throw Error("internal: no hyperplane through the consistent patterns");
}

GF2Vector local_normal(uint32_t abits, const std::vector<uint32_t>& vars,
                       uint32_t n) {
  const uint32_t u = static_cast<uint32_t>(vars.size());
  GF2Vector normal(n);
  for (uint32_t i = 0; i < u; ++i)
    if ((abits >> (u - 1 - i)) & 1) normal.set(vars[i], true);
  return normal;
}

}  // namespace

GF2Vector one_subspace(const LocalCircuit& c, SolveStats* stats) {
  const uint32_t n = c.n();
  const uint64_t m = c.m();
  if (m <= n)
    throw StretchError("one subspace requires stretch m > n (m=" + std::to_string(m) +
                       ", n=" + std::to_string(n) + ")");
  if (c.max_arity() > 3) throw StretchError("one subspace requires locality <= 3");
  // m >= C(n,2)/3 + 2n, kept exact as 3m >= C(n,2) + 6n.
  const uint64_t pairs = uint64_t{n} * (n - 1) / 2;
  if (3 * uint128{m} < uint128{pairs} + 6 * uint128{n})
    throw StretchError("one subspace requires m >= binom(n,2)/3 + 2n, have m=" +
                       std::to_string(m) + " at n=" + std::to_string(n));

  AffineSubspace as = AffineSubspace::full(n);
  PartialAssignment y(m);
  uint32_t iters = 0;

  for (uint32_t iter = 0; iter < n && !as.is_empty(); ++iter) {
    // An output reading at most two inputs is consumed directly.
    int64_t low = -1;
    for (uint32_t j = 0; j < m; ++j) {
      if (!y.is_set(j) && c.output(j).inputs.size() <= 2) {
        low = j;
        break;
      }
    }
    if (low >= 0) {
      const auto& out = c.output(low);
      auto [s0, s1] = affine_reduce(as, classify_two_local(out.table, out.inputs));
      const bool b = pick_smaller(s0, s1);
      y.set(low, b);
      as = b ? std::move(s1) : std::move(s0);
      ++iters;
      continue;
    }

    // Every unassigned output reads exactly three inputs, so some two of
    // them share an input pair. First such pair in output-index order.
    int64_t o1 = -1, o2 = -1;
    for (uint32_t a = 0; a < m && o1 < 0; ++a) {
      if (y.is_set(a)) continue;
      for (uint32_t b = a + 1; b < m; ++b) {
        if (y.is_set(b)) continue;
        const auto& ra = c.output(a).inputs;
        const auto& rb = c.output(b).inputs;
        uint32_t shared = 0;
        for (uint32_t va : ra)
          if (std::binary_search(rb.begin(), rb.end(), va)) ++shared;
        if (shared >= 2) {
          o1 = a;
          o2 = b;
          break;
        }
      }
    }
    if (o1 < 0)
      throw Error("internal: no output pair shares two inputs; stretch bound violated");

    const auto& out1 = c.output(o1);
    const auto& out2 = c.output(o2);
    std::vector<uint32_t> vars = out1.inputs;
    for (uint32_t v : out2.inputs)
      if (!std::binary_search(out1.inputs.begin(), out1.inputs.end(), v))
        vars.push_back(v);
    std::sort(vars.begin(), vars.end());
    const uint32_t u = static_cast<uint32_t>(vars.size());

    // Both outputs on every local pattern; bit i of a pattern is vars[i].
    auto out_value = [&](const CircuitOutput& out, uint32_t p) {
      size_t idx = 0;
      for (size_t i = 0; i < out.inputs.size(); ++i) {
        const size_t pos =
            std::lower_bound(vars.begin(), vars.end(), out.inputs[i]) - vars.begin();
        idx |= ((p >> pos) & 1) << i;
      }
      return out.table[idx] != 0;
    };
    std::vector<uint8_t> v1(uint32_t{1} << u), v2(uint32_t{1} << u);
    for (uint32_t p = 0; p < (uint32_t{1} << u); ++p) {
      v1[p] = out_value(out1, p);
      v2[p] = out_value(out2, p);
    }

    auto min_pair = [&](const std::vector<uint32_t>& domain) {
      uint32_t counts[4] = {0, 0, 0, 0};
      for (uint32_t p : domain) counts[(v1[p] << 1) | v2[p]]++;
      uint32_t best = 0;
      for (uint32_t cand = 1; cand < 4; ++cand)
        if (counts[cand] < counts[best]) best = cand;
      return std::make_pair(best, counts[best]);
    };

    std::vector<uint32_t> all_patterns(uint32_t{1} << u);
    for (uint32_t p = 0; p < all_patterns.size(); ++p) all_patterns[p] = p;
    auto [pair_code, pair_count] = min_pair(all_patterns);
    const bool b1 = (pair_code >> 1) & 1, b2 = pair_code & 1;

    if (pair_count == 0) {
      // No local pattern reaches (b1, b2); nothing stays consistent.
      y.set(o1, b1);
      y.set(o2, b2);
      as = AffineSubspace::empty_space(n);
      ++iters;
      continue;
    }

    std::vector<uint32_t> consistent;
    for (uint32_t p = 0; p < (uint32_t{1} << u); ++p)
      if (v1[p] == b1 && v2[p] == b2) consistent.push_back(p);

    auto [abits, cbit] = least_hyperplane(consistent, u);
    const GF2Vector normal = local_normal(abits, vars, n);

    if (!as.implies(normal, cbit)) {
      y.set(o1, b1);
      y.set(o2, b2);
      as = as.intersect_hyperplane(normal, cbit);
      ++iters;
      continue;
    }

    // as lies inside the hyperplane; restrict attention to patterns on it.
    std::vector<uint32_t> on_plane;
    for (uint32_t p = 0; p < (uint32_t{1} << u); ++p) {
      bool dot = false;
      for (uint32_t i = 0; i < u; ++i)
        if (((abits >> (u - 1 - i)) & 1) && ((p >> i) & 1)) dot = !dot;
      if (dot == cbit) on_plane.push_back(p);
    }
    auto [code2, count2] = min_pair(on_plane);
    const bool c1 = (code2 >> 1) & 1, c2 = code2 & 1;
    if (count2 == 0) {
      y.set(o1, c1);
      y.set(o2, c2);
      as = AffineSubspace::empty_space(n);
      ++iters;
      continue;
    }

    std::vector<uint32_t> au;
    for (uint32_t p : on_plane)
      if (v1[p] == c1 && v2[p] == c2) au.push_back(p);

    // Constraint system of the affine span of the at most two points in au.
    std::vector<std::pair<GF2Vector, bool>> span;
    for (uint32_t aa = 1; aa < (uint32_t{1} << u); ++aa) {
      bool orthogonal = true;
      for (size_t w = 1; w < au.size() && orthogonal; ++w) {
        const uint32_t dir = au[w] ^ au[0];
        bool dot = false;
        for (uint32_t i = 0; i < u; ++i)
          if (((aa >> (u - 1 - i)) & 1) && ((dir >> i) & 1)) dot = !dot;
        if (dot) orthogonal = false;
      }
      if (!orthogonal) continue;
      bool rhs = false;
      for (uint32_t i = 0; i < u; ++i)
        if (((aa >> (u - 1 - i)) & 1) && ((au[0] >> i) & 1)) rhs = !rhs;
      span.emplace_back(local_normal(aa, vars, n), rhs);
    }

    bool all_implied = true;
    for (const auto& [nv, rhs] : span)
      if (!as.implies(nv, rhs)) {
        all_implied = false;
        break;
      }

    if (!all_implied) {
      y.set(o1, c1);
      y.set(o2, c2);
      for (const auto& [nv, rhs] : span) as = as.intersect_hyperplane(nv, rhs);
      ++iters;
      continue;
    }
    // Every remaining point outputs (c1, c2); flipping the first bit leaves
    // nothing consistent.
    y.set(o1, !c1);
    y.set(o2, c2);
    as = AffineSubspace::empty_space(n);
    ++iters;
  }

  if (!as.is_empty()) {
    if (as.dimension() != 0)
      throw Error("internal: subspace dimension positive after n iterations");
    const GF2Vector x = as.enumerate_points(1)[0];
    int64_t j = -1;
    for (uint32_t cand = 0; cand < m; ++cand)
      if (!y.is_set(cand)) {
        j = cand;
        break;
      }
    if (j < 0) throw Error("internal: no unassigned output for the final flip");
    y.set(j, !c.eval_output(j, x));
    ++iters;
  }
  if (stats) {
    *stats = {};
    stats->iterations = iters;
  }
  return y.to_vector(false);
}

GF2Vector solve_degree2(const PolyFunction& p, Degree2Strategy strategy,
                        uint64_t enum_limit, const SubspaceUnionOptions& options,
                        SolveStats* stats) {
  if (p.degree() > 2)
    throw ParameterError("solve_degree2: the map must have degree at most 2");
  if (p.m() <= p.n())
    throw StretchError("degree-2 avoidance requires stretch m > n (m=" +
                       std::to_string(p.m()) + ", n=" + std::to_string(p.n()) + ")");
  EncodedCircuit e = encode_degree_d(p);

  auto admissibility = [&] {
    const uint64_t nhat = e.nhat, mhat = e.mhat;
    const uint32_t k = std::max<uint32_t>(2, e.fhat.max_arity());
    std::string s = "admissible strategies for the encoded shape (nhat=" +
                    std::to_string(nhat) + ", mhat=" + std::to_string(mhat) + "):";
    if (nhat <= 63 && (uint64_t{1} << nhat) <= enum_limit) s += " brute";
    if (nhat >= k && uint128{mhat} >= 3 * ipow128(nhat, k - 2)) s += " subspace-union";
    const uint64_t pr = nhat * (nhat - 1) / 2;
    if (k <= 3 && 3 * uint128{mhat} >= uint128{pr} + 6 * uint128{nhat})
      s += " one-subspace";
    return s;
  };

  GF2Vector yhat(0);
  try {
    switch (strategy) {
      case Degree2Strategy::kBrute:
        yhat = brute_force_avoid(e.fhat, enum_limit, options.workers);
        if (stats) *stats = {};
        break;
      case Degree2Strategy::kSubspaceUnion:
        yhat = subspace_union(e.fhat, options, stats);
        break;
      case Degree2Strategy::kOneSubspace:
        yhat = one_subspace(e.fhat, stats);
        break;
    }
  } catch (const StretchError& err) {
    throw StretchError(std::string(err.what()) + "; " + admissibility());
  } catch (const BudgetError& err) {
    throw BudgetError(std::string(err.what()) + "; " + admissibility());
  }
  return decode(e, yhat);
}

}  // namespace avoid
