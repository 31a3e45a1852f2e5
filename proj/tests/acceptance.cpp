// Acceptance suite: every criterion runs at its stated tolerance and prints
// one line. The binary exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "avoid/bench.hpp"
#include "avoid/circuit.hpp"
#include "avoid/encoding.hpp"
#include "avoid/gf2.hpp"
#include "avoid/solvers.hpp"
#include "avoid/verify.hpp"

using namespace avoid;

namespace {

constexpr uint64_t kLimit = uint64_t{1} << 26;
constexpr uint64_t kBudget = uint64_t{1} << 26;

struct Outcome {
  bool pass = true;
  std::string note;
  double seconds = 0;

  void fail(const std::string& why) {
    if (pass) note = why;
    pass = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

GF2Vector index_bits(uint64_t v, size_t len) {
  GF2Vector x(len);
  for (size_t i = 0; i < len; ++i) x.set(i, (v >> i) & 1);
  return x;
}

AffineSubspace random_subspace(SplitRng& rng, size_t n) {
  const size_t rows = rng.below(n + 1);
  GF2Matrix a(rows, n);
  GF2Vector b(rows);
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < n; ++c) a.set(r, c, rng.coin());
    b.set(r, rng.coin());
  }
  return AffineSubspace::from_constraints(a, b);
}

// ---------------------------------------------------------------- criterion 1
Outcome criterion_affine_reduce() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  SplitRng rng(20240601);
  for (int table = 0; table < 16 && out.pass; ++table) {
    std::vector<uint8_t> tt = {uint8_t(table & 1), uint8_t((table >> 1) & 1),
                               uint8_t((table >> 2) & 1), uint8_t((table >> 3) & 1)};
    for (int trial = 0; trial < 200 && out.pass; ++trial) {
      const size_t n = 2 + rng.below(9);
      uint32_t i = static_cast<uint32_t>(rng.below(n));
      uint32_t j = static_cast<uint32_t>(rng.below(n));
      while (j == i) j = static_cast<uint32_t>(rng.below(n));
      if (i > j) std::swap(i, j);
      const auto f = classify_two_local(tt, {i, j});
      const auto s = random_subspace(rng, n);
      const auto [s0, s1] = affine_reduce(s, f);
      if (2 * (s0.size() + s1.size()) > 3 * s.size())
        out.fail("size bound violated at table " + std::to_string(table));
      if (!s0.subset_of(s) || !s1.subset_of(s)) out.fail("containment violated");
      if (s.is_empty()) continue;
      for (const auto& x : s.enumerate_points(uint64_t{1} << 10)) {
        const bool fx = f.eval(x.get(i), x.get(j));
        if (!(fx ? s1 : s0).contains(x)) {
          out.fail("soundness violated at table " + std::to_string(table));
          break;
        }
      }
    }
  }
  out.seconds = seconds_since(start);
  if (out.seconds >= 5.0) out.fail("runtime above 5 s");
  return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion_nc02() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  double worst_ms = 0;
  for (uint64_t seed = 0; seed < 500 && out.pass; ++seed) {
    const uint32_t n = 2 + seed % 15;  // covers [2, 16]
    const auto c = gen_random_nc0(n, n + 1, 2, seed);
    SolveStats stats;
    const auto t0 = std::chrono::steady_clock::now();
    const auto y = solve_nc02(c, &stats);
    const double ms = seconds_since(t0) * 1e3;
    worst_ms = std::max(worst_ms, ms);
    if (ms >= 50.0) out.fail("instance took " + std::to_string(ms) + " ms");
    if (stats.iterations > n + 1) out.fail("iteration bound violated");
    if (in_range(c, y, kLimit)) out.fail("output in range at seed " + std::to_string(seed));
  }
  out.seconds = seconds_since(start);
  if (out.pass)
    out.note = "500 instances certified, worst " +
               std::to_string(int(worst_ms * 1000) / 1000.0) + " ms";
  return out;
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion_subspace_union() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  for (uint64_t seed = 0; seed < 200 && out.pass; ++seed) {
    const uint32_t n = 4 + seed % 11;  // covers [4, 14]
    const uint32_t m = 3 * n;
    const auto c = gen_random_nc0(n, m, 3, seed);
    SolveStats stats;
    const auto y = subspace_union(c, {}, &stats);
    const uint32_t t_bound =
        static_cast<uint32_t>((uint64_t{3} * n * n + m - 1) / m);
    if (stats.branch_count > t_bound) out.fail("branch bound violated");
    if (stats.iterations > 3 * n) out.fail("iteration bound violated");
    if (stats.max_step_ratio > 0.75 + 1e-12) out.fail("union shrank too slowly");
    if (in_range(c, y, kLimit)) out.fail("output in range at seed " + std::to_string(seed));
  }
  // golden trace: nine outputs computing AND(x0, x1, x2)
  if (out.pass) {
    std::vector<CircuitOutput> outs(9,
                                    CircuitOutput{{0, 1, 2}, {0, 0, 0, 0, 0, 0, 0, 1}});
    const LocalCircuit nine(3, 9, 3, std::move(outs));
    const auto y = subspace_union(nine);
    if (y.to_string() != "100000000")
      out.fail("nine-AND golden output was " + y.to_string());
  }
  out.seconds = seconds_since(start);
  if (out.seconds >= 60.0) out.fail("runtime above 60 s");
  if (out.pass) out.note = "200 instances certified plus the golden trace";
  return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion_one_subspace() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  for (uint64_t seed = 0; seed < 200 && out.pass; ++seed) {
    const uint32_t n = 4 + seed % 9;  // covers [4, 12]
    const uint32_t m =
        static_cast<uint32_t>((uint64_t{n} * (n - 1) / 2 + 2) / 3 + 2 * uint64_t{n});
    const auto c = gen_random_nc0(n, m, 3, seed);
    SolveStats stats;
    const auto y = one_subspace(c, &stats);
    if (stats.iterations > n + 1) out.fail("iteration bound violated");
    if (in_range(c, y, kLimit)) out.fail("output in range at seed " + std::to_string(seed));
  }
  out.seconds = seconds_since(start);
  if (out.seconds >= 60.0) out.fail("runtime above 60 s");
  if (out.pass) out.note = "200 instances certified";
  return out;
}

// ---------------------------------------------------------------- criterion 5
Outcome criterion_perfect_encoding() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();

  // Every map with n <= 3 inputs, m <= 2 outputs, and at most two monomials
  // of degree <= 2 per output.
  size_t instances = 0;
  for (uint32_t n = 1; n <= 3 && out.pass; ++n) {
    std::vector<Monomial> pool;
    pool.push_back(Monomial{});
    for (uint32_t a = 0; a < n; ++a) {
      pool.push_back(Monomial{{a}});
      for (uint32_t b = a + 1; b < n; ++b) pool.push_back(Monomial{{a, b}});
    }
    std::vector<std::vector<size_t>> choices;
    choices.push_back({});
    for (size_t a = 0; a < pool.size(); ++a) {
      choices.push_back({a});
      for (size_t b = a + 1; b < pool.size(); ++b) choices.push_back({a, b});
    }
    for (uint32_t m = 1; m <= 2 && out.pass; ++m) {
      std::vector<size_t> pick(m, 0);
      for (;;) {
        bool any = false;
        std::vector<PolyOutput> pouts(m);
        for (uint32_t j = 0; j < m; ++j) {
          for (size_t idx : choices[pick[j]]) pouts[j].monomials.push_back(pool[idx]);
          if (!choices[pick[j]].empty()) any = true;
        }
        if (any) {
          ++instances;
          const PolyFunction p(n, m, 2, std::move(pouts));
          const auto e = encode_degree_d(p);

          // range of p and of fhat
          std::vector<uint8_t> in_p(size_t{1} << m, 0);
          for (uint64_t xv = 0; xv < (uint64_t{1} << n); ++xv) {
            const auto px = p.eval(index_bits(xv, n));
            uint64_t code = 0;
            for (uint32_t b = 0; b < m; ++b) code |= uint64_t{px.get(b)} << b;
            in_p[code] = 1;
          }
          std::vector<uint8_t> in_fhat(size_t{1} << e.mhat, 0);
          for (uint64_t v = 0; v < (uint64_t{1} << e.nhat); ++v) {
            const auto xin = index_bits(v, e.nhat);
            GF2Vector x(n);
            for (uint32_t i = 0; i < n; ++i) x.set(i, xin.get(i));
            const auto yhat = e.fhat.eval(xin);
            uint64_t code = 0;
            for (uint32_t b = 0; b < e.mhat; ++b) code |= uint64_t{yhat.get(b)} << b;
            in_fhat[code] = 1;
            // forward soundness on every (x, r, s)
            if (decode(e, yhat) != p.eval(x)) {
              out.fail("decode(fhat(x,r,s)) != P(x)");
              break;
            }
          }
          if (!out.pass) break;

          for (uint64_t yv = 0; yv < (uint64_t{1} << e.mhat) && out.pass; ++yv) {
            const auto yhat = index_bits(yv, e.mhat);
            const auto target = decode(e, yhat);
            uint64_t tcode = 0;
            for (uint32_t b = 0; b < m; ++b) tcode |= uint64_t{target.get(b)} << b;
            // completeness: witnesses over the whole fiber re-evaluate
            for (uint64_t xv = 0; xv < (uint64_t{1} << n); ++xv) {
              const auto x = index_bits(xv, n);
              if (p.eval(x) != target) continue;
              const auto [r, s] = encoding_witness(e, x, yhat);
              if (e.fhat.eval(assemble_encoded_input(e, x, r, s)) != yhat) {
                out.fail("witness failed to re-evaluate");
                break;
              }
            }
            // avoid transfer: yhat avoided implies decode(yhat) avoided
            if (!in_fhat[yv] && in_p[tcode])
              out.fail("avoided encoded point decoded into the range");
          }
        }
        size_t j = 0;
        while (j < m && ++pick[j] == choices.size()) pick[j++] = 0;
        if (j == m || !out.pass) break;
      }
    }
  }
  out.seconds = seconds_since(start);
  if (out.seconds >= 30.0) out.fail("runtime above 30 s");
  if (out.pass) out.note = std::to_string(instances) + " maps checked exhaustively";
  return out;
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion_sparse_encoder() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  size_t targets = 0;
  for (uint32_t n : {4u, 9u}) {
    for (uint32_t s : {1u, 2u}) {
      const auto h = build_sparse_encoder(n, s, 2);
      for (uint64_t v = 0; v < (uint64_t{1} << n); ++v) {
        if (size_t(__builtin_popcountll(v)) > s) continue;
        const auto y = index_bits(v, n);
        ++targets;
        if (h.f.eval(sparse_witness(h, y)) != y) {
          out.fail("witness missed target at n=" + std::to_string(n) +
                   ", s=" + std::to_string(s));
          break;
        }
      }
    }
  }
  out.seconds = seconds_since(start);
  if (out.seconds >= 10.0) out.fail("runtime above 10 s");
  if (out.pass) out.note = std::to_string(targets) + " sparse targets reached";
  return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion_rigid_pipeline() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();

  // Secondary clause first: the rank-side search agrees with the dual
  // sparse-side enumeration on 3x3 matrices.
  SplitRng rng(424242);
  for (int trial = 0; trial < 40 && out.pass; ++trial) {
    GF2Matrix m(3, 3);
    for (size_t i = 0; i < 3; ++i)
      for (size_t j = 0; j < 3; ++j) m.set(i, j, rng.coin());
    for (uint32_t r = 0; r <= 1; ++r)
      for (uint32_t s = 0; s <= 1; ++s)
        if (is_rigid(m, r, s, kBudget).verdict !=
            is_rigid_dual(m, r, s, kBudget).verdict)
          out.fail("dual cross-check disagreed at n=3");
  }

  // Main clause: brute-force Avoid over the 2^24 inputs of the n=4, r=1,
  // s=1 instance must yield a matrix certified rigid.
  if (out.pass) {
    try {
      const auto res =
          rigid_pipeline(4, 1, 1, PipelineStrategy::kBrute, kLimit, kBudget);
      if (res.cert.verdict != RigidVerdict::kRigid)
        out.fail("pipeline returned a non-rigid matrix");
      else
        out.note = "pipeline produced a certified rigid matrix";
    } catch (const Error& e) {
      out.fail(std::string("unattainable at these parameters: ") + e.what() +
               " [the hypergraph encoder's range is a strict superset of the "
               "weight-<=1 vectors, and at n=4, r=1, s=1 the instance range "
               "covers all 65536 matrices; the pipeline itself is validated "
               "end-to-end at n=4, r=1, s=0 in the unit suite]");
    }
  }
  out.seconds = seconds_since(start);
  if (out.seconds >= 600.0) out.fail("runtime above 10 min");
  return out;
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion_branch_scaling() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  const std::vector<MRule> rules = {MRule{MRule::Kind::kConst, 36},
                                    MRule{MRule::Kind::kConst, 72},
                                    MRule{MRule::Kind::kConst, 144}};
  const auto rows =
      run_bench(3, 12, 12, rules, 1, {"subspace-union"}, 0, kLimit, {});
  if (rows.size() != 3) {
    out.fail("expected 3 bench rows");
  } else {
    uint32_t prev = UINT32_MAX;
    for (const auto& row : rows) {
      const uint32_t expect =
          static_cast<uint32_t>((uint64_t{3} * 12 * 12 + row.m - 1) / row.m);
      if (row.t != expect)
        out.fail("t=" + std::to_string(row.t) + " at m=" + std::to_string(row.m) +
                 ", expected " + std::to_string(expect));
      if (row.t > prev) out.fail("t increased as m grew");
      if (!row.verified) out.fail("bench output failed verification");
      prev = row.t;
    }
  }
  // CSV round trip reproduces the same t column
  if (out.pass) {
    std::ostringstream csv;
    write_bench_csv(csv, rows);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    if (line != "n,m,k,alg,t,iters,micros,verified") out.fail("CSV header changed");
    size_t idx = 0;
    while (std::getline(in, line) && out.pass) {
      std::istringstream ls(line);
      std::string field;
      std::vector<std::string> fields;
      while (std::getline(ls, field, ',')) fields.push_back(field);
      if (fields.size() != 8 || std::stoul(fields[4]) != rows[idx].t)
        out.fail("CSV row mismatch");
      ++idx;
    }
    if (out.pass && idx != rows.size()) out.fail("CSV row count mismatch");
  }
  out.seconds = seconds_since(start);
  if (out.pass) out.note = "t = 12, 6, 3 at m = 36, 72, 144";
  return out;
}

}  // namespace

int main() {
  struct Entry {
    const char* label;
    Outcome (*run)();
  };
  const Entry entries[] = {
      {"1 affine-reduce exhaustive suite", criterion_affine_reduce},
      {"2 nc02 solver on 500 seeded instances", criterion_nc02},
      {"3 subspace-union on 200 seeded instances", criterion_subspace_union},
      {"4 one-subspace on 200 seeded instances", criterion_one_subspace},
      {"5 perfect encoding exhaustive", criterion_perfect_encoding},
      {"6 sparse encoder completeness", criterion_sparse_encoder},
      {"7 rigid pipeline end-to-end", criterion_rigid_pipeline},
      {"8 branch-count scaling via bench", criterion_branch_scaling},
  };
  int failures = 0;
  for (const auto& e : entries) {
    Outcome out;
    try {
      out = e.run();
    } catch (const std::exception& ex) {
      out.pass = false;
      out.note = std::string("exception: ") + ex.what();
    }
    std::printf("[%s] criterion %s (%.2fs)%s%s\n", out.pass ? "PASS" : "FAIL",
                e.label, out.seconds, out.note.empty() ? "" : ": ",
                out.note.c_str());
    if (!out.pass) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}
