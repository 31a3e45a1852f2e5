#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "avoid/solvers.hpp"
#include "avoid/verify.hpp"

using namespace avoid;

namespace {

constexpr uint64_t kLimit = uint64_t{1} << 24;

GF2Vector bits(std::string_view s) { return GF2Vector::from_string(std::string(s)); }

GF2Vector index_bits(uint64_t v, size_t len) {
  GF2Vector x(len);
  for (size_t i = 0; i < len; ++i) x.set(i, (v >> i) & 1);
  return x;
}

LocalCircuit nine_and_circuit() {
  std::vector<CircuitOutput> outs(9, CircuitOutput{{0, 1, 2}, {0, 0, 0, 0, 0, 0, 0, 1}});
  return LocalCircuit(3, 9, 3, std::move(outs));
}

std::set<std::string> subspace_points(const AffineSubspace& s) {
  std::set<std::string> out;
  if (s.is_empty()) return out;
  for (const auto& p : s.enumerate_points(1 << 12)) out.insert(p.to_string());
  return out;
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

}  // namespace

TEST_CASE("brute force against tiny ranges") {
  LocalCircuit dup(1, 2, 1,
                   {CircuitOutput{{0}, {0, 1}}, CircuitOutput{{0}, {0, 1}}});
  CHECK(brute_force_avoid(dup, kLimit).to_string() == "01");

  // all outputs constant zero: least avoided string is 0...01
  std::vector<CircuitOutput> zeros(5, CircuitOutput{{}, {0}});
  LocalCircuit zc(2, 5, 2, std::move(zeros));
  CHECK(brute_force_avoid(zc, kLimit).to_string() == "00001");

  auto seeded = gen_random_nc0(10, 11, 3, 42);
  auto y = brute_force_avoid(seeded, kLimit);
  CHECK_FALSE(in_range(seeded, y, kLimit));

  LocalCircuit square(2, 2, 2,
                      {CircuitOutput{{0}, {0, 1}}, CircuitOutput{{1}, {0, 1}}});
  CHECK_THROWS_AS(brute_force_avoid(square, kLimit), StretchError);
  CHECK_THROWS_AS(brute_force_avoid(seeded, 512), BudgetError);
}

TEST_CASE("brute force scan detects full ranges") {
  // identity on 2 bits covers everything
  LocalCircuit id2(2, 2, 1,
                   {CircuitOutput{{0}, {0, 1}}, CircuitOutput{{1}, {0, 1}}});
  CHECK_FALSE(brute_force_scan(id2, kLimit).has_value());
  LocalCircuit notfull(2, 2, 2,
                       {CircuitOutput{{0, 1}, {0, 0, 0, 1}}, CircuitOutput{{1}, {0, 1}}});
  auto y = brute_force_scan(notfull, kLimit);
  REQUIRE(y.has_value());
  CHECK_FALSE(in_range(notfull, *y, kLimit));
}

TEST_CASE("brute force parallel scan matches single worker") {
  auto c = gen_random_nc0(12, 13, 3, 9);
  CHECK(brute_force_avoid(c, kLimit, 1) == brute_force_avoid(c, kLimit, 4));
}

TEST_CASE("affine_reduce worked cases") {
  SUBCASE("constant one keeps everything on the 1 side") {
    auto s = AffineSubspace::full(3);
    TwoLocalFunction f;
    f.kind = TwoLocalFunction::Kind::kConstant;
    f.c = true;
    auto [s0, s1] = affine_reduce(s, f);
    CHECK(s0.is_empty());
    CHECK(s1 == s);
  }
  SUBCASE("xor splits the square in half") {
    auto s = AffineSubspace::full(2);
    auto f = classify_two_local({0, 1, 1, 0}, {0, 1});
    auto [s0, s1] = affine_reduce(s, f);
    CHECK(subspace_points(s0) == std::set<std::string>{"00", "11"});
    CHECK(subspace_points(s1) == std::set<std::string>{"01", "10"});
    CHECK(s0.size() + s1.size() <= 3 * s.size() / 2);
  }
  SUBCASE("and on the full square takes the corner") {
    auto s = AffineSubspace::full(2);
    auto f = classify_two_local({0, 0, 0, 1}, {0, 1});
    auto [s0, s1] = affine_reduce(s, f);
    CHECK(subspace_points(s1) == std::set<std::string>{"11"});
    CHECK(s0 == s);  // superset side
    CHECK(s0.size() + s1.size() <= 3 * s.size() / 2);
    // soundness: every f=0 point is inside s0
    for (const auto& pt : {"00", "01", "10"}) CHECK(s0.contains(bits(pt)));
  }
  SUBCASE("and on the corner singleton empties the 0 side") {
    auto corner = AffineSubspace::from_constraints(
        GF2Matrix::from_strings({"10", "01"}), GF2Vector::from_string("11"));
    auto f = classify_two_local({0, 0, 0, 1}, {0, 1});
    auto [s0, s1] = affine_reduce(corner, f);
    CHECK(s1 == corner);
    CHECK(s0.is_empty());
  }
  SUBCASE("empty input yields two empties") {
    auto f = classify_two_local({0, 1, 1, 0}, {0, 1});
    auto [s0, s1] = affine_reduce(AffineSubspace::empty_space(4), f);
    CHECK(s0.is_empty());
    CHECK(s1.is_empty());
  }
}

TEST_CASE("affine_reduce sound and bounded on all tables x random subspaces") {
  SplitRng rng(1234);
  for (int table = 0; table < 16; ++table) {
    std::vector<uint8_t> tt = {uint8_t(table & 1), uint8_t((table >> 1) & 1),
                               uint8_t((table >> 2) & 1), uint8_t((table >> 3) & 1)};
    for (int trial = 0; trial < 100; ++trial) {
      const size_t n = 2 + rng.below(9);  // ambient dim up to 10
      const uint32_t i = static_cast<uint32_t>(rng.below(n));
      uint32_t j = static_cast<uint32_t>(rng.below(n));
      while (j == i) j = static_cast<uint32_t>(rng.below(n));
      auto f = classify_two_local(tt, {std::min(i, j), std::max(i, j)});
      auto s = random_subspace(rng, n);
      auto [s0, s1] = affine_reduce(s, f);
      CHECK(s0.size() + s1.size() <= 3 * s.size() / 2);
      CHECK(s0.subset_of(s));
      CHECK(s1.subset_of(s));
      if (s.is_empty()) continue;
      for (const auto& x : s.enumerate_points(1 << 12)) {
        const bool fx = f.eval(x.get(std::min(i, j)), x.get(std::max(i, j)));
        CHECK((fx ? s1 : s0).contains(x));
      }
    }
  }
}

TEST_CASE("solve_nc02 worked examples") {
  // C(x0,x1) = (x0, x1, x0+x1): range {000,011,101,110}
  LocalCircuit c(2, 3, 2,
                 {CircuitOutput{{0}, {0, 1}}, CircuitOutput{{1}, {0, 1}},
                  CircuitOutput{{0, 1}, {0, 1, 1, 0}}});
  SolveStats stats;
  auto y = solve_nc02(c, &stats);
  CHECK(y.to_string() == "001");
  CHECK_FALSE(in_range(c, y, kLimit));
  CHECK(stats.iterations <= 3);

  // identity plus constant zero: range {00, 10}
  LocalCircuit ic(1, 2, 2, {CircuitOutput{{0}, {0, 1}}, CircuitOutput{{}, {0}}});
  auto y2 = solve_nc02(ic);
  CHECK((y2.to_string() == "01" || y2.to_string() == "11"));
  CHECK_FALSE(in_range(ic, y2, kLimit));

  LocalCircuit square(2, 2, 2,
                      {CircuitOutput{{0}, {0, 1}}, CircuitOutput{{1}, {0, 1}}});
  CHECK_THROWS_AS(solve_nc02(square), StretchError);
  CHECK_THROWS_AS(solve_nc02(gen_random_nc0(4, 12, 3, 0)), StretchError);
}

TEST_CASE("solve_nc02 certified on seeded instances") {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    const uint32_t n = 2 + seed % 12;
    auto c = gen_random_nc0(n, n + 1, 2, seed);
    SolveStats stats;
    auto y = solve_nc02(c, &stats);
    CHECK(check_avoid_solution(c, y, kLimit));
    CHECK(stats.iterations <= n + 1);
  }
}

TEST_CASE("select_dense_sets bounds") {
  SUBCASE("n=6 m=27") {
    auto c = pad_to_arity(gen_random_nc0(6, 27, 3, 5), 3);
    auto sel = select_dense_sets(c, 3);
    // t = ceil(3*6*6/27) = 4 subsets of size one
    CHECK(sel.inputs.size() <= 4);
    CHECK(sel.outputs.size() >= 18);
    for (uint32_t o : sel.outputs) {
      const auto& reads = c.output(o).inputs;
      uint32_t inside = 0;
      for (uint32_t v : reads)
        if (std::binary_search(sel.inputs.begin(), sel.inputs.end(), v)) ++inside;
      CHECK(inside >= 1);  // k - 2
    }
  }
  SUBCASE("n=4 m=12 picks every input") {
    auto c = pad_to_arity(gen_random_nc0(4, 12, 3, 6), 3);
    auto sel = select_dense_sets(c, 3);
    CHECK(sel.inputs.size() <= 4);
    CHECK(sel.outputs.size() == 12);
  }
  SUBCASE("below threshold") {
    auto c = pad_to_arity(gen_random_nc0(6, 10, 3, 7), 3);
    CHECK_THROWS_AS(select_dense_sets(c, 3), StretchError);
  }
  SUBCASE("requires exact arity") {
    auto c = gen_random_nc0(6, 30, 2, 7);  // arity 2 < k possible after relabel
    LocalCircuit k3(6, 30, 3, std::vector<CircuitOutput>(c.outputs()));
    CHECK_THROWS_AS(select_dense_sets(k3, 3), ParameterError);
  }
}

TEST_CASE("subspace_union golden nine-AND trace") {
  auto c = nine_and_circuit();
  SolveStats stats;
  auto y = subspace_union(c, {}, &stats);
  CHECK(y.to_string() == "100000000");
  CHECK(stats.branch_count == 3);
  CHECK(stats.iterations == 2);
  CHECK_FALSE(in_range(c, y, kLimit));
}

TEST_CASE("subspace_union certified on seeded instances") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const uint32_t n = 4 + seed % 8;
    auto c = gen_random_nc0(n, 3 * n, 3, seed);
    SolveStats stats;
    auto y = subspace_union(c, {}, &stats);
    CHECK(check_avoid_solution(c, y, kLimit));
    const uint32_t t_bound = (3 * n * n + 3 * n - 1) / (3 * n);
    CHECK(stats.branch_count <= t_bound);
    CHECK(stats.iterations <= 3 * n);
    CHECK(stats.max_step_ratio <= 0.75 + 1e-12);
  }
}

TEST_CASE("subspace_union branch invariant under the test hook") {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    const uint32_t n = 4 + seed % 5;
    auto c = gen_random_nc0(n, 3 * n, 3, 100 + seed);
    SubspaceUnionOptions opt;
    size_t checked = 0;
    opt.observer = [&](const SubspaceUnionStep& step) {
      // every input consistent with the partial assignment lies in the union
      for (uint64_t v = 0; v < (uint64_t{1} << n); ++v) {
        auto x = index_bits(v, n);
        auto out = c.eval(x);
        bool consistent = true;
        for (size_t j = 0; j < c.m() && consistent; ++j)
          if (step.assignment.is_set(j) && out.get(j) != step.assignment.get(j))
            consistent = false;
        if (!consistent) continue;
        bool covered = false;
        for (const auto& u : step.branches)
          if (!u.is_empty() && u.contains(x)) {
            covered = true;
            break;
          }
        CHECK(covered);
      }
      ++checked;
    };
    auto y = subspace_union(c, opt, nullptr);
    CHECK(checked >= 1);
    CHECK(check_avoid_solution(c, y, kLimit));
  }
}

TEST_CASE("subspace_union handles locality 2 and locality 4") {
  // locality 2: the selection degenerates to a single branch
  for (uint64_t seed = 0; seed < 5; ++seed) {
    auto c = gen_random_nc0(4, 6, 2, seed);
    SolveStats stats;
    auto y = subspace_union(c, {}, &stats);
    CHECK(stats.branch_count == 0);
    CHECK(check_avoid_solution(c, y, kLimit));
  }
  // locality 4 branches on pairs
  for (uint64_t seed = 0; seed < 5; ++seed) {
    auto c = gen_random_nc0(6, 108, 4, seed);
    SolveStats stats;
    auto y = subspace_union(c, {}, &stats);
    CHECK(check_avoid_solution(c, y, kLimit));
    CHECK(stats.max_step_ratio <= 0.75 + 1e-12);
  }
}

TEST_CASE("one_subspace pair step with identical read triples") {
  // Outputs 0 and 1 share all three inputs, forcing the three-variable
  // shared-pair analysis on the first iteration.
  std::vector<CircuitOutput> outs;
  outs.push_back({{0, 1, 2}, {0, 0, 0, 0, 0, 0, 0, 1}});  // AND
  outs.push_back({{0, 1, 2}, {0, 1, 1, 0, 1, 0, 0, 1}});  // XOR
  auto base = gen_random_nc0(4, 8, 3, 77);
  for (size_t j = 0; j < 8; ++j) outs.push_back(base.output(j));
  LocalCircuit c(4, 10, 3, std::move(outs));
  auto y = one_subspace(c);
  CHECK(check_avoid_solution(c, y, kLimit));
}

TEST_CASE("brute force wide-output path returns the lexicographic least") {
  auto c = gen_random_nc0(8, 33, 3, 13);  // m > 30 takes the sorted-scan path
  auto y = brute_force_avoid(c, kLimit);
  CHECK_FALSE(in_range(c, y, kLimit));
  // every lexicographically smaller string is in the range
  uint64_t packed = 0;
  for (size_t i = 0; i < y.size(); ++i) packed = (packed << 1) | uint64_t{y.get(i)};
  for (uint64_t v = 0; v < packed; ++v) {
    GF2Vector smaller(33);
    for (size_t i = 0; i < 33; ++i) smaller.set(i, (v >> (32 - i)) & 1);
    CHECK(in_range(c, smaller, kLimit));
  }
}

TEST_CASE("subspace_union respects the branch cap") {
  auto c = gen_random_nc0(10, 30, 3, 3);
  SubspaceUnionOptions opt;
  opt.branch_cap = 4;  // t would be 10
  CHECK_THROWS_AS(subspace_union(c, opt), BudgetError);
}

TEST_CASE("subspace_union stretch preconditions") {
  CHECK_THROWS_AS(subspace_union(gen_random_nc0(6, 17, 3, 1)), StretchError);
  // m > n but below 3n^(k-2)
  auto c = gen_random_nc0(8, 9, 3, 1);
  CHECK_THROWS_AS(subspace_union(c), StretchError);
}

TEST_CASE("subspace_union parallel workers match the serial result") {
  auto c = gen_random_nc0(9, 27, 3, 77);
  SubspaceUnionOptions serial, parallel;
  parallel.workers = 4;
  CHECK(subspace_union(c, serial) == subspace_union(c, parallel));
}

TEST_CASE("one_subspace worked examples") {
  // n=4: m = ceil(C(4,2)/3) + 2*4 = 10
  auto c = gen_random_nc0(4, 10, 3, 21);
  SolveStats stats;
  auto y = one_subspace(c, &stats);
  CHECK(check_avoid_solution(c, y, kLimit));
  CHECK(stats.iterations <= 5);

  // an instance whose first output reads two inputs takes the direct branch
  std::vector<CircuitOutput> outs;
  outs.push_back({{0, 1}, {0, 1, 1, 0}});
  auto base = gen_random_nc0(4, 9, 3, 22);
  for (size_t j = 0; j < 9; ++j) outs.push_back(base.output(j));
  LocalCircuit mixed(4, 10, 3, std::move(outs));
  auto y2 = one_subspace(mixed, &stats);
  CHECK(check_avoid_solution(mixed, y2, kLimit));

  // m one below the bound
  CHECK_THROWS_AS(one_subspace(gen_random_nc0(6, 16, 3, 2)), StretchError);
  CHECK_THROWS_AS(one_subspace(gen_random_nc0(6, 20, 4, 2)), StretchError);
}

TEST_CASE("one_subspace certified on seeded instances") {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    const uint32_t n = 4 + seed % 9;
    const uint32_t m =
        static_cast<uint32_t>((uint64_t{n} * (n - 1) / 2 + 2) / 3 + 2 * n);
    auto c = gen_random_nc0(n, m, 3, seed);
    SolveStats stats;
    auto y = one_subspace(c, &stats);
    CHECK(check_avoid_solution(c, y, kLimit));
    CHECK(stats.iterations <= n + 1);
  }
}

TEST_CASE("solve_degree2 via each strategy") {
  // P(x0) = (x0, x0): avoided set is {01, 10}
  PolyFunction p(1, 2, 2, {PolyOutput{{Monomial{{0}}}}, PolyOutput{{Monomial{{0}}}}});
  for (auto strat : {Degree2Strategy::kBrute, Degree2Strategy::kSubspaceUnion}) {
    auto y = solve_degree2(p, strat, kLimit);
    CHECK((y.to_string() == "01" || y.to_string() == "10"));
    CHECK_FALSE(in_range(p, y, kLimit));
  }
  // the encoded shape is too small for the one-subspace stretch bound
  CHECK_THROWS_AS(solve_degree2(p, Degree2Strategy::kOneSubspace, kLimit),
                  StretchError);

  PolyFunction square(2, 2, 2,
                      {PolyOutput{{Monomial{{0}}}}, PolyOutput{{Monomial{{1}}}}});
  CHECK_THROWS_AS(solve_degree2(square, Degree2Strategy::kBrute, kLimit),
                  StretchError);
}

TEST_CASE("solve_degree2 on random degree-2 maps") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    // cap each output at two monomials so the encoded shape stays enumerable
    auto raw = gen_random_poly(3, 6, 2, seed, 0.35);
    std::vector<PolyOutput> outs;
    for (size_t j = 0; j < raw.m(); ++j) {
      PolyOutput po = raw.output(j);
      if (po.monomials.size() > 2) po.monomials.resize(2);
      outs.push_back(std::move(po));
    }
    PolyFunction p(raw.n(), raw.m(), raw.degree(), std::move(outs));
    if (p.max_terms() == 0) continue;
    auto y = solve_degree2(p, Degree2Strategy::kBrute, kLimit);
    CHECK(check_avoid_solution(p, y, kLimit));
  }
}
