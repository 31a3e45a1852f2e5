#include "avoid/bench.hpp"

#include <chrono>
#include <ostream>

#include "avoid/verify.hpp"

namespace avoid {

uint64_t MRule::apply(uint32_t n) const {
  switch (kind) {
    case Kind::kConst:
      return value;
    case Kind::kLinearN:
      return value * n;
    case Kind::kNPlus:
      return n + value;
    case Kind::kOneSub:
      return (uint64_t{n} * (n - 1) / 2 + 2) / 3 + 2 * uint64_t{n};
  }
  return 0;
}

std::string MRule::text() const {
  switch (kind) {
    case Kind::kConst:
      return std::to_string(value);
    case Kind::kLinearN:
      return std::to_string(value) + "n";
    case Kind::kNPlus:
      return "n+" + std::to_string(value);
    case Kind::kOneSub:
      return "onesub";
  }
  return "?";
}

MRule MRule::parse(const std::string& s) {
  if (s.empty()) throw ParameterError("m-rule: empty rule");
  if (s == "onesub") return {Kind::kOneSub, 0};
  if (s.rfind("n+", 0) == 0) {
    return {Kind::kNPlus, std::stoull(s.substr(2))};
  }
  if (s.back() == 'n') {
    const std::string head = s.substr(0, s.size() - 1);
    if (head.empty()) return {Kind::kLinearN, 1};
    return {Kind::kLinearN, std::stoull(head)};
  }
  if (s.find_first_not_of("0123456789") != std::string::npos)
    throw ParameterError("m-rule: expected <K>, <K>n, n+<K>, or onesub, got '" + s +
                         "'");
  return {Kind::kConst, std::stoull(s)};
}

std::vector<BenchRow> run_bench(uint32_t k, uint32_t n_lo, uint32_t n_hi,
                                const std::vector<MRule>& rules, uint32_t seeds,
                                const std::vector<std::string>& algs,
                                uint64_t seed_base, uint64_t enum_limit,
                                const SubspaceUnionOptions& options) {
  if (n_lo > n_hi) throw ParameterError("run_bench: empty n range");
  if (rules.empty() || algs.empty() || seeds == 0)
    throw ParameterError("run_bench: need at least one rule, algorithm, and seed");
  std::vector<BenchRow> rows;
  for (uint32_t n = n_lo; n <= n_hi; ++n) {
    for (const auto& rule : rules) {
      const uint64_t m = rule.apply(n);
      for (uint32_t s = 0; s < seeds; ++s) {
        const auto instance =
            gen_random_nc0(n, static_cast<uint32_t>(m), k, seed_base + s);
        for (const auto& alg : algs) {
          SolveStats stats;
          GF2Vector y(0);
          const auto start = std::chrono::steady_clock::now();
          if (alg == "brute") {
            y = brute_force_avoid(instance, enum_limit, options.workers);
          } else if (alg == "nc02") {
            y = solve_nc02(instance, &stats);
          } else if (alg == "subspace-union") {
            y = subspace_union(instance, options, &stats);
          } else if (alg == "one-subspace") {
            y = one_subspace(instance, &stats);
          } else {
            throw ParameterError("run_bench: unknown algorithm '" + alg + "'");
          }
          const auto stop = std::chrono::steady_clock::now();
          const uint64_t micros =
              std::chrono::duration_cast<std::chrono::microseconds>(stop - start)
                  .count();
          const bool ok = check_avoid_solution(instance, y, enum_limit);
          rows.push_back(BenchRow{n, static_cast<uint32_t>(m), k, alg,
                                  stats.branch_count, stats.iterations, micros, ok});
        }
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "n,m,k,alg,t,iters,micros,verified\n";
  for (const auto& r : rows)
    out << r.n << "," << r.m << "," << r.k << "," << r.alg << "," << r.t << ","
        << r.iters << "," << r.micros << "," << (r.verified ? 1 : 0) << "\n";
}

}  // namespace avoid
