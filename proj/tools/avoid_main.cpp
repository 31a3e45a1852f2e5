#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "avoid/bench.hpp"
#include "avoid/circuit.hpp"
#include "avoid/encoding.hpp"
#include "avoid/solvers.hpp"
#include "avoid/verify.hpp"

namespace {

using namespace avoid;

// Raised when --verify (or the verify command) catches a point inside the
// range; maps to exit code 5.
struct VerificationFailure {
  std::string message;
};

struct Report {
  std::vector<std::pair<std::string, std::string>> kv;
  void add(const std::string& k, const std::string& v) { kv.emplace_back(k, v); }
  void add(const std::string& k, uint64_t v) { kv.emplace_back(k, std::to_string(v)); }
  void print() const {
    for (const auto& [k, v] : kv) std::cout << k << "=" << v << "\n";
  }
};

uint64_t env_u64(const char* name, uint64_t fallback) {
  const char* raw = std::getenv(name);
  if (!raw || !*raw) return fallback;
  try {
    return std::stoull(raw);
  } catch (...) {
    throw ParameterError(std::string(name) + ": cannot parse '" + raw + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write '" + path + "'");
  out << content;
}

// First significant token decides between the two instance formats.
std::string sniff_format(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    if (ls >> tok) return tok;
  }
  return "";
}

struct Instance {
  std::optional<LocalCircuit> circuit;
  std::optional<PolyFunction> poly;
  uint32_t n() const { return circuit ? circuit->n() : poly->n(); }
  uint32_t m() const { return circuit ? circuit->m() : poly->m(); }
  uint32_t k_or_d() const { return circuit ? circuit->k() : poly->degree(); }
};

Instance load_instance(const std::string& text) {
  const std::string kind = sniff_format(text);
  Instance inst;
  if (kind == "nc0")
    inst.circuit = parse_nc0(text);
  else if (kind == "poly")
    inst.poly = parse_poly(text);
  else
    throw ParameterError("input is neither an nc0 nor a poly file");
  return inst;
}

void add_seed_report(Report& report, const std::string& text) {
  for (const auto& comment : scan_header_comments(text)) {
    std::istringstream ls(comment);
    std::string tok;
    while (ls >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      if (key == "rng" || key == "seed" || key == "gen")
        report.add(key, tok.substr(eq + 1));
    }
  }
}

struct SolveArgs {
  std::string alg;
  std::string in;
  std::string out;
  std::string inner_alg = "brute";
  bool verify = false;
  bool seed_report = false;
  bool fallback_brute = false;
  uint32_t workers = 1;
  uint64_t limit = 0;
  uint32_t max_branches = 0;
};

Degree2Strategy parse_inner(const std::string& s) {
  if (s == "brute") return Degree2Strategy::kBrute;
  if (s == "subspace-union") return Degree2Strategy::kSubspaceUnion;
  if (s == "one-subspace") return Degree2Strategy::kOneSubspace;
  throw ParameterError("unknown inner strategy '" + s + "'");
}

int exit_of(const Error& e) {
  if (dynamic_cast<const BudgetError*>(&e)) return 4;
  if (dynamic_cast<const StretchError*>(&e)) return 3;
  if (dynamic_cast<const ParameterError*>(&e)) return 2;
  return 1;
}

int cmd_solve_inner(const SolveArgs& args, Report& report) {
  const std::string text = read_file(args.in);
  Instance inst = load_instance(text);
  report.add("n", inst.n());
  report.add("m", inst.m());
  report.add(inst.circuit ? "k" : "d", inst.k_or_d());
  if (args.seed_report) add_seed_report(report, text);

  SubspaceUnionOptions opt;
  opt.workers = args.workers;
  opt.branch_cap = args.max_branches;
  SolveStats stats;
  GF2Vector y(0);

  const auto start = std::chrono::steady_clock::now();
  if (args.alg == "brute") {
    y = inst.circuit ? brute_force_avoid(*inst.circuit, args.limit, args.workers)
                     : brute_force_avoid(*inst.poly, args.limit, args.workers);
  } else if (args.alg == "degree2") {
    if (!inst.poly) throw ParameterError("--alg degree2 needs a poly instance");
    y = solve_degree2(*inst.poly, parse_inner(args.inner_alg), args.limit, opt,
                      &stats);
    report.add("inner-alg", args.inner_alg);
  } else {
    if (!inst.circuit)
      throw ParameterError("--alg " + args.alg + " needs an nc0 instance");
    if (args.alg == "nc02") {
      y = solve_nc02(*inst.circuit, &stats);
    } else if (args.alg == "subspace-union") {
      try {
        y = subspace_union(*inst.circuit, opt, &stats);
      } catch (const BudgetError&) {
        if (!args.fallback_brute) throw;
        report.add("fallback", "brute");
        y = brute_force_avoid(*inst.circuit, args.limit, args.workers);
        stats = {};
      }
    } else if (args.alg == "one-subspace") {
      y = one_subspace(*inst.circuit, &stats);
    } else {
      throw ParameterError("unknown algorithm '" + args.alg + "'");
    }
  }
  const auto stop = std::chrono::steady_clock::now();

  report.add("t", stats.branch_count);
  report.add("iterations", stats.iterations);
  report.add("micros",
             std::chrono::duration_cast<std::chrono::microseconds>(stop - start)
                 .count());
  if (!args.out.empty()) {
    write_file(args.out, write_vec(y));
    report.add("out", args.out);
  } else {
    report.add("y", y.to_string());
  }
  if (args.verify) {
    const bool avoided =
        inst.circuit ? check_avoid_solution(*inst.circuit, y, args.limit)
                     : check_avoid_solution(*inst.poly, y, args.limit);
    report.add("verified", avoided ? "true" : "false");
    if (!avoided) {
      report.add("status", "error");
      report.print();
      throw VerificationFailure{"solver output lies inside the range"};
    }
  }
  report.add("status", "ok");
  report.print();
  return 0;
}

int cmd_solve(const SolveArgs& args) {
  Report report;
  report.add("command", "solve");
  report.add("alg", args.alg);
  report.add("in", args.in);
  try {
    return cmd_solve_inner(args, report);
  } catch (const Error& e) {
    report.add("status", "error");
    report.add("error", e.what());
    report.print();
    return exit_of(e);
  }
}

int emit_generated(const std::string& content, const std::string& out,
                   Report report) {
  if (out.empty()) {
    std::cout << content;
    return 0;
  }
  write_file(out, content);
  report.add("out", out);
  report.add("status", "ok");
  report.print();
  return 0;
}

struct VerifyArgs {
  std::string circuit;
  std::string point;
  uint64_t limit = 0;
};

int cmd_verify(const VerifyArgs& args) {
  Report report;
  report.add("command", "verify");
  report.add("circuit", args.circuit);
  report.add("point", args.point);
  Instance inst = load_instance(read_file(args.circuit));
  GF2Vector y = parse_vec(read_file(args.point));
  const bool avoided = inst.circuit
                           ? check_avoid_solution(*inst.circuit, y, args.limit)
                           : check_avoid_solution(*inst.poly, y, args.limit);
  report.add("in_range", avoided ? "false" : "true");
  report.add("status", avoided ? "ok" : "error");
  report.print();
  if (!avoided) throw VerificationFailure{"point lies inside the range"};
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"range-avoidance solvers, encodings, and oracles over GF(2)"};
  app.require_subcommand(1);

  const uint64_t default_limit = env_u64("AVOID_ENUM_LIMIT", uint64_t{1} << 24);
  const uint32_t default_branch_cap =
      static_cast<uint32_t>(env_u64("AVOID_BRANCH_CAP", 26));

  // solve
  SolveArgs solve_args;
  solve_args.limit = default_limit;
  solve_args.max_branches = default_branch_cap;
  auto* solve = app.add_subcommand("solve", "find a point outside a range");
  solve->add_option("--alg", solve_args.alg,
                    "brute | nc02 | subspace-union | one-subspace | degree2")
      ->required();
  solve->add_option("--in", solve_args.in, "instance file (.nc0 or .poly)")
      ->required();
  solve->add_option("--out", solve_args.out, "write the avoided point here (.vec)");
  solve->add_option("--inner-alg", solve_args.inner_alg,
                    "strategy for the encoded instance under --alg degree2");
  solve->add_flag("--verify", solve_args.verify, "run the exhaustive oracle");
  solve->add_flag("--seed-report", solve_args.seed_report,
                  "echo generator metadata from the input header");
  solve->add_flag("--fallback-brute", solve_args.fallback_brute,
                  "fall back to brute force when the branch cap is exceeded");
  solve->add_option("--max-branches", solve_args.max_branches, "branch cap (t)");
  solve->add_option("--workers", solve_args.workers, "worker threads");
  solve->add_option("--limit", solve_args.limit, "enumeration limit");

  // gen
  auto* gen = app.add_subcommand("gen", "generate instances");
  gen->require_subcommand(1);
  struct {
    uint32_t n = 0, m = 0, k = 0;
    uint64_t seed = 0;
    std::string out;
  } gnc;
  auto* gen_nc0 = gen->add_subcommand("random-nc0", "seeded local circuit");
  gen_nc0->add_option("--n", gnc.n)->required();
  gen_nc0->add_option("--m", gnc.m)->required();
  gen_nc0->add_option("--k", gnc.k)->required();
  gen_nc0->add_option("--seed", gnc.seed)->required();
  gen_nc0->add_option("--out", gnc.out);

  struct {
    uint32_t n = 0, m = 0, d = 0;
    uint64_t seed = 0;
    double prob = 0.5;
    std::string out;
  } gpoly;
  auto* gen_poly = gen->add_subcommand("random-poly", "seeded polynomial map");
  gen_poly->add_option("--n", gpoly.n)->required();
  gen_poly->add_option("--m", gpoly.m)->required();
  gen_poly->add_option("--d", gpoly.d)->required();
  gen_poly->add_option("--seed", gpoly.seed)->required();
  gen_poly->add_option("--prob", gpoly.prob, "per-monomial inclusion probability");
  gen_poly->add_option("--out", gpoly.out);

  struct {
    uint32_t n = 0, s = 0, d = 2;
    std::string out;
  } gsparse;
  auto* gen_sparse = gen->add_subcommand("sparse-encoder", "hypergraph encoder");
  gen_sparse->add_option("--n", gsparse.n)->required();
  gen_sparse->add_option("--s", gsparse.s)->required();
  gen_sparse->add_option("--d", gsparse.d)->required();
  gen_sparse->add_option("--out", gsparse.out);

  struct {
    uint32_t n = 0, r = 0, s = 0;
    std::string out;
  } grigid;
  auto* gen_rigid = gen->add_subcommand("rigid", "degree-2 rigid-matrix instance");
  gen_rigid->add_option("--n", grigid.n)->required();
  gen_rigid->add_option("--r", grigid.r)->required();
  gen_rigid->add_option("--s", grigid.s)->required();
  gen_rigid->add_option("--out", grigid.out);

  // encode / decode
  struct {
    std::string in, out, layout;
  } enc;
  auto* encode = app.add_subcommand("encode", "degree-d map to locality d+1");
  encode->add_option("--in", enc.in)->required();
  encode->add_option("--out", enc.out)->required();
  encode->add_option("--layout", enc.layout)->required();

  struct {
    std::string layout, in, out;
  } dec;
  auto* decode_cmd = app.add_subcommand("decode", "block parity of an encoded point");
  decode_cmd->add_option("--layout", dec.layout)->required();
  decode_cmd->add_option("--in", dec.in)->required();
  decode_cmd->add_option("--out", dec.out);

  // verify
  VerifyArgs verify_args;
  verify_args.limit = default_limit;
  auto* verify = app.add_subcommand("verify", "exhaustive avoidance check");
  verify->add_option("--circuit", verify_args.circuit)->required();
  verify->add_option("--point", verify_args.point)->required();
  verify->add_option("--limit", verify_args.limit);

  // rigid-pipeline
  struct {
    uint32_t n = 0, r = 0, s = 0;
    std::string alg = "brute";
    std::string cert, out;
    uint64_t limit = 0, budget = uint64_t{1} << 26;
    uint32_t workers = 1, max_branches = 26;
  } pipe;
  pipe.limit = default_limit;
  pipe.max_branches = default_branch_cap;
  auto* pipeline =
      app.add_subcommand("rigid-pipeline", "build, solve, and certify a rigid matrix");
  pipeline->add_option("--n", pipe.n)->required();
  pipeline->add_option("--r", pipe.r)->required();
  pipeline->add_option("--s", pipe.s)->required();
  pipeline->add_option("--alg", pipe.alg, "brute | subspace-union | one-subspace");
  pipeline->add_option("--cert", pipe.cert, "certificate output file");
  pipeline->add_option("--out", pipe.out, "matrix output file (rows of bits)");
  pipeline->add_option("--limit", pipe.limit);
  pipeline->add_option("--budget", pipe.budget, "rigidity search budget");
  pipeline->add_option("--workers", pipe.workers);
  pipeline->add_option("--max-branches", pipe.max_branches);

  // bench
  struct {
    uint32_t k = 3;
    std::string n_range;
    std::string m_rule;
    uint32_t seeds = 1;
    std::string algs = "subspace-union";
    std::string csv;
    uint64_t seed_base = 0;
    uint32_t workers = 1;
    uint64_t limit = 0;
  } bench;
  bench.limit = default_limit;
  auto* bench_cmd = app.add_subcommand("bench", "timing sweep over seeded instances");
  bench_cmd->add_option("--k", bench.k)->required();
  bench_cmd->add_option("--n-range", bench.n_range, "lo:hi")->required();
  bench_cmd->add_option("--m-rule", bench.m_rule, "comma list of <K>|<K>n|n+<K>|onesub")
      ->required();
  bench_cmd->add_option("--seeds", bench.seeds)->required();
  bench_cmd->add_option("--algs", bench.algs, "comma list of solvers");
  bench_cmd->add_option("--csv", bench.csv, "CSV output file");
  bench_cmd->add_option("--seed-base", bench.seed_base);
  bench_cmd->add_option("--workers", bench.workers);
  bench_cmd->add_option("--limit", bench.limit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_args);

    if (gen_nc0->parsed()) {
      auto c = gen_random_nc0(gnc.n, gnc.m, gnc.k, gnc.seed);
      std::vector<std::string> header = {
          std::string("rng=") + SplitRng::kScheme + " seed=" + std::to_string(gnc.seed),
          "gen=random-nc0 n=" + std::to_string(gnc.n) + " m=" + std::to_string(gnc.m) +
              " k=" + std::to_string(gnc.k)};
      Report r;
      r.add("command", "gen random-nc0");
      return emit_generated(write_nc0(c, header), gnc.out, std::move(r));
    }
    if (gen_poly->parsed()) {
      auto p = gen_random_poly(gpoly.n, gpoly.m, gpoly.d, gpoly.seed, gpoly.prob);
      std::vector<std::string> header = {
          std::string("rng=") + SplitRng::kScheme +
              " seed=" + std::to_string(gpoly.seed),
          "gen=random-poly n=" + std::to_string(gpoly.n) +
              " m=" + std::to_string(gpoly.m) + " d=" + std::to_string(gpoly.d)};
      Report r;
      r.add("command", "gen random-poly");
      return emit_generated(write_poly(p, header), gpoly.out, std::move(r));
    }
    if (gen_sparse->parsed()) {
      auto h = build_sparse_encoder(gsparse.n, gsparse.s, gsparse.d);
      std::vector<std::string> header = {
          "gen=sparse-encoder n=" + std::to_string(gsparse.n) +
          " s=" + std::to_string(gsparse.s) + " d=" + std::to_string(gsparse.d) +
          " ell=" + std::to_string(h.ell)};
      if (!h.within_sparsity_bound)
        std::cerr << "warning: sparsity " << gsparse.s
                  << " is outside the bound s < n^(1-1/d)/d; the encoder is "
                     "still complete for all targets of weight <= s\n";
      Report r;
      r.add("command", "gen sparse-encoder");
      return emit_generated(write_poly(h.f, header), gsparse.out, std::move(r));
    }
    if (gen_rigid->parsed()) {
      auto ri = build_rigid_instance(grigid.n, grigid.r, grigid.s);
      std::vector<std::string> header = {
          "gen=rigid n=" + std::to_string(grigid.n) + " r=" + std::to_string(grigid.r) +
          " s=" + std::to_string(grigid.s)};
      if (!ri.within_sparsity_bound)
        std::cerr << "warning: sparsity " << grigid.s
                  << " is outside the bound s < sqrt(n)/2 the reduction assumes "
                     "asymptotically\n";
      Report r;
      r.add("command", "gen rigid");
      return emit_generated(write_poly(ri.g, header), grigid.out, std::move(r));
    }

    if (encode->parsed()) {
      auto text = read_file(enc.in);
      if (sniff_format(text) != "poly")
        throw ParameterError("encode expects a poly instance");
      auto e = encode_degree_d(parse_poly(text));
      write_file(enc.out, write_nc0(e.fhat));
      write_file(enc.layout, write_layout(e.layout()));
      Report r;
      r.add("command", "encode");
      r.add("in", enc.in);
      r.add("out", enc.out);
      r.add("layout", enc.layout);
      r.add("nhat", e.nhat);
      r.add("mhat", e.mhat);
      r.add("terms", e.terms);
      r.add("status", "ok");
      r.print();
      return 0;
    }
    if (decode_cmd->parsed()) {
      auto layout = parse_layout(read_file(dec.layout));
      auto yhat = parse_vec(read_file(dec.in));
      auto y = decode_with_layout(layout, yhat);
      if (dec.out.empty()) {
        std::cout << write_vec(y);
      } else {
        write_file(dec.out, write_vec(y));
        Report r;
        r.add("command", "decode");
        r.add("out", dec.out);
        r.add("status", "ok");
        r.print();
      }
      return 0;
    }

    if (verify->parsed()) return cmd_verify(verify_args);

    if (pipeline->parsed()) {
      PipelineStrategy strat;
      if (pipe.alg == "brute")
        strat = PipelineStrategy::kBrute;
      else if (pipe.alg == "subspace-union")
        strat = PipelineStrategy::kSubspaceUnion;
      else if (pipe.alg == "one-subspace")
        strat = PipelineStrategy::kOneSubspace;
      else
        throw ParameterError("unknown pipeline strategy '" + pipe.alg + "'");
      SubspaceUnionOptions opt;
      opt.workers = pipe.workers;
      opt.branch_cap = pipe.max_branches;
      const auto start = std::chrono::steady_clock::now();
      auto res =
          rigid_pipeline(pipe.n, pipe.r, pipe.s, strat, pipe.limit, pipe.budget, opt);
      const auto stop = std::chrono::steady_clock::now();
      Report r;
      r.add("command", "rigid-pipeline");
      r.add("n", pipe.n);
      r.add("r", pipe.r);
      r.add("s", pipe.s);
      r.add("alg", pipe.alg);
      r.add("instance_inputs", res.instance_inputs);
      r.add("instance_outputs", res.instance_outputs);
      r.add("micros",
            std::chrono::duration_cast<std::chrono::microseconds>(stop - start)
                .count());
      r.add("verdict",
            res.cert.verdict == RigidVerdict::kRigid ? "rigid" : "nonrigid");
      if (!pipe.cert.empty()) {
        write_file(pipe.cert, write_certificate(res.cert));
        r.add("cert", pipe.cert);
      }
      if (!pipe.out.empty()) {
        write_file(pipe.out, res.matrix.to_string());
        r.add("out", pipe.out);
      }
      r.add("status", "ok");
      r.print();
      return 0;
    }

    if (bench_cmd->parsed()) {
      const auto colon = bench.n_range.find(':');
      if (colon == std::string::npos) throw ParameterError("--n-range expects lo:hi");
      const uint32_t lo = std::stoul(bench.n_range.substr(0, colon));
      const uint32_t hi = std::stoul(bench.n_range.substr(colon + 1));
      std::vector<MRule> rules;
      {
        std::istringstream ls(bench.m_rule);
        std::string tok;
        while (std::getline(ls, tok, ',')) rules.push_back(MRule::parse(tok));
      }
      std::vector<std::string> algs;
      {
        std::istringstream ls(bench.algs);
        std::string tok;
        while (std::getline(ls, tok, ',')) algs.push_back(tok);
      }
      SubspaceUnionOptions opt;
      opt.workers = bench.workers;
      auto rows = run_bench(bench.k, lo, hi, rules, bench.seeds, algs,
                            bench.seed_base, bench.limit, opt);
      if (bench.csv.empty()) {
        write_bench_csv(std::cout, rows);
      } else {
        std::ostringstream buf;
        write_bench_csv(buf, rows);
        write_file(bench.csv, buf.str());
        Report r;
        r.add("command", "bench");
        r.add("rows", rows.size());
        r.add("csv", bench.csv);
        r.add("status", "ok");
        r.print();
      }
      return 0;
    }
  } catch (const VerificationFailure& e) {
    std::cerr << "error: " << e.message << "\n";
    return 5;
  } catch (const BudgetError& e) {
    std::cout << "status=error\nerror=" << e.what() << "\n";
    return 4;
  } catch (const StretchError& e) {
    std::cout << "status=error\nerror=" << e.what() << "\n";
    return 3;
  } catch (const ParameterError& e) {
    std::cout << "status=error\nerror=" << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cout << "status=error\nerror=" << e.what() << "\n";
    return 1;
  }
  return 2;
}
