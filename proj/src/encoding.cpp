#include "avoid/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace avoid {

namespace {

// XOR truth table over `arity` inputs.
std::vector<uint8_t> parity_table(size_t arity) {
  std::vector<uint8_t> t(size_t{1} << arity);
  for (size_t p = 0; p < t.size(); ++p) t[p] = __builtin_popcountll(p) & 1;
  return t;
}

uint64_t binom(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > UINT64_MAX) throw ParameterError("binomial overflow");
  }
  return static_cast<uint64_t>(acc);
}

}  // namespace

EncodingLayout EncodedCircuit::layout() const {
  return EncodingLayout{source.n(), source.m(), terms, source.degree(),
                        nhat,       mhat,       blocks};
}

EncodedCircuit encode_degree_d(const PolyFunction& p) {
  if (p.degree() < 1) throw ParameterError("encode_degree_d: degree must be >= 1");
  const uint32_t k = p.max_terms();
  if (k == 0)
    throw ParameterError("encode_degree_d: at least one output must have a monomial");
  const uint32_t n = p.n();
  const uint32_t m = p.m();
  const uint64_t nhat = n + uint64_t{2 * k - 1} * m;
  const uint64_t mhat = uint64_t{2 * k} * m;

  std::vector<CircuitOutput> outs;
  outs.reserve(mhat);
  std::vector<EncodedBlockLayout> blocks;
  blocks.reserve(m);
  const uint64_t s_base = n + uint64_t{k} * m;

  for (uint32_t i = 0; i < m; ++i) {
    const auto& monos = p.output(i).monomials;
    const uint64_t r_off = n + uint64_t{k} * i;
    const uint64_t s_off = s_base + uint64_t{k - 1} * i;
    blocks.push_back({uint64_t{2 * k} * i, r_off, s_off});

    // First half: T_j(x) + r_j, with T_j = 0 past the real monomials.
    for (uint32_t j = 0; j < k; ++j) {
      const bool real = j < monos.size();
      std::vector<uint32_t> idx;
      if (real) idx = monos[j].vars;
      idx.push_back(static_cast<uint32_t>(r_off + j));  // largest index, stays sorted
      const size_t vars = idx.size() - 1;
      std::vector<uint8_t> table(size_t{1} << idx.size());
      for (size_t pbits = 0; pbits < table.size(); ++pbits) {
        bool prod = real;
        for (size_t v = 0; v < vars && prod; ++v)
          if (!((pbits >> v) & 1)) prod = false;
        const bool rbit = (pbits >> vars) & 1;
        table[pbits] = prod ^ rbit;
      }
      outs.push_back({std::move(idx), std::move(table)});
    }
    // Second half: the r/s chain r_1+s_1, s_1+r_2+s_2, ..., s_{k-1}+r_k.
    for (uint32_t t = 0; t < k; ++t) {
      std::vector<uint32_t> idx;
      if (k == 1) {
        idx = {static_cast<uint32_t>(r_off)};
      } else if (t == 0) {
        idx = {static_cast<uint32_t>(r_off), static_cast<uint32_t>(s_off)};
      } else if (t == k - 1) {
        idx = {static_cast<uint32_t>(r_off + k - 1),
               static_cast<uint32_t>(s_off + k - 2)};
      } else {
        idx = {static_cast<uint32_t>(r_off + t), static_cast<uint32_t>(s_off + t - 1),
               static_cast<uint32_t>(s_off + t)};
      }
      std::vector<uint8_t> table = parity_table(idx.size());
      outs.push_back({std::move(idx), std::move(table)});
    }
  }

  uint32_t locality = 0;
  for (const auto& o : outs)
    locality = std::max<uint32_t>(locality, static_cast<uint32_t>(o.inputs.size()));

  LocalCircuit fhat(static_cast<uint32_t>(nhat), static_cast<uint32_t>(mhat),
                    locality, std::move(outs));
  return EncodedCircuit{std::move(fhat), p, k, std::move(blocks), nhat, mhat};
}

namespace {

GF2Vector decode_blocks(uint32_t m, uint32_t k, uint64_t mhat, const GF2Vector& yhat) {
  if (yhat.size() != mhat)
    throw ParameterError("decode: expected " + std::to_string(mhat) + " bits, got " +
                         std::to_string(yhat.size()));
  GF2Vector y(m);
  for (uint32_t i = 0; i < m; ++i) {
    bool parity = false;
    for (uint32_t j = 0; j < 2 * k; ++j) parity ^= yhat.get(uint64_t{2 * k} * i + j);
    y.set(i, parity);
  }
  return y;
}

}  // namespace

GF2Vector decode(const EncodedCircuit& e, const GF2Vector& yhat) {
  return decode_blocks(e.source.m(), e.terms, e.mhat, yhat);
}

GF2Vector decode_with_layout(const EncodingLayout& layout, const GF2Vector& yhat) {
  return decode_blocks(layout.m, layout.terms, layout.mhat, yhat);
}

std::pair<GF2Vector, GF2Vector> encoding_witness(const EncodedCircuit& e,
                                                 const GF2Vector& x,
                                                 const GF2Vector& yhat) {
  if (x.size() != e.source.n())
    throw ParameterError("encoding_witness: input length must equal n");
  if (decode(e, yhat) != e.source.eval(x))
    throw ParameterError("encoding_witness: decode(yhat) != P(x)");

  const uint32_t k = e.terms;
  const uint32_t m = e.source.m();
  GF2Vector r(uint64_t{k} * m);
  GF2Vector s(uint64_t{k - 1} * m);
  for (uint32_t i = 0; i < m; ++i) {
    const auto& monos = e.source.output(i).monomials;
    const uint64_t off = uint64_t{2 * k} * i;
    std::vector<bool> rv(k), sv(k >= 1 ? k - 1 : 0);
    for (uint32_t j = 0; j < k; ++j) {
      bool term = false;
      if (j < monos.size()) {
        term = true;
        for (uint32_t v : monos[j].vars)
          if (!x.get(v)) {
            term = false;
            break;
          }
      }
      rv[j] = term ^ yhat.get(off + j);
    }
    for (uint32_t t = 0; t + 1 < k; ++t) {
      const bool prev = t == 0 ? rv[0] : (sv[t - 1] ^ rv[t]);
      sv[t] = prev ^ yhat.get(off + k + t);
    }
    for (uint32_t j = 0; j < k; ++j) r.set(uint64_t{k} * i + j, rv[j]);
    for (uint32_t t = 0; t + 1 < k; ++t) s.set(uint64_t{k - 1} * i + t, sv[t]);
  }
  return {std::move(r), std::move(s)};
}

GF2Vector assemble_encoded_input(const EncodedCircuit& e, const GF2Vector& x,
                                 const GF2Vector& r, const GF2Vector& s) {
  const uint32_t k = e.terms;
  const uint32_t m = e.source.m();
  if (x.size() != e.source.n() || r.size() != uint64_t{k} * m ||
      s.size() != uint64_t{k - 1} * m)
    throw ParameterError("assemble_encoded_input: block length mismatch");
  GF2Vector xin(e.nhat);
  uint64_t at = 0;
  for (size_t i = 0; i < x.size(); ++i) xin.set(at++, x.get(i));
  for (size_t i = 0; i < r.size(); ++i) xin.set(at++, r.get(i));
  for (size_t i = 0; i < s.size(); ++i) xin.set(at++, s.get(i));
  return xin;
}

std::string write_layout(const EncodingLayout& layout) {
  std::ostringstream out;
  out << "enclayout v1\n";
  out << "n " << layout.n << "\n";
  out << "m " << layout.m << "\n";
  out << "k " << layout.terms << "\n";
  out << "d " << layout.degree << "\n";
  out << "nhat " << layout.nhat << "\n";
  out << "mhat " << layout.mhat << "\n";
  for (size_t i = 0; i < layout.blocks.size(); ++i) {
    const auto& b = layout.blocks[i];
    out << "block " << i << " out " << b.out_off << " r " << b.r_off << " s "
        << b.s_off << "\n";
  }
  return out.str();
}

EncodingLayout parse_layout(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  EncodingLayout layout;
  size_t num = 0;
  bool saw_magic = false;
  while (std::getline(in, line)) {
    ++num;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (!saw_magic) {
      std::string version;
      if (key != "enclayout" || !(ls >> version) || version != "v1")
        throw ParseError(num, "expected 'enclayout v1' header");
      saw_magic = true;
      continue;
    }
    if (key == "n") ls >> layout.n;
    else if (key == "m") ls >> layout.m;
    else if (key == "k") ls >> layout.terms;
    else if (key == "d") ls >> layout.degree;
    else if (key == "nhat") ls >> layout.nhat;
    else if (key == "mhat") ls >> layout.mhat;
    else if (key == "block") {
      uint64_t idx;
      std::string kw1, kw2, kw3;
      EncodedBlockLayout b{};
      if (!(ls >> idx >> kw1 >> b.out_off >> kw2 >> b.r_off >> kw3 >> b.s_off) ||
          kw1 != "out" || kw2 != "r" || kw3 != "s" || idx != layout.blocks.size())
        throw ParseError(num, "malformed block line");
      layout.blocks.push_back(b);
    } else {
      throw ParseError(num, "unknown key '" + key + "'");
    }
    if (ls.fail()) throw ParseError(num, "malformed value for '" + key + "'");
  }
  if (!saw_magic) throw ParseError(1, "empty layout file");
  if (layout.blocks.size() != layout.m)
    throw ParseError(num, "expected one block line per output");
  if (layout.terms == 0 || layout.mhat != uint64_t{2 * layout.terms} * layout.m)
    throw ParseError(num, "inconsistent shape fields");
  return layout;
}

HypergraphEncoder build_sparse_encoder(uint32_t n, uint32_t s, uint32_t d) {
  if (d < 1) throw ParameterError("build_sparse_encoder: degree must be >= 1");
  if (n < 1) throw ParameterError("build_sparse_encoder: need at least one output");

  // Smallest vertex count (not below d) whose d-subsets cover the n edges.
  uint32_t ell = d;
  while (binom(ell, d) < n) ++ell;

  // Exact form of s < n^(1-1/d) / d:  (s*d)^d < n^(d-1).
  bool within = true;
  {
    unsigned __int128 lhs = 1, rhs = 1;
    for (uint32_t i = 0; i < d; ++i) lhs *= uint64_t{s} * d;
    for (uint32_t i = 0; i + 1 < d; ++i) rhs *= n;
    within = lhs < rhs;
  }

  // First n d-subsets of [ell] in lexicographic order.
  std::vector<std::vector<uint32_t>> edges;
  edges.reserve(n);
  std::vector<uint32_t> combo(d);
  for (uint32_t i = 0; i < d; ++i) combo[i] = i;
  while (edges.size() < n) {
    edges.push_back(combo);
    int64_t i = d - 1;
    while (i >= 0 && combo[i] == ell - d + i) --i;
    if (i < 0) break;
    ++combo[i];
    for (uint32_t t = i + 1; t < d; ++t) combo[t] = combo[t - 1] + 1;
  }

  std::vector<PolyOutput> outs(n);
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t row = 0; row < s; ++row) {
      Monomial mono;
      for (uint32_t v : edges[i]) mono.vars.push_back(row * ell + v);
      outs[i].monomials.push_back(std::move(mono));
    }
  }
  PolyFunction f(s * ell, n, d, std::move(outs));
  return HypergraphEncoder{n, s, d, ell, std::move(edges), std::move(f), within};
}

GF2Vector sparse_witness(const HypergraphEncoder& h, const GF2Vector& y) {
  if (y.size() != h.n)
    throw ParameterError("sparse_witness: target length must equal n");
  if (y.weight() > h.s)
    throw ParameterError("sparse_witness: target weight " +
                         std::to_string(y.weight()) + " exceeds sparsity " +
                         std::to_string(h.s));
  GF2Vector x(uint64_t{h.s} * h.ell);
  uint32_t row = 0;
  for (uint32_t i = 0; i < h.n; ++i) {
    if (!y.get(i)) continue;
    for (uint32_t v : h.edges[i]) x.set(uint64_t{row} * h.ell + v, true);
    ++row;
  }
  return x;
}

RigidInstance build_rigid_instance(uint32_t n, uint32_t r, uint32_t s) {
  const uint32_t root = static_cast<uint32_t>(std::lround(std::sqrt(double(n))));
  if (n == 0 || root * root != n)
    throw ParameterError("build_rigid_instance: n must be a positive perfect square");
  if (r < 1 || r > n)
    throw ParameterError("build_rigid_instance: rank budget must be in [1, n]");
  if (s > n)
    throw ParameterError("build_rigid_instance: row sparsity budget must be at most n");

  HypergraphEncoder enc = build_sparse_encoder(n, s, 2);
  const uint32_t enc_inputs = static_cast<uint32_t>(enc.f.n());
  const uint64_t l_off = 0;
  const uint64_t r_off = uint64_t{n} * r;
  const uint64_t enc_off = uint64_t{2} * n * r;
  const uint64_t total_inputs = enc_off + uint64_t{n} * enc_inputs;

  std::vector<PolyOutput> outs;
  outs.reserve(uint64_t{n} * n);
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = 0; j < n; ++j) {
      PolyOutput po;
      for (uint32_t t = 0; t < r; ++t) {
        Monomial mono;
        mono.vars = {static_cast<uint32_t>(l_off + uint64_t{i} * r + t),
                     static_cast<uint32_t>(r_off + uint64_t{t} * n + j)};
        po.monomials.push_back(std::move(mono));
      }
      const uint64_t block = enc_off + uint64_t{i} * enc_inputs;
      for (const auto& mono : enc.f.output(j).monomials) {
        Monomial shifted;
        for (uint32_t v : mono.vars)
          shifted.vars.push_back(static_cast<uint32_t>(block + v));
        po.monomials.push_back(std::move(shifted));
      }
      outs.push_back(std::move(po));
    }
  }
  PolyFunction g(static_cast<uint32_t>(total_inputs), n * n, 2, std::move(outs));
  const bool within = enc.within_sparsity_bound;
  return RigidInstance{n,     r,     s,       std::move(enc), std::move(g),
                       l_off, r_off, enc_off, enc_inputs,     within};
}

GF2Vector rigid_witness(const RigidInstance& ri, const GF2Matrix& l,
                        const GF2Matrix& r, const GF2Matrix& s) {
  if (l.rows() != ri.n || l.cols() != ri.r)
    throw ParameterError("rigid_witness: L must be n x r");
  if (r.rows() != ri.r || r.cols() != ri.n)
    throw ParameterError("rigid_witness: R must be r x n");
  if (s.rows() != ri.n || s.cols() != ri.n)
    throw ParameterError("rigid_witness: S must be n x n");
  for (size_t i = 0; i < ri.n; ++i)
    if (s.row_weight(i) > ri.s)
      throw ParameterError("rigid_witness: row " + std::to_string(i) +
                           " of S has weight above " + std::to_string(ri.s));

  GF2Vector x(ri.g.n());
  for (uint32_t i = 0; i < ri.n; ++i)
    for (uint32_t t = 0; t < ri.r; ++t)
      x.set(ri.l_off + uint64_t{i} * ri.r + t, l.get(i, t));
  for (uint32_t t = 0; t < ri.r; ++t)
    for (uint32_t j = 0; j < ri.n; ++j)
      x.set(ri.r_off + uint64_t{t} * ri.n + j, r.get(t, j));
  for (uint32_t i = 0; i < ri.n; ++i) {
    GF2Vector labels = sparse_witness(ri.row_encoder, s.row(i));
    for (size_t v = 0; v < labels.size(); ++v)
      x.set(ri.enc_off + uint64_t{i} * ri.enc_inputs + v, labels.get(v));
  }
  return x;
}

}  // namespace avoid
