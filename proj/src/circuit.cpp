#include "avoid/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace avoid {

namespace {

bool sorted_distinct(const std::vector<uint32_t>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i - 1] >= v[i]) return false;
  return true;
}

}  // namespace

LocalCircuit::LocalCircuit(uint32_t n, uint32_t m, uint32_t k,
                           std::vector<CircuitOutput> outputs)
    : n_(n), m_(m), k_(k), outputs_(std::move(outputs)) {
  if (outputs_.size() != m_)
    throw ParameterError("LocalCircuit: expected " + std::to_string(m_) +
                         " outputs, got " + std::to_string(outputs_.size()));
  for (size_t j = 0; j < outputs_.size(); ++j) {
    const auto& out = outputs_[j];
    if (out.inputs.size() > k_)
      throw ParameterError("output " + std::to_string(j) + " reads " +
                           std::to_string(out.inputs.size()) +
                           " inputs, above the locality bound " + std::to_string(k_));
    if (!sorted_distinct(out.inputs))
      throw ParameterError("output " + std::to_string(j) +
                           ": input indices must be sorted and distinct");
    if (!out.inputs.empty() && out.inputs.back() >= n_)
      throw ParameterError("output " + std::to_string(j) + ": input index out of range");
    if (out.table.size() != (size_t{1} << out.inputs.size()))
      throw ParameterError("output " + std::to_string(j) + ": truth table must have 2^" +
                           std::to_string(out.inputs.size()) + " entries");
    for (uint8_t b : out.table)
      if (b > 1)
        throw ParameterError("output " + std::to_string(j) + ": table entries must be bits");
  }
}

uint32_t LocalCircuit::max_arity() const {
  size_t k = 0;
  for (const auto& out : outputs_) k = std::max(k, out.inputs.size());
  return static_cast<uint32_t>(k);
}

bool LocalCircuit::eval_output(size_t j, const GF2Vector& x) const {
  const auto& out = outputs_[j];
  size_t p = 0;
  for (size_t i = 0; i < out.inputs.size(); ++i)
    p |= size_t{x.get(out.inputs[i])} << i;
  return out.table[p];
}

GF2Vector LocalCircuit::eval(const GF2Vector& x) const {
  if (x.size() != n_) throw ParameterError("eval: input length must equal n");
  GF2Vector y(m_);
  for (size_t j = 0; j < m_; ++j) y.set(j, eval_output(j, x));
  return y;
}

PolyFunction::PolyFunction(uint32_t n, uint32_t m, uint32_t d,
                           std::vector<PolyOutput> outputs)
    : n_(n), m_(m), d_(d), outputs_(std::move(outputs)) {
  if (outputs_.size() != m_)
    throw ParameterError("PolyFunction: expected " + std::to_string(m_) +
                         " outputs, got " + std::to_string(outputs_.size()));
  for (size_t j = 0; j < outputs_.size(); ++j) {
    auto& monos = outputs_[j].monomials;
    for (const auto& mono : monos) {
      if (!sorted_distinct(mono.vars))
        throw ParameterError("output " + std::to_string(j) +
                             ": monomial variables must be sorted and distinct");
      if (!mono.vars.empty() && mono.vars.back() >= n_)
        throw ParameterError("output " + std::to_string(j) + ": variable index out of range");
      if (mono.vars.size() > d_)
        throw ParameterError("output " + std::to_string(j) + ": monomial degree above " +
                             std::to_string(d_));
    }
    std::sort(monos.begin(), monos.end());
    if (std::adjacent_find(monos.begin(), monos.end()) != monos.end())
      throw ParameterError("output " + std::to_string(j) + ": duplicate monomials");
  }
}

uint32_t PolyFunction::max_terms() const {
  size_t k = 0;
  for (const auto& out : outputs_) k = std::max(k, out.monomials.size());
  return static_cast<uint32_t>(k);
}

bool PolyFunction::eval_output(size_t j, const GF2Vector& x) const {
  bool acc = false;
  for (const auto& mono : outputs_[j].monomials) {
    bool prod = true;
    for (uint32_t v : mono.vars) {
      if (!x.get(v)) {
        prod = false;
        break;
      }
    }
    acc ^= prod;
  }
  return acc;
}

GF2Vector PolyFunction::eval(const GF2Vector& x) const {
  if (x.size() != n_) throw ParameterError("eval: input length must equal n");
  GF2Vector y(m_);
  for (size_t j = 0; j < m_; ++j) y.set(j, eval_output(j, x));
  return y;
}

void PartialAssignment::set(size_t i, bool val) {
  if (v_[i] != kUnset)
    throw Error("PartialAssignment: position " + std::to_string(i) +
                " assigned twice");
  v_[i] = val ? 1 : 0;
}

size_t PartialAssignment::assigned_count() const {
  size_t c = 0;
  for (int8_t v : v_) c += (v != kUnset);
  return c;
}

GF2Vector PartialAssignment::to_vector(bool fill) const {
  GF2Vector y(v_.size());
  for (size_t i = 0; i < v_.size(); ++i)
    y.set(i, v_[i] == kUnset ? fill : v_[i] == 1);
  return y;
}

bool TwoLocalFunction::eval(bool xi, bool xj) const {
  switch (kind) {
    case Kind::kConstant:
      return c;
    case Kind::kAffine:
      return (a1 && xi) ^ (a2 && xj) ^ c;
    case Kind::kQuadratic:
      return ((xi ^ a1) && (xj ^ a2)) ^ c;
  }
  return false;
}

TwoLocalFunction classify_two_local(const std::vector<uint8_t>& table,
                                    const std::vector<uint32_t>& indices) {
  TwoLocalFunction f;
  if (table.size() == 1) {
    if (!indices.empty()) throw ParameterError("classify: arity/table mismatch");
    f.kind = TwoLocalFunction::Kind::kConstant;
    f.c = table[0];
    return f;
  }
  if (table.size() == 2) {
    if (indices.size() != 1) throw ParameterError("classify: arity/table mismatch");
    const bool c = table[0];
    const bool a = table[0] ^ table[1];
    if (!a) {
      f.kind = TwoLocalFunction::Kind::kConstant;
      f.c = c;
      return f;
    }
    f.kind = TwoLocalFunction::Kind::kAffine;
    f.i = static_cast<int32_t>(indices[0]);
    f.a1 = true;
    f.c = c;
    return f;
  }
  if (table.size() == 4) {
    if (indices.size() != 2) throw ParameterError("classify: arity/table mismatch");
    // ANF: q*x1*x2 + a1*x1 + a2*x2 + c
    const bool c = table[0];
    const bool a1 = table[0] ^ table[1];
    const bool a2 = table[0] ^ table[2];
    const bool q = table[0] ^ table[1] ^ table[2] ^ table[3];
    if (q) {
      // x1*x2 + a1*x1 + a2*x2 + c == (x1 + a2)(x2 + a1) + c + a1*a2
      f.kind = TwoLocalFunction::Kind::kQuadratic;
      f.i = static_cast<int32_t>(indices[0]);
      f.j = static_cast<int32_t>(indices[1]);
      f.a1 = a2;
      f.a2 = a1;
      f.c = c ^ (a1 && a2);
      return f;
    }
    if (!a1 && !a2) {
      f.kind = TwoLocalFunction::Kind::kConstant;
      f.c = c;
      return f;
    }
    f.kind = TwoLocalFunction::Kind::kAffine;
    f.i = static_cast<int32_t>(indices[0]);
    f.j = static_cast<int32_t>(indices[1]);
    f.a1 = a1;
    f.a2 = a2;
    f.c = c;
    return f;
  }
  throw ParameterError("classify: truth table must have 1, 2, or 4 entries");
}

LocalCircuit pad_to_arity(const LocalCircuit& c, uint32_t arity) {
  if (c.n() < arity)
    throw ParameterError("pad_to_arity: need n >= " + std::to_string(arity));
  std::vector<CircuitOutput> outs;
  outs.reserve(c.m());
  for (size_t j = 0; j < c.m(); ++j) {
    const auto& out = c.output(j);
    if (out.inputs.size() > arity)
      throw ParameterError("pad_to_arity: output " + std::to_string(j) +
                           " already reads more than " + std::to_string(arity));
    if (out.inputs.size() == arity) {
      outs.push_back(out);
      continue;
    }
    std::vector<uint32_t> merged = out.inputs;
    for (uint32_t cand = 0; merged.size() < arity; ++cand) {
      if (!std::binary_search(out.inputs.begin(), out.inputs.end(), cand))
        merged.push_back(cand);
    }
    std::sort(merged.begin(), merged.end());
    // Position of each original input inside the padded list.
    std::vector<size_t> pos(out.inputs.size());
    for (size_t i = 0; i < out.inputs.size(); ++i)
      pos[i] = std::lower_bound(merged.begin(), merged.end(), out.inputs[i]) -
               merged.begin();
    std::vector<uint8_t> table(size_t{1} << arity);
    for (size_t p = 0; p < table.size(); ++p) {
      size_t orig = 0;
      for (size_t i = 0; i < pos.size(); ++i) orig |= ((p >> pos[i]) & 1) << i;
      table[p] = out.table[orig];
    }
    outs.push_back({std::move(merged), std::move(table)});
  }
  return LocalCircuit(c.n(), c.m(), arity, std::move(outs));
}

LocalCircuit restrict_inputs(const LocalCircuit& c,
                             const std::vector<std::pair<uint32_t, bool>>& fixing) {
  std::vector<int8_t> fixed(c.n(), -1);
  for (const auto& [idx, bit] : fixing) {
    if (idx >= c.n())
      throw ParameterError("restrict_inputs: index " + std::to_string(idx) +
                           " out of range");
    if (fixed[idx] != -1)
      throw ParameterError("restrict_inputs: index " + std::to_string(idx) +
                           " fixed twice");
    fixed[idx] = bit ? 1 : 0;
  }
  std::vector<CircuitOutput> outs;
  outs.reserve(c.m());
  for (size_t j = 0; j < c.m(); ++j) {
    const auto& out = c.output(j);
    std::vector<uint32_t> kept;
    std::vector<size_t> kept_pos;
    size_t fixed_bits = 0;
    for (size_t i = 0; i < out.inputs.size(); ++i) {
      if (fixed[out.inputs[i]] == -1) {
        kept.push_back(out.inputs[i]);
        kept_pos.push_back(i);
      } else if (fixed[out.inputs[i]] == 1) {
        fixed_bits |= size_t{1} << i;
      }
    }
    std::vector<uint8_t> table(size_t{1} << kept.size());
    for (size_t q = 0; q < table.size(); ++q) {
      size_t p = fixed_bits;
      for (size_t i = 0; i < kept_pos.size(); ++i) p |= ((q >> i) & 1) << kept_pos[i];
      table[q] = out.table[p];
    }
    outs.push_back({std::move(kept), std::move(table)});
  }
  return LocalCircuit(c.n(), c.m(), c.k(), std::move(outs));
}

namespace {

// Lines with comments stripped; blank lines dropped. Keeps 1-based numbers.
struct NumberedLine {
  size_t number;
  std::string text;
};

std::vector<NumberedLine> significant_lines(const std::string& text) {
  std::vector<NumberedLine> out;
  std::istringstream in(text);
  std::string line;
  size_t num = 0;
  while (std::getline(in, line)) {
    ++num;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back({num, line});
  }
  return out;
}

uint64_t parse_uint(const std::string& tok, size_t line, const char* what) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError(line, std::string("expected a non-negative integer for ") + what +
                               ", got '" + tok + "'");
  return std::stoull(tok);
}

std::vector<std::string> tokens_of(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

// Splits "<j>: <middle> : <tail>" style lines on ':' into exactly `parts`.
std::vector<std::string> split_colons(const std::string& s, size_t parts,
                                      size_t line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i + 1 < parts; ++i) {
    size_t colon = s.find(':', start);
    if (colon == std::string::npos)
      throw ParseError(line, "expected " + std::to_string(parts - 1) +
                                 " ':' separators");
    out.push_back(s.substr(start, colon - start));
    start = colon + 1;
  }
  if (s.find(':', start) != std::string::npos)
    throw ParseError(line, "too many ':' separators");
  out.push_back(s.substr(start));
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

LocalCircuit parse_nc0(const std::string& text) {
  auto lines = significant_lines(text);
  if (lines.empty()) throw ParseError(1, "empty input");
  auto header = tokens_of(lines[0].text);
  if (header.size() != 4 || header[0] != "nc0")
    throw ParseError(lines[0].number, "expected header 'nc0 <n> <m> <k>'");
  const auto n = static_cast<uint32_t>(parse_uint(header[1], lines[0].number, "n"));
  const auto m = static_cast<uint32_t>(parse_uint(header[2], lines[0].number, "m"));
  const auto k = static_cast<uint32_t>(parse_uint(header[3], lines[0].number, "k"));
  if (lines.size() != 1 + m)
    throw ParseError(lines.back().number,
                     "expected " + std::to_string(m) + " output lines, found " +
                         std::to_string(lines.size() - 1));
  std::vector<CircuitOutput> outs;
  outs.reserve(m);
  for (uint32_t j = 0; j < m; ++j) {
    const auto& ln = lines[1 + j];
    auto parts = split_colons(ln.text, 3, ln.number);
    if (parse_uint(trim(parts[0]), ln.number, "output index") != j)
      throw ParseError(ln.number, "output lines must be numbered 0.." +
                                      std::to_string(m - 1) + " in order");
    std::vector<uint32_t> idx;
    for (const auto& tok : tokens_of(parts[1]))
      idx.push_back(static_cast<uint32_t>(parse_uint(tok, ln.number, "input index")));
    auto bit_toks = tokens_of(parts[2]);
    std::string bits;
    for (const auto& t : bit_toks) bits += t;
    if (bits.size() != (size_t{1} << idx.size()))
      throw ParseError(ln.number, "truth table must have 2^" +
                                      std::to_string(idx.size()) + " bits, got " +
                                      std::to_string(bits.size()));
    std::vector<uint8_t> table(bits.size());
    for (size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] != '0' && bits[i] != '1')
        throw ParseError(ln.number, "truth table must be 0/1 characters");
      table[i] = bits[i] == '1';
    }
    outs.push_back({std::move(idx), std::move(table)});
  }
  try {
    return LocalCircuit(n, m, k, std::move(outs));
  } catch (const ParameterError& e) {
    throw ParseError(lines[0].number, e.what());
  }
}

std::string write_nc0(const LocalCircuit& c,
                      const std::vector<std::string>& header_comments) {
  std::ostringstream out;
  for (const auto& line : header_comments) out << "# " << line << "\n";
  out << "nc0 " << c.n() << " " << c.m() << " " << c.k() << "\n";
  for (size_t j = 0; j < c.m(); ++j) {
    const auto& o = c.output(j);
    out << j << ":";
    for (uint32_t i : o.inputs) out << " " << i;
    out << " :";
    out << " ";
    for (uint8_t b : o.table) out << char('0' + b);
    out << "\n";
  }
  return out.str();
}

namespace {

Monomial parse_monomial(const std::string& term, size_t line) {
  const std::string t = trim(term);
  if (t == "1") return Monomial{};
  Monomial mono;
  size_t start = 0;
  while (start < t.size()) {
    size_t star = t.find('*', start);
    std::string factor = trim(t.substr(start, star == std::string::npos
                                                  ? std::string::npos
                                                  : star - start));
    if (factor.size() < 2 || factor[0] != 'x')
      throw ParseError(line, "expected 'x<i>' factor, got '" + factor + "'");
    mono.vars.push_back(
        static_cast<uint32_t>(parse_uint(factor.substr(1), line, "variable index")));
    if (star == std::string::npos) break;
    start = star + 1;
  }
  std::sort(mono.vars.begin(), mono.vars.end());
  if (std::adjacent_find(mono.vars.begin(), mono.vars.end()) != mono.vars.end())
    throw ParseError(line, "repeated variable in monomial '" + t + "'");
  return mono;
}

}  // namespace

PolyFunction parse_poly(const std::string& text) {
  auto lines = significant_lines(text);
  if (lines.empty()) throw ParseError(1, "empty input");
  auto header = tokens_of(lines[0].text);
  if (header.size() != 4 || header[0] != "poly")
    throw ParseError(lines[0].number, "expected header 'poly <n> <m> <d>'");
  const auto n = static_cast<uint32_t>(parse_uint(header[1], lines[0].number, "n"));
  const auto m = static_cast<uint32_t>(parse_uint(header[2], lines[0].number, "m"));
  const auto d = static_cast<uint32_t>(parse_uint(header[3], lines[0].number, "d"));
  if (lines.size() != 1 + m)
    throw ParseError(lines.back().number,
                     "expected " + std::to_string(m) + " output lines, found " +
                         std::to_string(lines.size() - 1));
  std::vector<PolyOutput> outs;
  outs.reserve(m);
  for (uint32_t j = 0; j < m; ++j) {
    const auto& ln = lines[1 + j];
    auto parts = split_colons(ln.text, 2, ln.number);
    if (parse_uint(trim(parts[0]), ln.number, "output index") != j)
      throw ParseError(ln.number, "output lines must be numbered 0.." +
                                      std::to_string(m - 1) + " in order");
    PolyOutput po;
    const std::string rhs = trim(parts[1]);
    if (rhs.empty()) throw ParseError(ln.number, "missing polynomial");
    if (rhs != "0") {
      size_t start = 0;
      while (start <= rhs.size()) {
        size_t plus = rhs.find('+', start);
        std::string term = rhs.substr(
            start, plus == std::string::npos ? std::string::npos : plus - start);
        if (trim(term).empty()) throw ParseError(ln.number, "empty term");
        po.monomials.push_back(parse_monomial(term, ln.number));
        if (plus == std::string::npos) break;
        start = plus + 1;
      }
    }
    outs.push_back(std::move(po));
  }
  try {
    return PolyFunction(n, m, d, std::move(outs));
  } catch (const ParameterError& e) {
    throw ParseError(lines[0].number, e.what());
  }
}

std::string write_poly(const PolyFunction& p,
                       const std::vector<std::string>& header_comments) {
  std::ostringstream out;
  for (const auto& line : header_comments) out << "# " << line << "\n";
  out << "poly " << p.n() << " " << p.m() << " " << p.degree() << "\n";
  for (size_t j = 0; j < p.m(); ++j) {
    out << j << ": ";
    const auto& monos = p.output(j).monomials;
    if (monos.empty()) {
      out << "0";
    } else {
      for (size_t t = 0; t < monos.size(); ++t) {
        if (t) out << " + ";
        if (monos[t].vars.empty()) {
          out << "1";
        } else {
          for (size_t v = 0; v < monos[t].vars.size(); ++v) {
            if (v) out << "*";
            out << "x" << monos[t].vars[v];
          }
        }
      }
    }
    out << "\n";
  }
  return out.str();
}

GF2Vector parse_vec(const std::string& text) {
  auto lines = significant_lines(text);
  if (lines.size() != 1) throw ParseError(lines.empty() ? 1 : lines[1].number,
                                          "expected exactly one line of bits");
  std::string bits;
  for (const auto& t : tokens_of(lines[0].text)) bits += t;
  for (char ch : bits)
    if (ch != '0' && ch != '1')
      throw ParseError(lines[0].number, "expected only 0/1 characters");
  return GF2Vector::from_string(bits);
}

std::string write_vec(const GF2Vector& v) { return v.to_string() + "\n"; }

std::vector<std::string> scan_header_comments(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] != '#') break;
    out.push_back(trim(t.substr(1)));
  }
  return out;
}

LocalCircuit gen_random_nc0(uint32_t n, uint32_t m, uint32_t k, uint64_t seed) {
  if (n < k) throw ParameterError("gen_random_nc0: need n >= k");
  if (m < 1) throw ParameterError("gen_random_nc0: need m >= 1");
  SplitRng root(seed);
  std::vector<CircuitOutput> outs;
  outs.reserve(m);
  for (uint32_t j = 0; j < m; ++j) {
    SplitRng rng = root.split(j);
    // Partial Fisher-Yates draw of k distinct indices.
    std::vector<uint32_t> pool(n);
    for (uint32_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<uint32_t> idx;
    idx.reserve(k);
    for (uint32_t i = 0; i < k; ++i) {
      const uint64_t pick = i + rng.below(n - i);
      std::swap(pool[i], pool[pick]);
      idx.push_back(pool[i]);
    }
    std::sort(idx.begin(), idx.end());
    std::vector<uint8_t> table(size_t{1} << k);
    for (auto& b : table) b = rng.coin();
    outs.push_back({std::move(idx), std::move(table)});
  }
  return LocalCircuit(n, m, k, std::move(outs));
}

PolyFunction gen_random_poly(uint32_t n, uint32_t m, uint32_t d, uint64_t seed,
                             double include_prob) {
  if (m < 1) throw ParameterError("gen_random_poly: need m >= 1");
  if (include_prob < 0.0 || include_prob > 1.0)
    throw ParameterError("gen_random_poly: probability must be in [0, 1]");
  // All monomials of degree <= d in lexicographic (degree, vars) order.
  std::vector<Monomial> pool;
  pool.push_back(Monomial{});
  std::vector<uint32_t> combo;
  for (uint32_t deg = 1; deg <= d && deg <= n; ++deg) {
    combo.assign(deg, 0);
    for (uint32_t i = 0; i < deg; ++i) combo[i] = i;
    for (;;) {
      pool.push_back(Monomial{combo});
      int64_t i = deg - 1;
      while (i >= 0 && combo[i] == n - deg + i) --i;
      if (i < 0) break;
      ++combo[i];
      for (uint32_t t = i + 1; t < deg; ++t) combo[t] = combo[t - 1] + 1;
    }
  }
  const uint64_t threshold =
      include_prob >= 1.0
          ? UINT64_MAX
          : static_cast<uint64_t>(include_prob * 18446744073709551616.0);
  SplitRng root(seed);
  std::vector<PolyOutput> outs;
  outs.reserve(m);
  for (uint32_t j = 0; j < m; ++j) {
    SplitRng rng = root.split(j);
    PolyOutput po;
    for (const auto& mono : pool) {
      const uint64_t draw = rng.next();
      const bool take = include_prob >= 1.0 || draw < threshold;
      if (take) po.monomials.push_back(mono);
    }
    outs.push_back(std::move(po));
  }
  return PolyFunction(n, m, d, std::move(outs));
}

}  // namespace avoid
