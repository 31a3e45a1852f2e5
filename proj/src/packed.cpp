#include "packed.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <memory>
#include <thread>

#include "avoid/errors.hpp"

namespace avoid::detail {

PackedFn PackedFn::from(const LocalCircuit& c) {
  if (c.n() > 63) throw BudgetError("enumeration requires n <= 63");
  PackedFn fn;
  fn.circuit_ = true;
  fn.n_ = c.n();
  fn.m_ = c.m();
  fn.out_start_.reserve(c.m() + 1);
  fn.tt_start_.reserve(c.m() + 1);
  fn.out_start_.push_back(0);
  for (size_t j = 0; j < c.m(); ++j) {
    const auto& o = c.output(j);
    fn.tt_start_.push_back(static_cast<uint32_t>(fn.tt_.size()));
    for (uint32_t i : o.inputs) fn.idx_.push_back(i);
    fn.tt_.insert(fn.tt_.end(), o.table.begin(), o.table.end());
    fn.out_start_.push_back(static_cast<uint32_t>(fn.idx_.size()));
  }
  return fn;
}

PackedFn PackedFn::from(const PolyFunction& p) {
  if (p.n() > 63) throw BudgetError("enumeration requires n <= 63");
  PackedFn fn;
  fn.circuit_ = false;
  fn.n_ = p.n();
  fn.m_ = p.m();
  fn.out_start_.push_back(0);
  for (size_t j = 0; j < p.m(); ++j) {
    for (const auto& mono : p.output(j).monomials) {
      uint64_t mask = 0;
      for (uint32_t v : mono.vars) mask |= uint64_t{1} << v;
      fn.mask_.push_back(mask);
    }
    fn.out_start_.push_back(static_cast<uint32_t>(fn.mask_.size()));
  }
  return fn;
}

uint64_t pack_msb(const GF2Vector& v) {
  uint64_t acc = 0;
  for (size_t i = 0; i < v.size(); ++i) acc = (acc << 1) | uint64_t{v.get(i)};
  return acc;
}

GF2Vector unpack_msb(uint64_t value, uint32_t m) {
  GF2Vector y(m);
  const uint32_t tail = std::min<uint32_t>(m, 64);
  for (uint32_t t = 0; t < tail; ++t)
    y.set(m - 1 - t, (value >> t) & 1);
  return y;
}

namespace {

void check_enum_budget(uint32_t n, uint64_t limit) {
  if (n > 63 || (uint64_t{1} << n) > limit)
    throw BudgetError("enumeration of 2^" + std::to_string(n) +
                      " inputs exceeds the limit of " + std::to_string(limit));
}

template <class Body>
void parallel_inputs(uint64_t count, uint32_t workers, Body body) {
  if (workers <= 1 || count < 1024) {
    body(0, count);
    return;
  }
  const uint64_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> threads;
  for (uint32_t w = 0; w < workers; ++w) {
    const uint64_t lo = w * chunk;
    const uint64_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&, lo, hi] { body(lo, hi); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

std::optional<uint64_t> range_mex(const PackedFn& fn, uint64_t limit,
                                  uint32_t workers) {
  check_enum_budget(fn.n(), limit);
  const uint64_t inputs = uint64_t{1} << fn.n();

  if (fn.m() <= 30) {
    const uint64_t space = uint64_t{1} << fn.m();
    const size_t words = (space + 63) / 64;
    auto bitmap = std::make_unique<std::atomic<uint64_t>[]>(words);
    for (size_t i = 0; i < words; ++i) bitmap[i].store(0, std::memory_order_relaxed);
    parallel_inputs(inputs, workers, [&](uint64_t lo, uint64_t hi) {
      for (uint64_t x = lo; x < hi; ++x) {
        const uint64_t v = fn.eval_msb(x);
        bitmap[v >> 6].fetch_or(uint64_t{1} << (v & 63), std::memory_order_relaxed);
      }
    });
    for (size_t w = 0; w < words; ++w) {
      uint64_t word = bitmap[w].load(std::memory_order_relaxed);
      // mask tail positions beyond the space as present
      if (w == words - 1 && (space & 63))
        word |= ~((uint64_t{1} << (space & 63)) - 1);
      if (word != UINT64_MAX)
        return w * 64 + std::countr_one(word);
    }
    return std::nullopt;
  }

  // Wide outputs: collect the values whose leading coordinates vanish, then
  // walk the sorted list for the least absent value.
  std::vector<std::vector<uint64_t>> partial(std::max(1u, workers));
  {
    std::atomic<uint32_t> next_slot{0};
    GF2Vector scratch(fn.m());
    const uint32_t lead = fn.m() > 64 ? fn.m() - 64 : 0;
    auto body = [&](uint64_t lo, uint64_t hi) {
      const uint32_t slot = next_slot.fetch_add(1);
      auto& sink = partial[slot];
      GF2Vector out(fn.m());
      for (uint64_t x = lo; x < hi; ++x) {
        if (fn.m() <= 64) {
          sink.push_back(fn.eval_msb(x));
          continue;
        }
        fn.eval_into(x, out);
        bool lead_zero = true;
        for (uint32_t i = 0; i < lead && lead_zero; ++i)
          if (out.get(i)) lead_zero = false;
        if (!lead_zero) continue;
        uint64_t v = 0;
        for (uint32_t i = lead; i < fn.m(); ++i) v = (v << 1) | uint64_t{out.get(i)};
        sink.push_back(v);
      }
    };
    parallel_inputs(inputs, workers, body);
  }
  std::vector<uint64_t> vals;
  for (auto& p : partial) vals.insert(vals.end(), p.begin(), p.end());
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  uint64_t mex = 0;
  for (uint64_t v : vals) {
    if (v > mex) break;
    if (v == mex) ++mex;
  }
  if (fn.m() < 64 && mex >= (uint64_t{1} << fn.m())) return std::nullopt;
  return mex;
}

bool range_contains(const PackedFn& fn, const GF2Vector& y, uint64_t limit) {
  if (y.size() != fn.m())
    throw ParameterError("range membership: point length must equal m");
  check_enum_budget(fn.n(), limit);
  const uint64_t inputs = uint64_t{1} << fn.n();
  if (fn.m() <= 64) {
    const uint64_t target = pack_msb(y);
    for (uint64_t x = 0; x < inputs; ++x)
      if (fn.eval_msb(x) == target) return true;
    return false;
  }
  GF2Vector out(fn.m());
  for (uint64_t x = 0; x < inputs; ++x) {
    fn.eval_into(x, out);
    if (out == y) return true;
  }
  return false;
}

}  // namespace avoid::detail
