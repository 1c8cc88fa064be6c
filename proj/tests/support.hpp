#pragma once

// Seeded generators and independent oracles shared by the unit tests and
// the acceptance runner.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "isq/compilers.hpp"
#include "isq/instr.hpp"
#include "isq/truth_table.hpp"

namespace isq::gen {

using Rng = std::mt19937_64;

inline unsigned uniform(Rng& rng, unsigned lo, unsigned hi) {
  return std::uniform_int_distribution<unsigned>(lo, hi)(rng);
}
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

struct SeqShape {
  unsigned max_len = 8;
  unsigned min_len = 1;
  unsigned inputs = 2;
  unsigned aux = 0;
  unsigned splits = 0;  // parameters 1..splits for split and reply
  bool out_set_false = true;
  bool out_get = false;
  unsigned max_jump = 3;
  bool tests = true;  // allow + and - forms
};

inline BasicInstruction random_basic(Rng& rng, const SeqShape& s) {
  std::vector<BasicInstruction> pool;
  for (unsigned j = 1; j <= s.inputs; ++j) pool.push_back(BasicInstruction::reg(Focus::in(j), Method::Get));
  for (unsigned j = 1; j <= s.aux; ++j)
    for (auto m : {Method::Get, Method::SetTrue, Method::SetFalse}) pool.push_back(BasicInstruction::reg(Focus::aux(j), m));
  pool.push_back(BasicInstruction::reg(Focus::out(), Method::SetTrue));
  if (s.out_set_false) pool.push_back(BasicInstruction::reg(Focus::out(), Method::SetFalse));
  if (s.out_get) pool.push_back(BasicInstruction::reg(Focus::out(), Method::Get));
  for (unsigned p = 1; p <= s.splits; ++p) {
    pool.push_back(BasicInstruction::split(p));
    pool.push_back(BasicInstruction::reply(p));
  }
  return pool[uniform(rng, 0, static_cast<unsigned>(pool.size() - 1))];
}

inline PrimitiveInstruction random_instruction(Rng& rng, const SeqShape& s) {
  const unsigned r = uniform(rng, 0, 99);
  if (r < 15) return PrimitiveInstruction::term();
  if (r < 30 && s.max_jump > 0) return PrimitiveInstruction::jmp(coin(rng, 0.1) ? 0 : uniform(rng, 1, s.max_jump));
  auto b = random_basic(rng, s);
  if (!s.tests) return PrimitiveInstruction::plain(b);
  switch (uniform(rng, 0, 2)) {
    case 0: return PrimitiveInstruction::plain(b);
    case 1: return PrimitiveInstruction::pos(b);
    default: return PrimitiveInstruction::neg(b);
  }
}

// Ends with "!" half of the time so that terminating runs are common.
inline InstructionSequence random_sequence(Rng& rng, const SeqShape& s) {
  const unsigned len = uniform(rng, s.min_len, s.max_len);
  std::vector<PrimitiveInstruction> v;
  for (unsigned i = 0; i < len; ++i) v.push_back(random_instruction(rng, s));
  if (coin(rng)) v.back() = PrimitiveInstruction::term();
  return InstructionSequence(std::move(v));
}

inline unsigned count_splits(const InstructionSequence& x) {
  unsigned c = 0;
  for (const auto& u : x)
    if (u.has_basic() && u.basic.kind == BasicKind::Split) ++c;
  return c;
}

//===----------------------------------------------------------------------===//
// Sources for the compilers
//===----------------------------------------------------------------------===//

inline Cnf random_cnf(Rng& rng, unsigned vars, unsigned max_clauses, unsigned max_width = 3) {
  Cnf f;
  f.num_vars = vars;
  const unsigned m = uniform(rng, 0, max_clauses);
  for (unsigned c = 0; c < m; ++c) {
    Clause cl;
    const unsigned w = uniform(rng, 1, max_width);
    for (unsigned i = 0; i < w; ++i) cl.push_back(Literal{uniform(rng, 1, vars), coin(rng)});
    f.clauses.push_back(cl);
  }
  return f;
}

// Exactly `connectives` Not/Or/And nodes.
inline BoolFormula random_formula(Rng& rng, unsigned vars, unsigned connectives) {
  if (connectives == 0) return BoolFormula::var(uniform(rng, 1, vars));
  const unsigned k = uniform(rng, 0, 2);
  if (k == 0) return BoolFormula::lnot(random_formula(rng, vars, connectives - 1));
  const unsigned left = uniform(rng, 0, connectives - 1);
  auto a = random_formula(rng, vars, left);
  auto b = random_formula(rng, vars, connectives - 1 - left);
  return k == 1 ? BoolFormula::lor(a, b) : BoolFormula::land(a, b);
}

inline std::size_t count_connectives(const BoolFormula& f) {
  switch (f.kind()) {
    case BoolFormula::Kind::Var: return 0;
    case BoolFormula::Kind::Not: return 1 + count_connectives(f.left());
    default: return 1 + count_connectives(f.left()) + count_connectives(f.right());
  }
}

// Gates numbered 1..g in a shuffled order with edges only from
// earlier-created gates, so the netlist order is not already sorted.
inline Circuit random_circuit(Rng& rng, unsigned inputs, unsigned gates) {
  std::vector<unsigned> label(gates);
  for (unsigned i = 0; i < gates; ++i) label[i] = i + 1;
  std::shuffle(label.begin(), label.end(), rng);
  Circuit c;
  c.num_inputs = inputs;
  c.gates.resize(gates);
  for (unsigned i = 0; i < gates; ++i) {
    auto operand = [&] {
      if (i > 0 && coin(rng, 0.6)) return GateInput{true, label[uniform(rng, 0, i - 1)]};
      return GateInput{false, uniform(rng, 1, inputs)};
    };
    Gate g;
    g.kind = static_cast<GateKind>(uniform(rng, 0, 2));
    g.a = operand();
    g.b = g.kind == GateKind::Not ? g.a : operand();
    c.gates[label[i] - 1] = g;
  }
  c.output_gate = label[gates - 1];
  return c;
}

//===----------------------------------------------------------------------===//
// Independent oracles
//===----------------------------------------------------------------------===//

template <class F>
TruthTable oracle_table(unsigned n, F&& f) {
  return TruthTable::from_function(n, std::forward<F>(f));
}

// All literal sets of size 1..3 over v1..vk, ordered by (largest variable,
// size, codes), built by plain enumeration and sorting.
inline std::vector<std::vector<unsigned>> literal_sets_by_sorting(unsigned k) {
  std::vector<std::vector<unsigned>> all;
  const unsigned top = 2 * k;
  for (unsigned a = 1; a <= top; ++a) {
    all.push_back({a});
    for (unsigned b = a + 1; b <= top; ++b) {
      all.push_back({a, b});
      for (unsigned c = b + 1; c <= top; ++c) all.push_back({a, b, c});
    }
  }
  auto key = [](const std::vector<unsigned>& s) { return std::make_tuple((s.back() + 1) / 2, s.size(), s); };
  std::sort(all.begin(), all.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });
  return all;
}

// 3SATC by direct definition: literal code c is variable (c+1)/2, negated
// when c is even.
inline bool satc_oracle(const std::vector<bool>& bits) {
  unsigned k = 0;
  while (literal_sets_by_sorting(k + 1).size() <= bits.size()) ++k;
  const auto sets = literal_sets_by_sorting(k);
  for (std::uint32_t a = 0; a < (1U << k); ++a) {
    bool ok = true;
    for (std::size_t i = 0; i < sets.size() && ok; ++i) {
      if (!bits[i]) continue;
      bool any = false;
      for (unsigned c : sets[i]) {
        const unsigned var = (c + 1) / 2;
        const bool val = (a >> (var - 1)) & 1U;
        any = any || (c % 2 == 0 ? !val : val);
      }
      ok = any;
    }
    if (ok) return true;
  }
  return false;
}

//===----------------------------------------------------------------------===//
// Control-flow facts
//===----------------------------------------------------------------------===//

// Every position execution may continue with after position j, taking both
// replies of every test.
inline std::vector<std::size_t> any_successors(const InstructionSequence& x, std::size_t j) {
  const auto& u = x.at(j);
  std::vector<std::size_t> s;
  if (u.kind == InstrKind::Term) return s;
  if (u.kind == InstrKind::Jump) {
    if (u.jump) s.push_back(j + u.jump);
  } else {
    s.push_back(j + 1);
    if (u.is_test()) s.push_back(j + 2);
  }
  std::erase_if(s, [&](std::size_t p) { return p > x.size(); });
  return s;
}

// True when every read of an aux register is reached only through the
// textually last write of that register before it (or precedes all of its
// writes). This is the shape on which rewriting writes into splits keeps
// the computed function.
inline bool write_dominated(const InstructionSequence& x) {
  const std::size_t k = x.size();
  auto is_aux = [&](std::size_t q, bool write) {
    const auto& u = x.at(q);
    return u.has_basic() && u.basic.is_register() && u.basic.focus.kind == FocusKind::Aux &&
           (u.basic.method != Method::Get) == write;
  };
  for (std::size_t q = 1; q <= k; ++q) {
    if (!is_aux(q, false)) continue;
    const unsigned r = x.at(q).basic.focus.index;
    std::size_t w = 0;
    for (std::size_t p = 1; p < q; ++p)
      if (is_aux(p, true) && x.at(p).basic.focus.index == r) w = p;
    if (!w) continue;
    // Can q be reached from 1 without passing w?
    std::vector<bool> seen(k + 1, false);
    std::vector<std::size_t> stack{1};
    seen[1] = true;
    while (!stack.empty()) {
      auto p = stack.back();
      stack.pop_back();
      if (p == w) continue;
      if (p == q) return false;
      for (auto s : any_successors(x, p))
        if (!seen[s]) {
          seen[s] = true;
          stack.push_back(s);
        }
    }
  }
  return true;
}

}  // namespace isq::gen
