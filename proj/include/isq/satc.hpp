#pragma once

// 3SAT instances coded as bit strings: the literal-set enumeration alpha,
// evaluation, the encode/decode reductions, a splitting sequence computing
// the family, and the reachability formula of a splitting sequence.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "isq/compilers.hpp"
#include "isq/lab.hpp"
#include "isq/splitting.hpp"

namespace isq {

//===----------------------------------------------------------------------===//
// Counting and the enumeration alpha
//===----------------------------------------------------------------------===//

namespace detail {

// C(n, r), 0 for n < 0 or r out of range.
inline std::uint64_t choose(std::int64_t n, std::int64_t r) {
  if (n < 0 || r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t c = 1;
  for (std::int64_t i = 1; i <= r; ++i) c = c * static_cast<std::uint64_t>(n - r + i) / static_cast<std::uint64_t>(i);
  return c;
}

// Literal code: v_j is 2j-1, not v_j is 2j.
inline unsigned code_of(const Literal& l) { return 2 * l.var - (l.negated ? 0 : 1); }
inline Literal literal_of(unsigned code) { return Literal{(code + 1) / 2, code % 2 == 0}; }

// Number of ways to pick r more codes above `last` in block m (codes up to
// 2m, the largest picked code must be 2m-1 or 2m).
inline std::uint64_t completions(unsigned m, unsigned last, unsigned r) {
  const auto top = static_cast<std::int64_t>(2 * m);
  const auto l = static_cast<std::int64_t>(last);
  return choose(top - l, r) - choose(top - 2 - l, r);
}

inline std::uint64_t block_size(unsigned m, unsigned card) { return completions(m, 0, card); }

}  // namespace detail

inline std::uint64_t ndisj(std::uint64_t k) {
  auto n = static_cast<std::int64_t>(2 * k);
  return detail::choose(n, 1) + detail::choose(n, 2) + detail::choose(n, 3);
}

inline std::uint64_t ndisj_closed_form(std::uint64_t k) { return (4 * k * k * k + 5 * k) / 3; }

// Sorted by literal code, 1 to 3 distinct members.
using LiteralSet = std::vector<Literal>;

inline LiteralSet normalize_literal_set(LiteralSet s) {
  std::sort(s.begin(), s.end(), [](const Literal& a, const Literal& b) { return detail::code_of(a) < detail::code_of(b); });
  if (s.empty() || s.size() > 3) throw Error("literal set must have 1 to 3 members");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] == s[i - 1]) throw Error("literal set has a repeated member");
  for (const auto& l : s)
    if (l.var == 0) throw Error("variable indices start at 1");
  return s;
}

// Sets with largest variable m fill (ndisj(m-1), ndisj(m)]; inside a block,
// smaller sets first, then lexicographic on the sorted codes.
inline LiteralSet alpha(std::uint64_t i) {
  if (i == 0) throw Error("alpha is defined from 1 on");
  unsigned m = 1;
  while (ndisj(m) < i) ++m;
  std::uint64_t r = i - ndisj(m - 1) - 1;
  unsigned card = 1;
  while (r >= detail::block_size(m, card)) r -= detail::block_size(m, card++);
  LiteralSet s;
  unsigned last = 0;
  for (unsigned left = card; left > 0; --left) {
    for (unsigned c = last + 1;; ++c) {
      std::uint64_t n = detail::completions(m, c, left - 1);
      if (r < n) {
        s.push_back(detail::literal_of(c));
        last = c;
        break;
      }
      r -= n;
    }
  }
  return s;
}

inline std::uint64_t alpha_rank(const LiteralSet& set) {
  LiteralSet s = normalize_literal_set(set);
  const unsigned m = s.back().var;
  std::uint64_t r = ndisj(m - 1);
  const auto card = static_cast<unsigned>(s.size());
  for (unsigned c = 1; c < card; ++c) r += detail::block_size(m, c);
  unsigned last = 0;
  for (unsigned idx = 0; idx < card; ++idx) {
    const unsigned code = detail::code_of(s[idx]);
    for (unsigned c = last + 1; c < code; ++c) r += detail::completions(m, c, card - idx - 1);
    last = code;
  }
  return r + 1;
}

inline std::string render_literal_set(const LiteralSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += (s[i].negated ? "-v" : "v") + std::to_string(s[i].var);
  }
  return out + "}";
}

//===----------------------------------------------------------------------===//
// 3SATC
//===----------------------------------------------------------------------===//

// Largest k with ndisj(k) <= n.
inline unsigned satc_k(std::size_t n) {
  unsigned k = 0;
  while (ndisj(k + 1) <= n) ++k;
  return k;
}

// Clause i for every b_i = T, i <= ndisj(k).
inline Cnf decode_to_cnf(const std::vector<bool>& bits) {
  Cnf f;
  f.num_vars = satc_k(bits.size());
  const std::uint64_t used = ndisj(f.num_vars);
  for (std::uint64_t i = 1; i <= used; ++i)
    if (bits[i - 1]) f.clauses.push_back(alpha(i));
  return f;
}

inline bool cnf_satisfiable(const Cnf& f) {
  unsigned k = f.num_vars;
  for (const auto& c : f.clauses)
    for (const auto& l : c) k = std::max(k, l.var);
  if (k > 20) throw ResourceError("satisfiability check limited to 20 variables");
  std::vector<bool> b(k);
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << k); ++a) {
    for (unsigned j = 0; j < k; ++j) b[j] = (a >> j) & 1U;
    if (eval_formula(f, b)) return true;
  }
  return false;
}

inline bool formula_satisfiable(const BoolFormula& f) {
  unsigned k = max_var(f);
  if (k > 20) throw ResourceError("satisfiability check limited to 20 variables");
  std::vector<bool> b(k);
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << k); ++a) {
    for (unsigned j = 0; j < k; ++j) b[j] = (a >> j) & 1U;
    if (eval_formula(f, b)) return true;
  }
  return false;
}

inline bool satc_eval(const std::vector<bool>& bits) { return cnf_satisfiable(decode_to_cnf(bits)); }

// Shortest bits that decode to the same set of clauses.
inline std::vector<bool> encode_cnf(const Cnf& f) {
  unsigned k = 0;
  std::set<std::uint64_t> ranks;
  for (const auto& c : f.clauses) {
    if (c.size() > 3) throw Error("clause has more than 3 literals");
    auto s = normalize_literal_set(c);
    k = std::max(k, s.back().var);
    if (!ranks.insert(alpha_rank(s)).second) throw Error("clause occurs twice");
  }
  std::vector<bool> bits(ndisj(k), false);
  for (auto r : ranks) bits[r - 1] = true;
  return bits;
}

// Clauses as sorted literal sets in alpha order, num_vars the largest used
// index: the form decode_to_cnf produces.
inline Cnf canonical_cnf(const Cnf& f) {
  Cnf g;
  std::vector<std::pair<std::uint64_t, Clause>> cs;
  for (const auto& c : f.clauses) {
    auto s = normalize_literal_set(c);
    g.num_vars = std::max(g.num_vars, s.back().var);
    cs.emplace_back(alpha_rank(s), s);
  }
  std::sort(cs.begin(), cs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& c : cs) g.clauses.push_back(std::move(c.second));
  return g;
}

inline TruthTable satc_table(unsigned n) {
  return TruthTable::from_function(n, [](const std::vector<bool>& b) { return satc_eval(b); });
}

//===----------------------------------------------------------------------===//
// A splitting sequence for 3SATC_n
//===----------------------------------------------------------------------===//

// split:1 ; ... ; split:k ; then the formula code for
//   AND over i <= ndisj(k) of (not u_i or OR alpha(i))
// where selector u_i is variable i (read from in:i) and guessed v_j is
// variable ndisj(k)+j (read from reply:j).
inline InstructionSequence build_satc_splitter(unsigned n) {
  const unsigned k = satc_k(n);
  if (k > 20) throw ResourceError("build_satc_splitter: too many variables");
  const auto N = static_cast<unsigned>(ndisj(k));
  std::optional<BoolFormula> psi;
  for (unsigned i = 1; i <= N; ++i) {
    auto clause = alpha(i);
    auto lit = [&](const Literal& l) {
      auto v = BoolFormula::var(N + l.var);
      return l.negated ? BoolFormula::lnot(v) : v;
    };
    BoolFormula d = lit(clause[0]);
    for (std::size_t j = 1; j < clause.size(); ++j) d = BoolFormula::lor(d, lit(clause[j]));
    BoolFormula conj = BoolFormula::lor(BoolFormula::lnot(BoolFormula::var(i)), d);
    psi = psi ? BoolFormula::land(*psi, conj) : conj;
  }
  std::vector<PrimitiveInstruction> v;
  for (unsigned j = 1; j <= k; ++j) v.push_back(PrimitiveInstruction::plain(BasicInstruction::split(j)));
  if (!psi) {
    v.push_back(PrimitiveInstruction::pos(BasicInstruction::reg(Focus::out(), Method::SetTrue)));
    v.push_back(PrimitiveInstruction::term());
    return InstructionSequence(std::move(v));
  }
  auto body = compile_formula(*psi, [N](unsigned var) {
    return var <= N ? BasicInstruction::reg(Focus::in(var), Method::Get) : BasicInstruction::reply(var - N);
  });
  v.insert(v.end(), body.begin(), body.end());
  return InstructionSequence(std::move(v));
}

//===----------------------------------------------------------------------===//
// Reachability formula
//===----------------------------------------------------------------------===//

// Positions execution may move to from position j. Input tests follow the
// given bits, out.set:T replies T, splits and replies may go either way.
inline std::vector<std::size_t> control_successors(const InstructionSequence& x, std::size_t j,
                                                   const std::vector<bool>& inputs) {
  const auto& u = x.at(j);
  std::vector<std::size_t> s;
  auto add = [&](std::size_t p) {
    if (p <= x.size() && std::find(s.begin(), s.end(), p) == s.end()) s.push_back(p);
  };
  switch (u.kind) {
    case InstrKind::Term: return s;
    case InstrKind::Jump:
      if (u.jump) add(j + u.jump);
      return s;
    case InstrKind::Plain: add(j + 1); return s;
    default: break;
  }
  const auto& b = u.basic;
  if (b.kind == BasicKind::Register) {
    bool reply = true;
    if (b.focus.kind == FocusKind::In) {
      if (b.focus.index == 0 || b.focus.index > inputs.size())
        throw PreconditionError("reachability_formula: input index beyond the given inputs");
      reply = inputs[b.focus.index - 1];
    }
    add(detail::successor(u, j, reply));
  } else {
    add(j + 1);
    add(j + 2);
  }
  return s;
}

// v_1 and v_l and, for i in 2..k, v_i iff (OR of v_j over j in B(i)), with
// l the position of the only out.set:T and B(i) the predecessors of i. An
// empty B(i) makes the conjunct "not v_i".
inline BoolFormula reachability_formula(const InstructionSequence& x, const std::vector<bool>& inputs) {
  if (!classify(x).is_sisbr) throw PreconditionError("reachability_formula: sequence is not in SISbr");
  std::size_t l = 0, count = 0;
  for (std::size_t j = 1; j <= x.size(); ++j)
    if (x.at(j).has_basic() && x.at(j).basic.on(Focus::out())) {
      l = j;
      ++count;
    }
  if (count != 1) throw PreconditionError("reachability_formula: out.set:T must occur exactly once");
  const std::size_t k = x.size();
  std::vector<std::vector<std::size_t>> pred(k + 1);
  for (std::size_t j = 1; j <= k; ++j)
    for (auto s : control_successors(x, j, inputs)) pred[s].push_back(j);

  auto v = [](std::size_t i) { return BoolFormula::var(static_cast<unsigned>(i)); };
  BoolFormula f = BoolFormula::land(v(1), v(l));
  for (std::size_t i = 2; i <= k; ++i) {
    auto& b = pred[i];
    std::sort(b.begin(), b.end());
    BoolFormula c = b.empty() ? BoolFormula::lnot(v(i)) : [&] {
      BoolFormula d = v(b[0]);
      for (std::size_t q = 1; q < b.size(); ++q) d = BoolFormula::lor(d, v(b[q]));
      // (v_i or not d) and (not v_i or d)
      return BoolFormula::land(BoolFormula::lor(v(i), BoolFormula::lnot(d)), BoolFormula::lor(BoolFormula::lnot(v(i)), d));
    }();
    f = BoolFormula::land(f, c);
  }
  return f;
}

//===----------------------------------------------------------------------===//
// Length reductions
//===----------------------------------------------------------------------===//

// f(b) = g(h_1(b), ..., h_m(b)) on every input, where each helper has
// psize <= l and computes a total h_i of f's arity. Helpers containing
// split or reply are run under the splitting semantics.
inline bool check_length_reduction(const TruthTable& f, const TruthTable& g,
                                   const std::vector<InstructionSequence>& helpers, std::size_t l) {
  if (helpers.size() != g.arity()) throw PreconditionError("check_length_reduction: helper count differs from arity of g");
  std::vector<TruthTable> h;
  for (const auto& x : helpers) {
    if (psize(x) > l) return false;
    const auto p = classify(x);
    const bool splitting = !p.is_isbr;
    if (splitting && !p.is_sisbr) return false;
    if (p.max_input_index > f.arity()) return false;
    auto t = truth_table(x, f.arity(), splitting);
    if (!t.is_total()) return false;
    if (!(splitting ? check_splitting_computes(x, t) : check_computes(x, t))) return false;
    h.push_back(std::move(t));
  }
  if (!f.is_total() || !g.is_total()) return false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::vector<bool> a;
    for (const auto& t : h) a.push_back(*t[i]);
    if (g(a) != f[i]) return false;
  }
  return true;
}

}  // namespace isq
