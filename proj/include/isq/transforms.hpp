#pragma once

// Rewrites on instruction sequences: removing out.set:F, replacing
// auxiliary registers by split/reply, and the two congruence rewriters.

#include <string>
#include <utility>
#include <vector>

#include "isq/instr.hpp"

namespace isq {

struct RewriteStep {
  std::string rule;
  std::size_t position;  // 1-based, in the sequence the rule was applied to
  friend bool operator==(const RewriteStep&, const RewriteStep&) = default;
};

struct RewriteReport {
  InstructionSequence input;
  InstructionSequence output;
  std::size_t steps = 0;
  std::vector<RewriteStep> rule_trace;
};

inline std::string render_trace(const RewriteReport& r) {
  std::string s;
  for (const auto& st : r.rule_trace) s += st.rule + " @" + std::to_string(st.position) + "\n";
  s += "steps=" + std::to_string(r.steps) + "\n";
  return s;
}

namespace detail {

using Prims = std::vector<PrimitiveInstruction>;

// 1-based helpers over a working vector.
inline PrimitiveInstruction& at(Prims& v, std::size_t pos) { return v[pos - 1]; }

// After the instruction at j grows into `by`+1 instructions: jumps from
// before j that land beyond j move along.
inline void widen_crossing(Prims& v, std::size_t j, unsigned by) {
  for (std::size_t i = 1; i < j; ++i) {
    auto& u = at(v, i);
    if (u.kind == InstrKind::Jump && j < i + u.jump) u.jump += by;
  }
}

inline bool is_aux_write(const PrimitiveInstruction& u) {
  return u.has_basic() && u.basic.is_register() && u.basic.focus.kind == FocusKind::Aux &&
         u.basic.method != Method::Get;
}

// A test whose reply can make it skip the next instruction. Tests on
// register writes have a fixed reply: +f.set:T and -f.set:F never skip.
inline bool may_skip(const PrimitiveInstruction& u) {
  if (!u.is_test()) return false;
  if (!u.basic.is_register()) return true;
  if (u.kind == InstrKind::PosTest && u.basic.method == Method::SetTrue) return false;
  if (u.kind == InstrKind::NegTest && u.basic.method == Method::SetFalse) return false;
  return true;
}

// Some way into j other than falling through from j-1: a jump, or a skip
// from j-2.
inline bool entered_elsewhere(Prims& v, std::size_t j) {
  if (j >= 3 && may_skip(at(v, j - 2))) return true;
  for (std::size_t i = 1; i < j; ++i) {
    const auto& u = at(v, i);
    if (u.kind == InstrKind::Jump && u.jump && i + u.jump == j) return true;
  }
  return false;
}

// Replaces the instruction at j by `block`, which runs when j is entered and
// hands over to the old j+1 by running off its end. A skipping test at j-1
// must still reach the old j+1, not the second instruction of the block, so
// in that case the block goes in one of two detours:
//   flipped:  the test is inverted and "#(m+1)" at j leads around the block
//   bridged:  "#2 ; #(m+1)" in front, when j is also entered elsewhere
// Only positions past j move, so callers work from right to left. Returns
// where the block starts and the suffix for the rule name.
inline std::pair<std::size_t, const char*> place_block(Prims& v, std::size_t j, const Prims& block) {
  const auto m = static_cast<unsigned>(block.size());
  const auto pos = [&](std::size_t p) { return v.begin() + static_cast<std::ptrdiff_t>(p - 1); };
  if (j == 1 || !may_skip(at(v, j - 1))) {
    at(v, j) = block.front();
    v.insert(pos(j + 1), block.begin() + 1, block.end());
    widen_crossing(v, j, m - 1);
    return {j, ""};
  }
  if (!entered_elsewhere(v, j)) {
    at(v, j - 1) = flipped(at(v, j - 1));
    at(v, j) = PrimitiveInstruction::jmp(m + 1);
    v.insert(pos(j + 1), block.begin(), block.end());
    widen_crossing(v, j, m);
    return {j + 1, "-flipped"};
  }
  at(v, j) = PrimitiveInstruction::jmp(2);
  Prims bridge{PrimitiveInstruction::jmp(m + 1)};
  bridge.insert(bridge.end(), block.begin(), block.end());
  v.insert(pos(j + 1), bridge.begin(), bridge.end());
  widen_crossing(v, j, m + 1);
  return {j + 2, "-bridged"};
}

inline void require_isbr(const InstructionSequence& x, const char* who) {
  if (!classify(x).is_isbr) throw PreconditionError(std::string(who) + ": sequence is not in ISbr");
}

}  // namespace detail

//===----------------------------------------------------------------------===//
// Removing out.set:F
//===----------------------------------------------------------------------===//

// out is renamed to a fresh aux:o; then every "!" after the first position
// is replaced by "+aux:o.get ; out.set:T ; !", copying aux:o into out on
// termination. Works from the last "!" backwards (see place_block).
inline RewriteReport eliminate_output_false_report(const InstructionSequence& x) {
  using namespace detail;
  require_isbr(x, "eliminate_output_false");
  const unsigned o = classify(x).max_aux_index + 1;
  Prims v = x.items();
  for (auto& u : v)
    if (u.has_basic() && u.basic.on(Focus::out())) u.basic.focus = Focus::aux(o);

  RewriteReport r{x, x, 0, {}};
  const Prims guard{PrimitiveInstruction::pos(BasicInstruction::reg(Focus::aux(o), Method::Get)),
                    PrimitiveInstruction::plain(BasicInstruction::reg(Focus::out(), Method::SetTrue)),
                    PrimitiveInstruction::term()};
  if (v.front().kind != InstrKind::Term)
    for (std::size_t j = v.size(); j >= 2; --j) {
      if (at(v, j).kind != InstrKind::Term) continue;
      auto [start, how] = place_block(v, j, guard);
      r.rule_trace.push_back({std::string("guard-termination") + how, j});
    }
  r.output = InstructionSequence(std::move(v));
  r.steps = r.rule_trace.size();
  return r;
}

inline InstructionSequence eliminate_output_false(const InstructionSequence& x) {
  return eliminate_output_false_report(x).output;
}

//===----------------------------------------------------------------------===//
// From auxiliary registers to split/reply
//===----------------------------------------------------------------------===//

// Replaces "-aux:j.set:T" by "+aux:j.set:T ; #2" and "+aux:j.set:F" by
// "-aux:j.set:F ; #2", rightmost first.
inline RewriteReport normalize_set_tests_report(const InstructionSequence& x) {
  using namespace detail;
  require_isbr(x, "normalize_set_tests");
  auto offending = [](const PrimitiveInstruction& u) {
    if (!u.has_basic() || !u.basic.is_register() || u.basic.focus.kind != FocusKind::Aux) return false;
    return (u.kind == InstrKind::NegTest && u.basic.method == Method::SetTrue) ||
           (u.kind == InstrKind::PosTest && u.basic.method == Method::SetFalse);
  };
  Prims v = x.items();
  RewriteReport r{x, x, 0, {}};
  // A flipped test in front of a replaced one is never offending afterwards.
  for (std::size_t i = v.size(); i >= 1; --i) {
    if (!offending(at(v, i))) continue;
    auto [start, how] = place_block(v, i, {flipped(at(v, i)), PrimitiveInstruction::jmp(2)});
    r.rule_trace.push_back({std::string("fixed-reply-test") + how, i});
  }
  r.output = InstructionSequence(std::move(v));
  r.steps = r.rule_trace.size();
  return r;
}

inline InstructionSequence normalize_set_tests(const InstructionSequence& x) {
  return normalize_set_tests_report(x).output;
}

// Working from the last aux write backwards: the write becomes a split on a
// fresh parameter whose branch with the wrong value terminates at once
// ("-split:p ; !" for set:T, "+split:p ; !" for set:F), and the gets of that
// register after the write become replies on the parameter.
//
// Gets that precede every write of their register read the initial False;
// they are replaced by jumps with the same effect (plain or negative test:
// #1, positive test: #2) so that the result is free of aux foci.
inline RewriteReport to_splitting_report(const InstructionSequence& x) {
  using namespace detail;
  require_isbr(x, "to_splitting");
  auto p = classify(x);
  if (p.has_out_set_false) throw PreconditionError("to_splitting: out.set:F occurs; eliminate it first");
  for (const auto& u : x) {
    if (!is_aux_write(u)) continue;
    if ((u.kind == InstrKind::NegTest && u.basic.method == Method::SetTrue) ||
        (u.kind == InstrKind::PosTest && u.basic.method == Method::SetFalse))
      throw PreconditionError("to_splitting: normalize_set_tests has not been applied");
  }

  Prims v = x.items();
  RewriteReport r{x, x, 0, {}};
  unsigned fresh = 0;
  for (;;) {
    std::size_t i = 0;
    for (std::size_t q = v.size(); q >= 1 && !i; --q)
      if (is_aux_write(at(v, q))) i = q;
    if (!i) break;
    const unsigned reg = at(v, i).basic.focus.index;
    const bool value = at(v, i).basic.method == Method::SetTrue;
    const unsigned param = ++fresh;
    auto split = BasicInstruction::split(param);
    auto [start, how] = place_block(
        v, i, {value ? PrimitiveInstruction::neg(split) : PrimitiveInstruction::pos(split), PrimitiveInstruction::term()});
    r.rule_trace.push_back({std::string("split-write") + how, i});
    for (std::size_t q = start + 2; q <= v.size(); ++q) {
      auto& u = at(v, q);
      if (u.has_basic() && u.basic.on(Focus::aux(reg)) && u.basic.method == Method::Get)
        u.basic = BasicInstruction::reply(param);
    }
  }
  for (std::size_t q = 1; q <= v.size(); ++q) {
    auto& u = at(v, q);
    if (!(u.has_basic() && u.basic.is_register() && u.basic.focus.kind == FocusKind::Aux)) continue;
    r.rule_trace.push_back({"initial-read", q});
    u = PrimitiveInstruction::jmp(u.kind == InstrKind::PosTest ? 2 : 1);
  }
  r.output = InstructionSequence(std::move(v));
  r.steps = r.rule_trace.size();
  return r;
}

inline InstructionSequence to_splitting(const InstructionSequence& x) { return to_splitting_report(x).output; }

//===----------------------------------------------------------------------===//
// Congruence rewriting
//===----------------------------------------------------------------------===//

// A jump landing on #0 becomes #0; a jump landing on #m is widened by m.
// Rightmost first, so every jump target is already final when it is looked
// at and each jump is rewritten at most once.
inline RewriteReport collapse_jump_chains_report(const InstructionSequence& x) {
  using namespace detail;
  Prims v = x.items();
  RewriteReport r{x, x, 0, {}};
  for (std::size_t i = v.size(); i >= 1; --i) {
    auto& u = at(v, i);
    if (u.kind != InstrKind::Jump || u.jump == 0 || i + u.jump > v.size()) continue;
    const auto& t = at(v, i + u.jump);
    if (t.kind != InstrKind::Jump) continue;
    if (t.jump == 0) {
      r.rule_trace.push_back({"jump-to-deadlock", i});
      u.jump = 0;
    } else {
      r.rule_trace.push_back({"jump-chain", i});
      u.jump += t.jump;
    }
  }
  r.output = InstructionSequence(std::move(v));
  r.steps = r.rule_trace.size();
  return r;
}

inline InstructionSequence collapse_jump_chains(const InstructionSequence& x) {
  return collapse_jump_chains_report(x).output;
}

// The register identities, for f an aux register or out:
//   +f.set:T = f.set:T                  -f.set:F = f.set:F
//   -f.set:T ; f.set:T = #1 ; f.set:T    +f.set:F ; f.set:F = #1 ; f.set:F
//   -f.set:T ; #(n+2) ; #(n+2) ; u1..un ; f.set:T  starts with #1 instead
//   +f.set:F ; #(n+2) ; #(n+2) ; u1..un ; f.set:F  starts with #1 instead
// applied left to right at the leftmost redex until none is left.
inline RewriteReport behavioural_normalize_report(const InstructionSequence& x) {
  using namespace detail;
  require_isbr(x, "behavioural_normalize");
  Prims v = x.items();
  RewriteReport r{x, x, 0, {}};
  auto reg_write = [](const PrimitiveInstruction& u, Method m) {
    return u.has_basic() && u.basic.is_register() && u.basic.focus.kind != FocusKind::In && u.basic.method == m;
  };
  auto plain_of = [](const PrimitiveInstruction& u) { return PrimitiveInstruction::plain(u.basic); };
  // Index of the rule that applies at position i, 0 if none.
  auto redex = [&](std::size_t i) -> int {
    const auto& u = at(v, i);
    if (u.kind == InstrKind::PosTest && reg_write(u, Method::SetTrue)) return 1;
    if (u.kind == InstrKind::NegTest && reg_write(u, Method::SetFalse)) return 2;
    bool t = u.kind == InstrKind::NegTest && reg_write(u, Method::SetTrue);
    bool f = u.kind == InstrKind::PosTest && reg_write(u, Method::SetFalse);
    if (!t && !f) return 0;
    const auto closing = plain_of(u);
    if (i + 1 <= v.size() && at(v, i + 1) == closing) return t ? 3 : 4;
    if (i + 2 <= v.size()) {
      const auto& j1 = at(v, i + 1);
      const auto& j2 = at(v, i + 2);
      if (j1.kind == InstrKind::Jump && j1 == j2 && j1.jump >= 2) {
        std::size_t n = j1.jump - 2;
        if (i + 3 + n <= v.size() && at(v, i + 3 + n) == closing) return t ? 5 : 6;
      }
    }
    return 0;
  };
  static const char* names[] = {"", "set-true-test", "set-false-test", "repeated-set-true", "repeated-set-false",
                                "bypassed-set-true", "bypassed-set-false"};
  for (;;) {
    std::size_t i = 0;
    int rule = 0;
    for (std::size_t p = 1; p <= v.size() && !rule; ++p)
      if ((rule = redex(p))) i = p;
    if (!rule) break;
    r.rule_trace.push_back({names[rule], i});
    at(v, i) = rule <= 2 ? plain_of(at(v, i)) : PrimitiveInstruction::jmp(1);
  }
  r.output = InstructionSequence(std::move(v));
  r.steps = r.rule_trace.size();
  return r;
}

inline InstructionSequence behavioural_normalize(const InstructionSequence& x) {
  return behavioural_normalize_report(x).output;
}

}  // namespace isq
