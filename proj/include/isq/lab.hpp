#pragma once

// Truth tables of instruction sequences and an exhaustive search for the
// shortest sequence computing a given table under syntactic restrictions.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "isq/services.hpp"
#include "isq/splitting.hpp"
#include "isq/truth_table.hpp"

namespace isq {

// Entry b is the out value of the run on b, or undefined when that run
// deadlocks or diverges.
inline TruthTable truth_table(const InstructionSequence& x, unsigned n, bool splitting) {
  const auto p = classify(x);
  if (splitting ? !p.is_sisbr : !p.is_isbr)
    throw PreconditionError(std::string("truth_table: sequence is not in ") + (splitting ? "SISbr" : "ISbr"));
  if (n > 24) throw ResourceError("truth table arity too large");
  std::vector<std::optional<bool>> v(std::size_t{1} << n);
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto b = input_vector(n, i);
    v[i] = (splitting ? run_interleaved(x, b) : run(x, b)).out();
  }
  return TruthTable(n, std::move(v));
}

//===----------------------------------------------------------------------===//
// Shortest sequence search
//===----------------------------------------------------------------------===//

struct SearchSpec {
  TruthTable target;
  std::size_t max_length = 8;
  bool allow_jumps = true;
  unsigned max_jump = 3;
  bool allow_aux = true;
  bool allow_out_set_false = true;
  bool allow_multiple_term = true;
  bool splitting_mode = false;
  std::size_t state_budget = 4'000'000;
};

struct SearchStats {
  std::size_t states = 0;  // distinct signatures over all lengths
  std::size_t length_reached = 0;
};

// The instructions tried, in enumeration order: "!", #0..#max_jump, then
// for each basic instruction the plain, + and - forms.
inline std::vector<PrimitiveInstruction> search_alphabet(const SearchSpec& s) {
  std::vector<PrimitiveInstruction> a{PrimitiveInstruction::term()};
  if (s.allow_jumps)
    for (unsigned l = 0; l <= s.max_jump; ++l) a.push_back(PrimitiveInstruction::jmp(l));
  std::vector<BasicInstruction> basics;
  for (unsigned j = 1; j <= s.target.arity(); ++j) basics.push_back(BasicInstruction::reg(Focus::in(j), Method::Get));
  if (s.allow_aux && !s.splitting_mode)
    for (unsigned j = 1; j <= 2; ++j)
      for (auto m : {Method::Get, Method::SetTrue, Method::SetFalse})
        basics.push_back(BasicInstruction::reg(Focus::aux(j), m));
  basics.push_back(BasicInstruction::reg(Focus::out(), Method::SetTrue));
  if (s.allow_out_set_false && !s.splitting_mode) basics.push_back(BasicInstruction::reg(Focus::out(), Method::SetFalse));
  if (s.splitting_mode) {
    for (unsigned p = 1; p <= 2; ++p) basics.push_back(BasicInstruction::split(p));
    for (unsigned p = 1; p <= 2; ++p) basics.push_back(BasicInstruction::reply(p));
  }
  for (const auto& b : basics) {
    a.push_back(PrimitiveInstruction::plain(b));
    a.push_back(PrimitiveInstruction::pos(b));
    a.push_back(PrimitiveInstruction::neg(b));
  }
  return a;
}

namespace detail {

// Where one run (or one branch) stands after a prefix: `offset` positions
// past the end of the prefix, with the given aux bits or parameter
// valuation. Pending states are small enough to pack into 16 bits.
struct SearchCursor {
  std::uint8_t offset = 0;
  std::uint8_t bits = 0;  // aux:1, aux:2 in bits 0-1; params as (set, value) pairs in splitting mode
  friend auto operator<=>(const SearchCursor&, const SearchCursor&) = default;
};

struct SearchRun {
  enum class Phase : std::uint8_t { Pending, Done, Dead } phase = Phase::Pending;
  bool out = false;
  std::vector<SearchCursor> cursors;  // one, or the live branches
  friend bool operator==(const SearchRun&, const SearchRun&) = default;
};

struct SearchState {
  std::vector<SearchRun> runs;  // one per input vector
  bool term_used = false;

  std::string key() const {
    std::string k(1, term_used ? '1' : '0');
    for (const auto& r : runs) {
      k += static_cast<char>(static_cast<int>(r.phase) * 2 + (r.out ? 1 : 0));
      k += static_cast<char>(r.cursors.size());
      for (const auto& c : r.cursors) {
        k += static_cast<char>(c.offset);
        k += static_cast<char>(c.bits);
      }
    }
    return k;
  }
};

inline bool param_set(std::uint8_t bits, unsigned p) { return bits & (1U << (2 * (p - 1))); }
inline bool param_value(std::uint8_t bits, unsigned p) { return bits & (2U << (2 * (p - 1))); }
inline std::uint8_t with_param(std::uint8_t bits, unsigned p, bool v) {
  bits = static_cast<std::uint8_t>(bits | (1U << (2 * (p - 1))));
  return static_cast<std::uint8_t>(v ? bits | (2U << (2 * (p - 1))) : bits & ~(2U << (2 * (p - 1))));
}

// Offset after instruction u answered `reply` (0 continues right after u).
inline std::uint8_t test_offset(const PrimitiveInstruction& u, bool reply) {
  if (u.kind == InstrKind::PosTest) return reply ? 0 : 1;
  if (u.kind == InstrKind::NegTest) return reply ? 1 : 0;
  return 0;
}

// Appends u for a single run. Cursors at offset 0 execute u, the others
// move one position closer.
inline void advance(SearchRun& r, const PrimitiveInstruction& u, const std::vector<bool>& input) {
  if (r.phase != SearchRun::Phase::Pending) return;
  std::vector<SearchCursor> next;
  for (auto c : r.cursors) {
    if (c.offset > 0) {
      --c.offset;
      next.push_back(c);
      continue;
    }
    switch (u.kind) {
      case InstrKind::Term: continue;
      case InstrKind::Jump:
        if (u.jump == 0) {
          r.phase = SearchRun::Phase::Dead;
          return;
        }
        c.offset = static_cast<std::uint8_t>(u.jump - 1);
        next.push_back(c);
        continue;
      default: break;
    }
    const auto& b = u.basic;
    if (b.kind == BasicKind::Split) {
      if (param_set(c.bits, b.param)) {
        r.phase = SearchRun::Phase::Dead;
        return;
      }
      next.push_back({test_offset(u, true), with_param(c.bits, b.param, true)});
      next.push_back({test_offset(u, false), with_param(c.bits, b.param, false)});
      continue;
    }
    bool reply = false;
    if (b.kind == BasicKind::Reply) {
      if (!param_set(c.bits, b.param)) {
        r.phase = SearchRun::Phase::Dead;
        return;
      }
      reply = param_value(c.bits, b.param);
    } else if (b.focus.kind == FocusKind::In) {
      reply = input[b.focus.index - 1];
    } else {
      const bool get = b.method == Method::Get;
      const bool value = b.method == Method::SetTrue;
      if (b.focus.kind == FocusKind::Out) {
        if (!get) r.out = value;
        reply = r.out;
      } else {
        const auto mask = static_cast<std::uint8_t>(1U << (b.focus.index - 1));
        if (!get) c.bits = static_cast<std::uint8_t>(value ? c.bits | mask : c.bits & ~mask);
        reply = c.bits & mask;
      }
    }
    c.offset = test_offset(u, reply);
    next.push_back(c);
  }
  std::sort(next.begin(), next.end());
  next.erase(std::unique(next.begin(), next.end()), next.end());
  r.cursors = std::move(next);
  if (r.cursors.empty()) r.phase = SearchRun::Phase::Done;
}

}  // namespace detail

// Minimum-length sequence whose truth table is spec.target under spec's
// restrictions; among those of that length the first in enumeration order.
// Prefixes that leave every run in the same state have the same futures, so
// one representative per state is kept at each length, the first one found.
inline std::optional<InstructionSequence> shortest_sequence_search(const SearchSpec& spec, SearchStats* stats = nullptr) {
  using namespace detail;
  if (spec.max_length < 1) throw PreconditionError("search: max_length must be at least 1");
  if (spec.max_length > 12) throw ResourceError("search: max_length is limited to 12");
  if (spec.target.arity() > 3) throw ResourceError("search: arity is limited to 3");
  if (spec.max_jump > 12) throw ResourceError("search: max_jump is limited to 12");
  const auto alphabet = search_alphabet(spec);
  const unsigned n = spec.target.arity();
  std::vector<std::vector<bool>> inputs;
  for (std::size_t i = 0; i < spec.target.size(); ++i) inputs.push_back(input_vector(n, i));

  SearchState init;
  for (std::size_t i = 0; i < inputs.size(); ++i) init.runs.push_back(SearchRun{SearchRun::Phase::Pending, false, {SearchCursor{}}});
  std::vector<std::pair<SearchState, std::vector<PrimitiveInstruction>>> layer{{init, {}}};
  SearchStats local;

  for (std::size_t len = 1; len <= spec.max_length; ++len) {
    local.length_reached = len;
    const std::size_t remaining = spec.max_length - len;
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<std::pair<SearchState, std::vector<PrimitiveInstruction>>> next;
    for (const auto& [state, prefix] : layer) {
      for (const auto& u : alphabet) {
        if (u.kind == InstrKind::Term && state.term_used && !spec.allow_multiple_term) continue;
        SearchState s = state;
        if (u.kind == InstrKind::Term) s.term_used = true;
        bool alive = true, complete = true;
        for (std::size_t i = 0; i < s.runs.size() && alive; ++i) {
          auto& r = s.runs[i];
          advance(r, u, inputs[i]);
          const auto& want = spec.target[i];
          switch (r.phase) {
            case SearchRun::Phase::Done: alive = want && *want == r.out; break;
            case SearchRun::Phase::Dead: alive = !want; break;
            case SearchRun::Phase::Pending:
              // Ending here lets the run fall off, which is a deadlock.
              complete = complete && !want;
              // A cursor that cannot land inside max_length falls off.
              for (const auto& c : r.cursors) alive = alive && (c.offset < remaining || !want);
              break;
          }
        }
        if (!alive) continue;
        if (complete) {
          auto found = prefix;
          found.push_back(u);
          local.states += seen.size();
          if (stats) *stats = local;
          return InstructionSequence(std::move(found));
        }
        auto [it, fresh] = seen.try_emplace(s.key(), next.size());
        if (!fresh) continue;
        if (seen.size() > spec.state_budget) throw ResourceError("search: state budget exceeded");
        auto p = prefix;
        p.push_back(u);
        next.emplace_back(std::move(s), std::move(p));
      }
    }
    local.states += seen.size();
    layer = std::move(next);
    if (layer.empty()) break;
  }
  if (stats) *stats = local;
  return std::nullopt;
}

}  // namespace isq
