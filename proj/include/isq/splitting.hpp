#pragma once

// Instruction sequences with split/reply: parameter instantiation, cyclic
// interleaving with thread splitting, and a queue-based executor.

#include <deque>
#include <functional>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "isq/instr.hpp"
#include "isq/services.hpp"
#include "isq/threads.hpp"
#include "isq/truth_table.hpp"

namespace isq {

using ThreadVector = std::vector<Thread>;

//===----------------------------------------------------------------------===//
// Parameter instantiation and deadlock at termination
//===----------------------------------------------------------------------===//

inline Thread instantiate(unsigned p, bool b, const Thread& t) {
  std::unordered_map<const void*, Thread> memo;
  std::function<Thread(const Thread&)> go = [&](const Thread& x) -> Thread {
    switch (x.kind()) {
      case Thread::Kind::Stop:
      case Thread::Kind::Dead:
        return x;  // BPI1, BPI2
      default:
        break;
    }
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    Thread r;
    if (x.kind() == Thread::Kind::Tau) {
      r = Thread::tau(go(x.next()));  // BPI3
    } else {
      const BasicInstruction& a = x.action();
      if (a.kind == BasicKind::Split && a.param == p)
        r = Thread::dead();  // BPI6
      else if (a.kind == BasicKind::Reply && a.param == p)
        r = Thread::tau(go(b ? x.on_true() : x.on_false()));  // BPI8, BPI9
      else
        r = Thread::post(a, go(x.on_true()), go(x.on_false()));  // BPI4, BPI5, BPI7
    }
    memo.emplace(x.id(), r);
    return r;
  };
  return go(t);
}

inline Thread deadlock_at_termination(const Thread& t) {
  std::unordered_map<const void*, Thread> memo;
  std::function<Thread(const Thread&)> go = [&](const Thread& x) -> Thread {
    switch (x.kind()) {
      case Thread::Kind::Stop:
      case Thread::Kind::Dead:
        return Thread::dead();  // S2D1, S2D2
      default:
        break;
    }
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    Thread r = x.kind() == Thread::Kind::Tau ? Thread::tau(go(x.next()))                                   // S2D3
                                             : Thread::post(x.action(), go(x.on_true()), go(x.on_false()));  // S2D4-6
    memo.emplace(x.id(), r);
    return r;
  };
  return go(t);
}

//===----------------------------------------------------------------------===//
// Cyclic interleaving with thread splitting
//===----------------------------------------------------------------------===//

// csi(threads), wrapped in deadlock-at-termination when the flag is set.
// Nested wrappers collapse, so one flag suffices.
struct CsiState {
  ThreadVector threads;
  bool deadlock_at_end = false;
};

inline Head<CsiState> head_of(const CsiState& state) {
  Head<CsiState> h;
  std::size_t front = 0;
  bool sd = state.deadlock_at_end;
  const ThreadVector& v = state.threads;
  auto rest_with = [&](std::initializer_list<Thread> tail) {
    CsiState s;
    s.threads.assign(v.begin() + static_cast<std::ptrdiff_t>(front) + 1, v.end());
    s.threads.insert(s.threads.end(), tail);
    s.deadlock_at_end = sd;
    return s;
  };
  for (;; ++front) {
    if (front == v.size()) {
      h.kind = sd ? Thread::Kind::Dead : Thread::Kind::Stop;  // CSI1, S2D1
      return h;
    }
    const Thread& t = v[front];
    switch (t.kind()) {
      case Thread::Kind::Stop: continue;              // CSI2
      case Thread::Kind::Dead: sd = true; continue;   // CSI3
      case Thread::Kind::Tau:                         // CSI4
        h.kind = Thread::Kind::Tau;
        h.on_true = rest_with({t.next()});
        return h;
      case Thread::Kind::PostCond: break;
    }
    const BasicInstruction& a = t.action();
    if (a.kind == BasicKind::Reply) {  // CSI7: instantiated replies were already replaced
      sd = true;
      continue;
    }
    if (a.kind == BasicKind::Split) {  // CSI6
      h.kind = Thread::Kind::Tau;
      h.on_true = rest_with({instantiate(a.param, true, t.on_true()), instantiate(a.param, false, t.on_false())});
      return h;
    }
    h.kind = Thread::Kind::PostCond;  // CSI5
    h.action = a;
    h.on_true = rest_with({t.on_true()});
    h.on_false = rest_with({t.on_false()});
    return h;
  }
}

// Fully built interleaving. Identical states are shared.
inline Thread csi(const ThreadVector& v) {
  struct KeyHash {
    std::size_t operator()(const std::pair<std::vector<const void*>, bool>& k) const noexcept {
      std::size_t h = k.second ? 0x51ed27 : 0;
      for (const void* p : k.first) h = h * 1000003U ^ std::hash<const void*>{}(p);
      return h;
    }
  };
  std::unordered_map<std::pair<std::vector<const void*>, bool>, Thread, KeyHash> memo;
  // Keeps every keyed thread alive so node addresses stay unique.
  std::vector<CsiState> keep;
  std::function<Thread(const CsiState&)> go = [&](const CsiState& s) -> Thread {
    std::pair<std::vector<const void*>, bool> key;
    for (const auto& t : s.threads) key.first.push_back(t.id());
    key.second = s.deadlock_at_end;
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    keep.push_back(s);
    Head<CsiState> h = head_of(s);
    Thread r;
    switch (h.kind) {
      case Thread::Kind::Stop: r = Thread::stop(); break;
      case Thread::Kind::Dead: r = Thread::dead(); break;
      case Thread::Kind::Tau: r = Thread::tau(go(h.on_true)); break;
      case Thread::Kind::PostCond: r = Thread::post(h.action, go(h.on_true), go(h.on_false)); break;
    }
    memo.emplace(std::move(key), r);
    return r;
  };
  return go(CsiState{v, false});
}

// apply(use-chain(csi(<extract(X)>)), out, BR_F), with every intermediate
// thread built explicitly.
inline ServiceValue splitting_algebraic_outcome(const InstructionSequence& x, const std::vector<bool>& inputs) {
  Thread t = csi({extract(x)});
  for (const auto& b : compute_bindings(x, inputs)) t = use(t, b.focus, b.service);
  return apply(t, Focus::out(), ServiceValue::reg(false));
}

// Same value, following only the path apply takes.
inline ServiceValue splitting_fused_outcome(const InstructionSequence& x, const std::vector<bool>& inputs) {
  return apply_through_uses(CsiState{{extract(x)}, false}, compute_bindings(x, inputs), Focus::out(),
                            ServiceValue::reg(false));
}

//===----------------------------------------------------------------------===//
// Queue executor
//===----------------------------------------------------------------------===//

struct BranchState {
  std::size_t pc = 1;
  std::map<unsigned, bool> valuation;
};

// Round-robin execution of all branches over shared registers. Accepts any
// sequence; run_splitting restricts it to SISbr.
inline RunOutcome run_interleaved(const InstructionSequence& x, const std::vector<bool>& inputs) {
  const std::size_t k = x.size();
  std::size_t splits = 0;
  for (const auto& u : x)
    if (u.has_basic() && u.basic.kind == BasicKind::Split) ++splits;
  const std::size_t budget = ((std::size_t{1} << std::min<std::size_t>(splits, 40)) + 1) * k;

  RegisterFile regs = detail::initial_registers(x, inputs);
  std::deque<BranchState> queue{BranchState{}};
  bool dead = false;
  std::size_t steps = 0;

  while (!queue.empty()) {
    BranchState br = std::move(queue.front());
    queue.pop_front();
    while (br.pc <= k && x.at(br.pc).kind == InstrKind::Jump) {
      unsigned l = x.at(br.pc).jump;
      if (l == 0) break;
      br.pc += l;
    }
    if (br.pc > k || x.at(br.pc).kind == InstrKind::Jump) {  // fell off, overlong jump or #0
      dead = true;
      continue;
    }
    const PrimitiveInstruction& u = x.at(br.pc);
    if (u.kind == InstrKind::Term) continue;

    if (++steps > budget) throw std::logic_error("run_interleaved: step budget exceeded");
    const BasicInstruction& b = u.basic;
    if (b.kind == BasicKind::Split) {
      if (br.valuation.count(b.param)) {  // re-split of an instantiated parameter
        dead = true;
        continue;
      }
      BranchState t = br, f = br;
      t.valuation[b.param] = true;
      t.pc = detail::successor(u, br.pc, true);
      f.valuation[b.param] = false;
      f.pc = detail::successor(u, br.pc, false);
      queue.push_back(std::move(t));
      queue.push_back(std::move(f));
      continue;
    }
    if (b.kind == BasicKind::Reply) {
      auto it = br.valuation.find(b.param);
      if (it == br.valuation.end()) {  // reply before the parameter was split
        dead = true;
        continue;
      }
      br.pc = detail::successor(u, br.pc, it->second);
      queue.push_back(std::move(br));
      continue;
    }
    auto reply = detail::serve(regs, b);
    if (!reply) return {Divergent{"unserved focus " + to_string(b.focus)}, steps};
    br.pc = detail::successor(u, br.pc, *reply);
    queue.push_back(std::move(br));
  }
  if (dead) return {Deadlocked{}, steps};
  return {Terminated{regs}, steps};
}

inline RunOutcome run_splitting(const InstructionSequence& x, const std::vector<bool>& inputs) {
  if (!classify(x).is_sisbr) throw PreconditionError("run_splitting: sequence is not in SISbr");
  return run_interleaved(x, inputs);
}

inline bool check_splitting_computes(const InstructionSequence& x, const TruthTable& f) {
  if (!classify(x).is_sisbr) throw PreconditionError("check_splitting_computes: sequence is not in SISbr");
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto r = run_interleaved(x, input_vector(f.arity(), i));
    if (!f[i] || r.out() != f[i]) return false;
  }
  return true;
}

}  // namespace isq
