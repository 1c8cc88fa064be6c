#pragma once

// Boolean register services, the use and apply operators, a program-counter
// executor and the compute relation.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "isq/instr.hpp"
#include "isq/threads.hpp"
#include "isq/truth_table.hpp"

namespace isq {

//===----------------------------------------------------------------------===//
// Boolean registers and service values
//===----------------------------------------------------------------------===//

enum class RegisterState : std::uint8_t { False, True, Blocked };

constexpr RegisterState to_state(bool b) { return b ? RegisterState::True : RegisterState::False; }

inline std::string_view to_string(RegisterState s) {
  switch (s) {
    case RegisterState::False: return "F";
    case RegisterState::True: return "T";
    case RegisterState::Blocked: return "B";
  }
  return "?";
}

struct RegisterStep {
  RegisterState state;
  RegisterState reply;
  friend constexpr bool operator==(const RegisterStep&, const RegisterStep&) = default;
};

// Effect and yield of a Boolean register coincide.
constexpr RegisterStep register_step(RegisterState s, Method m) {
  if (s == RegisterState::Blocked) return {RegisterState::Blocked, RegisterState::Blocked};
  switch (m) {
    case Method::SetTrue: return {RegisterState::True, RegisterState::True};
    case Method::SetFalse: return {RegisterState::False, RegisterState::False};
    case Method::Get: return {s, s};
  }
  return {RegisterState::Blocked, RegisterState::Blocked};
}

// A Boolean register in some state, or the divergent service that accepts
// no method at all.
class ServiceValue {
 public:
  static constexpr ServiceValue reg(RegisterState s) { return ServiceValue(false, s); }
  static constexpr ServiceValue reg(bool b) { return ServiceValue(false, to_state(b)); }
  static constexpr ServiceValue divergent() { return ServiceValue(true, RegisterState::Blocked); }

  constexpr bool is_divergent() const { return divergent_; }
  constexpr RegisterState state() const { return state_; }

  // H(m); Blocked for the divergent service.
  constexpr RegisterState reply(Method m) const {
    return divergent_ ? RegisterState::Blocked : register_step(state_, m).reply;
  }
  // The service after processing m.
  constexpr ServiceValue derive(Method m) const {
    return divergent_ ? *this : ServiceValue(false, register_step(state_, m).state);
  }

  friend constexpr bool operator==(const ServiceValue& a, const ServiceValue& b) {
    return a.divergent_ == b.divergent_ && (a.divergent_ || a.state_ == b.state_);
  }

 private:
  constexpr ServiceValue(bool d, RegisterState s) : divergent_(d), state_(s) {}
  bool divergent_;
  RegisterState state_;
};

inline std::string to_string(const ServiceValue& h) {
  return h.is_divergent() ? "Divergent" : "Register(" + std::string(to_string(h.state())) + ")";
}

struct ServiceBinding {
  Focus focus;
  ServiceValue service;
};

//===----------------------------------------------------------------------===//
// use and apply
//===----------------------------------------------------------------------===//

namespace detail {

enum class Verdict : std::uint8_t { Foreign, TakeTrue, TakeFalse, Stuck };

struct Decision {
  Verdict verdict;
  ServiceValue derived;
};

// What a service bound to focus f makes of action a.
inline Decision decide(const BasicInstruction& a, Focus f, const ServiceValue& h) {
  if (!a.on(f)) return {Verdict::Foreign, h};
  if (h.is_divergent()) return {Verdict::Stuck, h};
  switch (h.reply(a.method)) {
    case RegisterState::True: return {Verdict::TakeTrue, h.derive(a.method)};
    case RegisterState::False: return {Verdict::TakeFalse, h.derive(a.method)};
    case RegisterState::Blocked: break;
  }
  return {Verdict::Stuck, h};
}

inline std::uint8_t service_code(const ServiceValue& h) {
  return h.is_divergent() ? 3 : static_cast<std::uint8_t>(h.state());
}

}  // namespace detail

// t /_f H, memoized on (node, service state).
inline Thread use(const Thread& t, Focus f, const ServiceValue& h) {
  struct Key {
    const void* node;
    std::uint8_t service;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return std::hash<const void*>{}(k.node) * 31 + k.service;
    }
  };
  std::unordered_map<Key, Thread, KeyHash> memo;
  std::function<Thread(const Thread&, const ServiceValue&)> go = [&](const Thread& x, const ServiceValue& s) -> Thread {
    switch (x.kind()) {
      case Thread::Kind::Stop: return x;  // TSU1
      case Thread::Kind::Dead: return x;  // TSU2
      default: break;
    }
    Key key{x.id(), detail::service_code(s)};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    Thread r;
    if (x.kind() == Thread::Kind::Tau) {
      r = Thread::tau(go(x.next(), s));  // TSU3
    } else {
      auto d = detail::decide(x.action(), f, s);
      switch (d.verdict) {
        case detail::Verdict::Foreign: r = Thread::post(x.action(), go(x.on_true(), s), go(x.on_false(), s)); break;  // TSU4
        case detail::Verdict::TakeTrue: r = Thread::tau(go(x.on_true(), d.derived)); break;    // TSU5
        case detail::Verdict::TakeFalse: r = Thread::tau(go(x.on_false(), d.derived)); break;  // TSU6
        case detail::Verdict::Stuck: r = Thread::dead(); break;                                // TSU7, TSU8
      }
    }
    memo.emplace(key, r);
    return r;
  };
  return go(t, h);
}

// t ._f H
inline ServiceValue apply(const Thread& t, Focus f, ServiceValue h) {
  Thread x = t;
  for (;;) {
    switch (x.kind()) {
      case Thread::Kind::Stop: return h;                         // TSA1
      case Thread::Kind::Dead: return ServiceValue::divergent();  // TSA2
      case Thread::Kind::Tau: x = x.next(); continue;            // TSA3
      case Thread::Kind::PostCond: break;
    }
    auto d = detail::decide(x.action(), f, h);
    switch (d.verdict) {
      case detail::Verdict::Foreign: return ServiceValue::divergent();  // TSA4
      case detail::Verdict::TakeTrue: x = x.on_true(); h = d.derived; break;    // TSA5
      case detail::Verdict::TakeFalse: x = x.on_false(); h = d.derived; break;  // TSA6
      case detail::Verdict::Stuck: return ServiceValue::divergent();    // TSA7, TSA8
    }
  }
}

//===----------------------------------------------------------------------===//
// Lazy evaluation of apply(use(...use(t, f1, H1)..., fk, Hk), f, H)
//===----------------------------------------------------------------------===//

// One unfolding step of a thread-like source. For Tau the continuation is
// on_true. A source type S provides `Head<S> head_of(const S&)`.
template <class S>
struct Head {
  Thread::Kind kind = Thread::Kind::Dead;
  BasicInstruction action{};
  S on_true{};
  S on_false{};
};

inline Head<Thread> head_of(const Thread& t) {
  Head<Thread> h;
  h.kind = t.kind();
  if (h.kind == Thread::Kind::Tau) h.on_true = t.next();
  if (h.kind == Thread::Kind::PostCond) {
    h.action = t.action();
    h.on_true = t.on_true();
    h.on_false = t.on_false();
  }
  return h;
}

// Walks the single path that apply follows through the use chain without
// building the intermediate threads. uses[0] is the innermost use.
template <class S>
ServiceValue apply_through_uses(S source, std::vector<ServiceBinding> uses, Focus f, ServiceValue h) {
  for (;;) {
    Head<S> head = head_of(source);
    switch (head.kind) {
      case Thread::Kind::Stop: return h;                         // TSU1, TSA1
      case Thread::Kind::Dead: return ServiceValue::divergent();  // TSU2, TSA2
      case Thread::Kind::Tau: source = std::move(head.on_true); continue;  // TSU3, TSA3
      case Thread::Kind::PostCond: break;
    }
    bool consumed = false;
    for (auto& b : uses) {
      auto d = detail::decide(head.action, b.focus, b.service);
      if (d.verdict == detail::Verdict::Foreign) continue;  // TSU4: try the next use outward
      if (d.verdict == detail::Verdict::Stuck) return ServiceValue::divergent();  // TSU7/8, then TSU2 and TSA2
      // TSU5/6 leave a tau, which the outer uses (TSU3) and apply (TSA3) pass.
      b.service = d.derived;
      source = d.verdict == detail::Verdict::TakeTrue ? std::move(head.on_true) : std::move(head.on_false);
      consumed = true;
      break;
    }
    if (consumed) continue;
    auto d = detail::decide(head.action, f, h);
    switch (d.verdict) {
      case detail::Verdict::Foreign: return ServiceValue::divergent();  // TSA4
      case detail::Verdict::TakeTrue: source = std::move(head.on_true); h = d.derived; break;
      case detail::Verdict::TakeFalse: source = std::move(head.on_false); h = d.derived; break;
      case detail::Verdict::Stuck: return ServiceValue::divergent();
    }
  }
}

//===----------------------------------------------------------------------===//
// Registers and the program-counter executor
//===----------------------------------------------------------------------===//

struct RegisterFile {
  std::vector<bool> inputs;
  std::map<unsigned, bool> aux;  // absent entries read as False
  bool out = false;

  bool aux_value(unsigned i) const {
    auto it = aux.find(i);
    return it != aux.end() && it->second;
  }
  friend bool operator==(const RegisterFile&, const RegisterFile&) = default;
};

struct Terminated {
  RegisterFile registers;
};
struct Deadlocked {};
struct Divergent {
  std::string reason;
};

struct RunOutcome {
  std::variant<Terminated, Deadlocked, Divergent> result;
  std::size_t steps = 0;

  bool terminated() const { return std::holds_alternative<Terminated>(result); }
  bool deadlocked() const { return std::holds_alternative<Deadlocked>(result); }
  bool divergent() const { return std::holds_alternative<Divergent>(result); }
  const RegisterFile& registers() const { return std::get<Terminated>(result).registers; }
  // The value left in out, if the run terminated.
  std::optional<bool> out() const {
    if (auto* t = std::get_if<Terminated>(&result)) return t->registers.out;
    return std::nullopt;
  }
};

// What the algebra returns for the out register: Register(out) after
// termination, Divergent otherwise.
inline ServiceValue to_service(const RunOutcome& r) {
  if (auto v = r.out()) return ServiceValue::reg(*v);
  return ServiceValue::divergent();
}

namespace detail {

// Next position after executing instruction at pc with the given reply.
inline std::size_t successor(const PrimitiveInstruction& u, std::size_t pc, bool reply) {
  switch (u.kind) {
    case InstrKind::PosTest: return reply ? pc + 1 : pc + 2;
    case InstrKind::NegTest: return reply ? pc + 2 : pc + 1;
    default: return pc + 1;
  }
}

// Serves a register action against the register file. Returns the reply,
// or nothing when the focus has no register (an input beyond the vector).
inline std::optional<bool> serve(RegisterFile& regs, const BasicInstruction& b) {
  auto step = [&](bool cur) {
    auto r = register_step(to_state(cur), b.method);
    return std::pair{r.state == RegisterState::True, r.reply == RegisterState::True};
  };
  switch (b.focus.kind) {
    case FocusKind::In: {
      if (b.focus.index > regs.inputs.size()) return std::nullopt;
      auto [s, r] = step(regs.inputs[b.focus.index - 1]);
      regs.inputs[b.focus.index - 1] = s;
      return r;
    }
    case FocusKind::Aux: {
      auto [s, r] = step(regs.aux_value(b.focus.index));
      regs.aux[b.focus.index] = s;
      return r;
    }
    case FocusKind::Out: {
      auto [s, r] = step(regs.out);
      regs.out = s;
      return r;
    }
  }
  return std::nullopt;
}

inline RegisterFile initial_registers(const InstructionSequence& x, const std::vector<bool>& inputs) {
  RegisterFile regs;
  regs.inputs = inputs;
  unsigned l = classify(x).max_aux_index;
  for (unsigned i = 1; i <= l; ++i) regs.aux[i] = false;
  return regs;
}

}  // namespace detail

inline RunOutcome run(const InstructionSequence& x, const std::vector<bool>& inputs) {
  if (classify(x).max_param_index != 0) throw PreconditionError("run: split/reply instructions need run_splitting");
  RegisterFile regs = detail::initial_registers(x, inputs);
  const std::size_t k = x.size();
  std::size_t pc = 1, steps = 0;
  for (;;) {
    if (pc > k) return {Deadlocked{}, steps};
    const PrimitiveInstruction& u = x.at(pc);
    ++steps;
    switch (u.kind) {
      case InstrKind::Term: return {Terminated{regs}, steps};
      case InstrKind::Jump:
        if (u.jump == 0) return {Deadlocked{}, steps};
        pc += u.jump;
        continue;
      default: break;
    }
    auto reply = detail::serve(regs, u.basic);
    if (!reply) return {Divergent{"unserved focus " + to_string(u.basic.focus)}, steps};
    pc = detail::successor(u, pc, *reply);
  }
}

//===----------------------------------------------------------------------===//
// The compute relation
//===----------------------------------------------------------------------===//

// aux_1..aux_l with BR_F (l the largest aux index in x), then in_1..in_n
// with BR_{b_i}.
inline std::vector<ServiceBinding> compute_bindings(const InstructionSequence& x, const std::vector<bool>& inputs) {
  std::vector<ServiceBinding> uses;
  unsigned l = classify(x).max_aux_index;
  for (unsigned i = 1; i <= l; ++i) uses.push_back({Focus::aux(i), ServiceValue::reg(false)});
  for (std::size_t i = 0; i < inputs.size(); ++i)
    uses.push_back({Focus::in(static_cast<unsigned>(i + 1)), ServiceValue::reg(inputs[i])});
  return uses;
}

// The compute formula evaluated literally: extraction, then each use
// operator building its residual thread, then apply on out.
inline ServiceValue algebraic_outcome(const InstructionSequence& x, const std::vector<bool>& inputs) {
  Thread t = extract(x);
  for (const auto& b : compute_bindings(x, inputs)) t = use(t, b.focus, b.service);
  return apply(t, Focus::out(), ServiceValue::reg(false));
}

inline bool check_computes(const InstructionSequence& x, const TruthTable& f) {
  if (!classify(x).is_isbr) throw PreconditionError("check_computes: sequence is not in ISbr");
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto r = run(x, input_vector(f.arity(), i));
    if (!f[i] || r.out() != f[i]) return false;
  }
  return true;
}

}  // namespace isq
