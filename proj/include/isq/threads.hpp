#pragma once

// Threads (finite behaviours), thread extraction from instruction sequences,
// and the explicit-substitution terms used for linear-size extraction.

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "isq/instr.hpp"

namespace isq {

namespace detail {

struct PairHash {
  std::size_t operator()(const std::pair<const void*, const void*>& p) const noexcept {
    auto a = reinterpret_cast<std::uintptr_t>(p.first);
    auto b = reinterpret_cast<std::uintptr_t>(p.second);
    return std::hash<std::uintptr_t>{}(a * 0x9e3779b97f4a7c15ULL ^ (b + 0x632be59bd9b4e019ULL));
  }
};

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

}  // namespace detail

//===----------------------------------------------------------------------===//
// Thread
//===----------------------------------------------------------------------===//

struct ThreadNode;

// Immutable, shared. Subterms are shared freely, so a thread is a DAG whose
// unfolding is the tree it denotes. A null node is D.
class Thread {
 public:
  enum class Kind : std::uint8_t { Stop, Dead, Tau, PostCond };

  Thread() = default;

  static Thread stop();
  static Thread dead() { return Thread(); }
  static Thread tau(Thread next);
  static Thread post(const BasicInstruction& a, Thread on_true, Thread on_false);
  // a o x
  static Thread prefix(const BasicInstruction& a, Thread next) { return post(a, next, next); }

  Kind kind() const;
  bool is_stop() const { return kind() == Kind::Stop; }
  bool is_dead() const { return node_ == nullptr; }

  // PostCond only.
  const BasicInstruction& action() const;
  // Tau: next() == on_true().
  const Thread& next() const;
  const Thread& on_true() const;
  const Thread& on_false() const;

  const void* id() const noexcept { return node_.get(); }

 private:
  explicit Thread(std::shared_ptr<const ThreadNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ThreadNode> node_;
};

struct ThreadNode {
  Thread::Kind kind;
  BasicInstruction action;
  Thread left;
  Thread right;
};

inline Thread Thread::stop() {
  static const auto node = std::make_shared<const ThreadNode>(ThreadNode{Kind::Stop, {}, {}, {}});
  return Thread(node);
}

inline Thread Thread::tau(Thread next) {
  return Thread(std::make_shared<const ThreadNode>(ThreadNode{Kind::Tau, {}, std::move(next), {}}));
}

inline Thread Thread::post(const BasicInstruction& a, Thread on_true, Thread on_false) {
  return Thread(std::make_shared<const ThreadNode>(ThreadNode{Kind::PostCond, a, std::move(on_true), std::move(on_false)}));
}

inline Thread::Kind Thread::kind() const { return node_ ? node_->kind : Kind::Dead; }
inline const BasicInstruction& Thread::action() const { return node_->action; }
inline const Thread& Thread::next() const { return node_->left; }
inline const Thread& Thread::on_true() const { return node_->left; }
inline const Thread& Thread::on_false() const { return kind() == Kind::Tau ? node_->left : node_->right; }

// Structural equality of the denoted trees. Pairs already compared are
// remembered, so shared subterms are visited once.
inline bool operator==(const Thread& a, const Thread& b) {
  std::unordered_set<std::pair<const void*, const void*>, detail::PairHash> seen;
  std::function<bool(const Thread&, const Thread&)> eq = [&](const Thread& x, const Thread& y) -> bool {
    if (x.id() == y.id()) return true;
    if (x.kind() != y.kind()) return false;
    switch (x.kind()) {
      case Thread::Kind::Stop:
      case Thread::Kind::Dead:
        return true;
      default:
        break;
    }
    if (!seen.insert({x.id(), y.id()}).second) return true;
    if (x.kind() == Thread::Kind::Tau) return eq(x.next(), y.next());
    return x.action() == y.action() && eq(x.on_true(), y.on_true()) && eq(x.on_false(), y.on_false());
  };
  return eq(a, b);
}

// Debug text: "S", "D", "tau . t", "(a ? t : f)". Exponential on DAGs with
// much sharing; meant for small terms.
inline std::string to_string(const Thread& t) {
  switch (t.kind()) {
    case Thread::Kind::Stop: return "S";
    case Thread::Kind::Dead: return "D";
    case Thread::Kind::Tau: return "tau . " + to_string(t.next());
    case Thread::Kind::PostCond:
      return "(" + to_string(t.action()) + " ? " + to_string(t.on_true()) + " : " + to_string(t.on_false()) + ")";
  }
  return "?";
}

// Size of the denoted tree (saturating).
inline std::uint64_t tsize(const Thread& t) {
  std::unordered_map<const void*, std::uint64_t> memo;
  std::function<std::uint64_t(const Thread&)> go = [&](const Thread& x) -> std::uint64_t {
    switch (x.kind()) {
      case Thread::Kind::Stop:
      case Thread::Kind::Dead:
        return 1;
      default:
        break;
    }
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    std::uint64_t s = x.kind() == Thread::Kind::Tau
                          ? detail::sat_add(detail::sat_add(go(x.next()), go(x.next())), 1)
                          : detail::sat_add(detail::sat_add(go(x.on_true()), go(x.on_false())), 1);
    memo.emplace(x.id(), s);
    return s;
  };
  return go(t);
}

// Number of distinct shared nodes (the in-memory size).
inline std::size_t dag_size(const Thread& t) {
  std::unordered_set<const void*> seen;
  std::vector<Thread> stack{t};
  std::size_t n = 0;
  while (!stack.empty()) {
    Thread x = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(x.id()).second) continue;
    ++n;
    if (x.kind() == Thread::Kind::Tau) stack.push_back(x.next());
    if (x.kind() == Thread::Kind::PostCond) {
      stack.push_back(x.on_true());
      stack.push_back(x.on_false());
    }
  }
  return n;
}

//===----------------------------------------------------------------------===//
// Thread extraction
//===----------------------------------------------------------------------===//

// Computed per position from the back, so each suffix thread is built once
// and shared: <u_i ; ... ; u_k> depends only on i.
inline Thread extract(const InstructionSequence& x) {
  const std::size_t k = x.size();
  std::vector<Thread> from(k + 2);  // from[i] = thread of the suffix at position i; D past the end
  auto at = [&](std::size_t i) -> Thread { return i <= k ? from[i] : Thread::dead(); };
  for (std::size_t i = k; i >= 1; --i) {
    const PrimitiveInstruction& u = x.at(i);
    switch (u.kind) {
      case InstrKind::Term:
        from[i] = Thread::stop();
        break;
      case InstrKind::Jump:
        // #0 deadlocks; a jump past the end deadlocks.
        from[i] = u.jump == 0 ? Thread::dead() : at(i + u.jump);
        break;
      case InstrKind::Plain:
        from[i] = Thread::prefix(u.basic, at(i + 1));
        break;
      case InstrKind::PosTest:
        from[i] = i == k ? Thread::prefix(u.basic, Thread::dead()) : Thread::post(u.basic, at(i + 1), at(i + 2));
        break;
      case InstrKind::NegTest:
        from[i] = i == k ? Thread::prefix(u.basic, Thread::dead()) : Thread::post(u.basic, at(i + 2), at(i + 1));
        break;
    }
  }
  return from[1];
}

//===----------------------------------------------------------------------===//
// Terms with variables and explicit substitution
//===----------------------------------------------------------------------===//

struct XThreadNode;

class XThread {
 public:
  enum class Kind : std::uint8_t { Stop, Dead, Tau, PostCond, Var, Subst };

  XThread() = default;  // D

  static XThread stop();
  static XThread dead() { return XThread(); }
  static XThread tau(XThread next);
  static XThread post(const BasicInstruction& a, XThread on_true, XThread on_false);
  static XThread var(unsigned i);
  // [bound / x_v] body
  static XThread subst(unsigned v, XThread bound, XThread body);

  Kind kind() const;
  const BasicInstruction& action() const;
  unsigned index() const;  // Var and Subst
  const XThread& next() const;
  const XThread& on_true() const;
  const XThread& on_false() const;
  const XThread& bound() const;
  const XThread& body() const;

  const void* id() const noexcept { return node_.get(); }

 private:
  explicit XThread(std::shared_ptr<const XThreadNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const XThreadNode> node_;
};

struct XThreadNode {
  XThread::Kind kind;
  BasicInstruction action;
  unsigned index;
  XThread left;
  XThread right;
};

inline XThread XThread::stop() {
  static const auto node = std::make_shared<const XThreadNode>(XThreadNode{Kind::Stop, {}, 0, {}, {}});
  return XThread(node);
}
inline XThread XThread::tau(XThread next) {
  return XThread(std::make_shared<const XThreadNode>(XThreadNode{Kind::Tau, {}, 0, std::move(next), {}}));
}
inline XThread XThread::post(const BasicInstruction& a, XThread on_true, XThread on_false) {
  return XThread(
      std::make_shared<const XThreadNode>(XThreadNode{Kind::PostCond, a, 0, std::move(on_true), std::move(on_false)}));
}
inline XThread XThread::var(unsigned i) {
  return XThread(std::make_shared<const XThreadNode>(XThreadNode{Kind::Var, {}, i, {}, {}}));
}
inline XThread XThread::subst(unsigned v, XThread bound, XThread body) {
  return XThread(
      std::make_shared<const XThreadNode>(XThreadNode{Kind::Subst, {}, v, std::move(bound), std::move(body)}));
}

inline XThread::Kind XThread::kind() const { return node_ ? node_->kind : Kind::Dead; }
inline const BasicInstruction& XThread::action() const { return node_->action; }
inline unsigned XThread::index() const { return node_->index; }
inline const XThread& XThread::next() const { return node_->left; }
inline const XThread& XThread::on_true() const { return node_->left; }
inline const XThread& XThread::on_false() const { return kind() == Kind::Tau ? node_->left : node_->right; }
inline const XThread& XThread::bound() const { return node_->left; }
inline const XThread& XThread::body() const { return node_->right; }

inline bool operator==(const XThread& a, const XThread& b) {
  std::unordered_set<std::pair<const void*, const void*>, detail::PairHash> seen;
  std::function<bool(const XThread&, const XThread&)> eq = [&](const XThread& x, const XThread& y) -> bool {
    if (x.id() == y.id()) return true;
    if (x.kind() != y.kind()) return false;
    switch (x.kind()) {
      case XThread::Kind::Stop:
      case XThread::Kind::Dead:
        return true;
      case XThread::Kind::Var:
        return x.index() == y.index();
      default:
        break;
    }
    if (!seen.insert({x.id(), y.id()}).second) return true;
    switch (x.kind()) {
      case XThread::Kind::Tau: return eq(x.next(), y.next());
      case XThread::Kind::PostCond:
        return x.action() == y.action() && eq(x.on_true(), y.on_true()) && eq(x.on_false(), y.on_false());
      case XThread::Kind::Subst: return x.index() == y.index() && eq(x.bound(), y.bound()) && eq(x.body(), y.body());
      default: return true;
    }
  };
  return eq(a, b);
}

inline std::string to_string(const XThread& t) {
  switch (t.kind()) {
    case XThread::Kind::Stop: return "S";
    case XThread::Kind::Dead: return "D";
    case XThread::Kind::Tau: return "tau . " + to_string(t.next());
    case XThread::Kind::PostCond:
      return "(" + to_string(t.action()) + " ? " + to_string(t.on_true()) + " : " + to_string(t.on_false()) + ")";
    case XThread::Kind::Var: return "x" + std::to_string(t.index());
    case XThread::Kind::Subst:
      return "[" + to_string(t.bound()) + " / x" + std::to_string(t.index()) + "] " + to_string(t.body());
  }
  return "?";
}

inline std::uint64_t tsize(const XThread& t) {
  std::unordered_map<const void*, std::uint64_t> memo;
  std::function<std::uint64_t(const XThread&)> go = [&](const XThread& x) -> std::uint64_t {
    switch (x.kind()) {
      case XThread::Kind::Stop:
      case XThread::Kind::Dead:
      case XThread::Kind::Var:
        return 1;
      default:
        break;
    }
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    std::uint64_t s = 0;
    switch (x.kind()) {
      case XThread::Kind::Tau: s = detail::sat_add(detail::sat_add(go(x.next()), go(x.next())), 1); break;
      case XThread::Kind::PostCond: s = detail::sat_add(detail::sat_add(go(x.on_true()), go(x.on_false())), 1); break;
      case XThread::Kind::Subst: s = detail::sat_add(detail::sat_add(go(x.bound()), go(x.body())), 1); break;
      default: break;
    }
    memo.emplace(x.id(), s);
    return s;
  };
  return go(t);
}

inline XThread to_xthread(const Thread& t) {
  std::unordered_map<const void*, XThread> memo;
  std::function<XThread(const Thread&)> go = [&](const Thread& x) -> XThread {
    switch (x.kind()) {
      case Thread::Kind::Stop: return XThread::stop();
      case Thread::Kind::Dead: return XThread::dead();
      default: break;
    }
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    XThread r = x.kind() == Thread::Kind::Tau ? XThread::tau(go(x.next()))
                                              : XThread::post(x.action(), go(x.on_true()), go(x.on_false()));
    memo.emplace(x.id(), r);
    return r;
  };
  return go(t);
}

// rho(u_1 ; ... ; u_{k+1}) =
//   [<u_{k+1}> / x_{k+1}] ([rho'_k(u_k) / x_k] ( ... ([rho'_1(u_1) / x_1] x_1) ... ))
inline XThread extract_compact(const InstructionSequence& x) {
  const std::size_t n = x.size();
  if (n == 1) return to_xthread(extract(x));
  auto rho_i = [](std::size_t i, const PrimitiveInstruction& u) -> XThread {
    auto v = [](std::size_t j) { return XThread::var(static_cast<unsigned>(j)); };
    switch (u.kind) {
      case InstrKind::Term: return XThread::stop();
      case InstrKind::Jump: return u.jump == 0 ? XThread::dead() : v(i + u.jump);
      case InstrKind::Plain: return XThread::post(u.basic, v(i + 1), v(i + 1));
      case InstrKind::PosTest: return XThread::post(u.basic, v(i + 1), v(i + 2));
      case InstrKind::NegTest: return XThread::post(u.basic, v(i + 2), v(i + 1));
    }
    return XThread::dead();
  };
  XThread body = XThread::var(1);
  for (std::size_t i = 1; i < n; ++i) body = XThread::subst(static_cast<unsigned>(i), rho_i(i, x.at(i)), body);
  InstructionSequence last({x.at(n)});
  return XThread::subst(static_cast<unsigned>(n), to_xthread(extract(last)), body);
}

namespace detail {

// [p / x_v] q for a substitution-free q. With no binders left in q there is
// no capture to worry about.
inline XThread substitute(const XThread& q, unsigned v, const XThread& p) {
  std::unordered_map<const void*, XThread> memo;
  std::function<XThread(const XThread&)> go = [&](const XThread& t) -> XThread {
    switch (t.kind()) {
      case XThread::Kind::Stop:
      case XThread::Kind::Dead:
        return t;  // ES3, ES4
      case XThread::Kind::Var:
        return t.index() == v ? p : t;  // ES1, ES2
      default:
        break;
    }
    if (auto it = memo.find(t.id()); it != memo.end()) return it->second;
    XThread r = t.kind() == XThread::Kind::Tau ? XThread::tau(go(t.next()))  // ES5 with a = tau
                                               : XThread::post(t.action(), go(t.on_true()), go(t.on_false()));  // ES5
    memo.emplace(t.id(), r);
    return r;
  };
  return go(q);
}

}  // namespace detail

// Removes every binder, innermost first. Variables still free at the end
// stand for positions past the end of the sequence and become D.
inline Thread eval_xthread(const XThread& t) {
  std::unordered_map<const void*, XThread> memo;
  std::function<XThread(const XThread&)> norm = [&](const XThread& x) -> XThread {
    switch (x.kind()) {
      case XThread::Kind::Stop:
      case XThread::Kind::Dead:
      case XThread::Kind::Var:
        return x;
      default:
        break;
    }
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    XThread r;
    switch (x.kind()) {
      case XThread::Kind::Tau: r = XThread::tau(norm(x.next())); break;
      case XThread::Kind::PostCond: r = XThread::post(x.action(), norm(x.on_true()), norm(x.on_false())); break;
      case XThread::Kind::Subst: r = detail::substitute(norm(x.body()), x.index(), norm(x.bound())); break;
      default: break;
    }
    memo.emplace(x.id(), r);
    return r;
  };
  XThread closed = norm(t);

  std::unordered_map<const void*, Thread> out;
  std::function<Thread(const XThread&)> conv = [&](const XThread& x) -> Thread {
    switch (x.kind()) {
      case XThread::Kind::Stop: return Thread::stop();
      case XThread::Kind::Dead:
      case XThread::Kind::Var:
        return Thread::dead();
      default:
        break;
    }
    if (auto it = out.find(x.id()); it != out.end()) return it->second;
    Thread r = x.kind() == XThread::Kind::Tau ? Thread::tau(conv(x.next()))
                                              : Thread::post(x.action(), conv(x.on_true()), conv(x.on_false()));
    out.emplace(x.id(), r);
    return r;
  };
  return conv(closed);
}

}  // namespace isq
