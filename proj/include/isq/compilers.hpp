#pragma once

// CNFs, basic Boolean formulas and circuits, their evaluators, and the
// compilers producing instruction sequences that compute them.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "isq/instr.hpp"

namespace isq {

//===----------------------------------------------------------------------===//
// Source types
//===----------------------------------------------------------------------===//

struct Literal {
  unsigned var = 1;
  bool negated = false;
  friend constexpr auto operator<=>(const Literal&, const Literal&) = default;
};

using Clause = std::vector<Literal>;

struct Cnf {
  unsigned num_vars = 0;
  std::vector<Clause> clauses;
  friend bool operator==(const Cnf&, const Cnf&) = default;
};

struct FormulaNode;

class BoolFormula {
 public:
  enum class Kind : std::uint8_t { Var, Not, Or, And };

  static BoolFormula var(unsigned k);
  static BoolFormula lnot(BoolFormula f);
  static BoolFormula lor(BoolFormula a, BoolFormula b);
  static BoolFormula land(BoolFormula a, BoolFormula b);

  Kind kind() const;
  unsigned index() const;  // Var
  const BoolFormula& left() const;  // Not: the operand
  const BoolFormula& right() const;

 private:
  explicit BoolFormula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const FormulaNode> node_;
};

struct FormulaNode {
  BoolFormula::Kind kind;
  unsigned index;
  std::vector<BoolFormula> sub;
};

inline BoolFormula BoolFormula::var(unsigned k) {
  if (k == 0) throw Error("formula variables are numbered from 1");
  return BoolFormula(std::make_shared<const FormulaNode>(FormulaNode{Kind::Var, k, {}}));
}
inline BoolFormula BoolFormula::lnot(BoolFormula f) {
  return BoolFormula(std::make_shared<const FormulaNode>(FormulaNode{Kind::Not, 0, {std::move(f)}}));
}
inline BoolFormula BoolFormula::lor(BoolFormula a, BoolFormula b) {
  return BoolFormula(std::make_shared<const FormulaNode>(FormulaNode{Kind::Or, 0, {std::move(a), std::move(b)}}));
}
inline BoolFormula BoolFormula::land(BoolFormula a, BoolFormula b) {
  return BoolFormula(std::make_shared<const FormulaNode>(FormulaNode{Kind::And, 0, {std::move(a), std::move(b)}}));
}
inline BoolFormula::Kind BoolFormula::kind() const { return node_->kind; }
inline unsigned BoolFormula::index() const { return node_->index; }
inline const BoolFormula& BoolFormula::left() const { return node_->sub[0]; }
inline const BoolFormula& BoolFormula::right() const { return node_->sub[1]; }

inline bool operator==(const BoolFormula& a, const BoolFormula& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case BoolFormula::Kind::Var: return a.index() == b.index();
    case BoolFormula::Kind::Not: return a.left() == b.left();
    default: return a.left() == b.left() && a.right() == b.right();
  }
}

inline unsigned max_var(const BoolFormula& f) {
  switch (f.kind()) {
    case BoolFormula::Kind::Var: return f.index();
    case BoolFormula::Kind::Not: return max_var(f.left());
    default: return std::max(max_var(f.left()), max_var(f.right()));
  }
}

enum class GateKind : std::uint8_t { Not, Or, And };

struct GateInput {
  bool is_gate = false;
  unsigned index = 1;
  static constexpr GateInput input(unsigned j) { return {false, j}; }
  static constexpr GateInput gate(unsigned k) { return {true, k}; }
  friend constexpr bool operator==(const GateInput&, const GateInput&) = default;
};

struct Gate {
  GateKind kind = GateKind::Not;
  GateInput a{};
  GateInput b{};  // unused for Not
  friend constexpr bool operator==(const Gate&, const Gate&) = default;
};

// Gates are numbered 1..gates.size() in the order given.
struct Circuit {
  unsigned num_inputs = 0;
  std::vector<Gate> gates;
  unsigned output_gate = 1;
  friend bool operator==(const Circuit&, const Circuit&) = default;
};

//===----------------------------------------------------------------------===//
// Evaluation
//===----------------------------------------------------------------------===//

namespace detail {

inline bool lookup(const std::vector<bool>& b, unsigned k) {
  if (k == 0 || k > b.size()) throw Error("unbound variable v" + std::to_string(k));
  return b[k - 1];
}

}  // namespace detail

inline bool eval_formula(const BoolFormula& f, const std::vector<bool>& b) {
  switch (f.kind()) {
    case BoolFormula::Kind::Var: return detail::lookup(b, f.index());
    case BoolFormula::Kind::Not: return !eval_formula(f.left(), b);
    case BoolFormula::Kind::Or: return eval_formula(f.left(), b) || eval_formula(f.right(), b);
    case BoolFormula::Kind::And: return eval_formula(f.left(), b) && eval_formula(f.right(), b);
  }
  return false;
}

inline bool eval_formula(const Cnf& f, const std::vector<bool>& b) {
  for (const auto& c : f.clauses) {
    bool sat = false;
    for (const auto& l : c) sat = sat || (detail::lookup(b, l.var) != l.negated);
    if (!sat) return false;
  }
  return true;
}

// Gate indices (1-based) in an order where every gate follows its
// predecessors; among ready gates the smallest index goes first.
inline std::vector<unsigned> topological_order(const Circuit& c) {
  const unsigned m = static_cast<unsigned>(c.gates.size());
  std::vector<std::vector<unsigned>> users(m + 1);
  std::vector<unsigned> pending(m + 1, 0);
  auto check = [&](const GateInput& in, unsigned g) {
    if (in.is_gate) {
      if (in.index == 0 || in.index > m)
        throw Error("gate g" + std::to_string(g) + " reads undefined gate g" + std::to_string(in.index));
      users[in.index].push_back(g);
      ++pending[g];
    } else if (in.index == 0 || in.index > c.num_inputs) {
      throw Error("gate g" + std::to_string(g) + " reads undefined input in" + std::to_string(in.index));
    }
  };
  for (unsigned g = 1; g <= m; ++g) {
    const Gate& gate = c.gates[g - 1];
    check(gate.a, g);
    if (gate.kind != GateKind::Not) check(gate.b, g);
  }
  if (c.output_gate == 0 || c.output_gate > m) throw Error("output gate is not defined");
  std::priority_queue<unsigned, std::vector<unsigned>, std::greater<>> ready;
  for (unsigned g = 1; g <= m; ++g)
    if (pending[g] == 0) ready.push(g);
  std::vector<unsigned> order;
  while (!ready.empty()) {
    unsigned g = ready.top();
    ready.pop();
    order.push_back(g);
    for (unsigned u : users[g])
      if (--pending[u] == 0) ready.push(u);
  }
  if (order.size() != m) throw Error("circuit has a cycle");
  return order;
}

inline bool eval_formula(const Circuit& c, const std::vector<bool>& b) {
  std::vector<bool> val(c.gates.size() + 1);
  auto in = [&](const GateInput& x) { return x.is_gate ? bool(val[x.index]) : detail::lookup(b, x.index); };
  for (unsigned g : topological_order(c)) {
    const Gate& gate = c.gates[g - 1];
    switch (gate.kind) {
      case GateKind::Not: val[g] = !in(gate.a); break;
      case GateKind::Or: val[g] = in(gate.a) || in(gate.b); break;
      case GateKind::And: val[g] = in(gate.a) && in(gate.b); break;
    }
  }
  return val[c.output_gate];
}

//===----------------------------------------------------------------------===//
// Compilers
//===----------------------------------------------------------------------===//

namespace detail {

using Prim = PrimitiveInstruction;
using Basic = BasicInstruction;

inline Basic in_get(unsigned k) { return Basic::reg(Focus::in(k), Method::Get); }
inline Basic out_set(bool b) { return Basic::reg(Focus::out(), b ? Method::SetTrue : Method::SetFalse); }

inline void check_clauses(const Cnf& f) {
  for (const auto& c : f.clauses)
    if (c.empty()) throw Error("empty clause");
}

}  // namespace detail

// Per literal "+in:k.get ; #2" (negated: "-in:k.get ; #2"), per clause
// "+out.set:F ; #2 ; !", then "+out.set:T ; !".
inline InstructionSequence compile_cnf(const Cnf& f) {
  using namespace detail;
  check_clauses(f);
  std::vector<Prim> v;
  for (const auto& c : f.clauses) {
    for (const auto& l : c) {
      v.push_back(l.negated ? Prim::neg(in_get(l.var)) : Prim::pos(in_get(l.var)));
      v.push_back(Prim::jmp(2));
    }
    v.push_back(Prim::pos(out_set(false)));
    v.push_back(Prim::jmp(2));
    v.push_back(Prim::term());
  }
  v.push_back(Prim::pos(out_set(true)));
  v.push_back(Prim::term());
  return InstructionSequence(std::move(v));
}

// compile_cnf with every "+out.set:F ; #2 ; !" block replaced by "!" and every
// remaining #2 by "+out.set:F".
inline InstructionSequence compile_cnf_jumpfree(const Cnf& f) {
  using namespace detail;
  check_clauses(f);
  std::vector<Prim> v;
  for (const auto& c : f.clauses) {
    for (const auto& l : c) {
      v.push_back(l.negated ? Prim::neg(in_get(l.var)) : Prim::pos(in_get(l.var)));
      v.push_back(Prim::pos(out_set(false)));
    }
    v.push_back(Prim::term());
  }
  v.push_back(Prim::pos(out_set(true)));
  v.push_back(Prim::term());
  return InstructionSequence(std::move(v));
}

// Maps formula variable k to the basic instruction that reads it.
using LeafMap = std::function<BasicInstruction(unsigned)>;

// L(phi): length of the test code for phi.
inline std::size_t formula_length(const BoolFormula& f) {
  switch (f.kind()) {
    case BoolFormula::Kind::Var: return 1;
    case BoolFormula::Kind::Not: return formula_length(f.left()) + 1;
    case BoolFormula::Kind::Or: return formula_length(f.left()) + formula_length(f.right()) + 1;
    case BoolFormula::Kind::And: return formula_length(f.left()) + formula_length(f.right()) + 2;
  }
  return 0;
}

namespace detail {

// Test code for phi: falls through to the next instruction when phi holds,
// skips exactly one instruction when it does not.
inline void formula_code(const BoolFormula& f, const LeafMap& leaf, std::vector<Prim>& out) {
  switch (f.kind()) {
    case BoolFormula::Kind::Var:
      out.push_back(Prim::pos(leaf(f.index())));
      return;
    case BoolFormula::Kind::Not:
      formula_code(f.left(), leaf, out);
      out.push_back(Prim::jmp(2));
      return;
    case BoolFormula::Kind::Or:
      formula_code(f.left(), leaf, out);
      out.push_back(Prim::jmp(static_cast<unsigned>(formula_length(f.right()) + 1)));
      formula_code(f.right(), leaf, out);
      return;
    case BoolFormula::Kind::And:
      formula_code(f.left(), leaf, out);
      out.push_back(Prim::jmp(2));
      out.push_back(Prim::jmp(static_cast<unsigned>(formula_length(f.right()) + 2)));
      formula_code(f.right(), leaf, out);
      return;
  }
}

}  // namespace detail

inline InstructionSequence compile_formula(const BoolFormula& f, const LeafMap& leaf) {
  std::vector<detail::Prim> v;
  detail::formula_code(f, leaf, v);
  v.push_back(detail::Prim::pos(detail::out_set(true)));
  v.push_back(detail::Prim::term());
  return InstructionSequence(std::move(v));
}

inline InstructionSequence compile_formula(const BoolFormula& f) {
  return compile_formula(f, [](unsigned k) { return detail::in_get(k); });
}

// Gate k of the sorted order stores its value in aux:k:
//   NOT p : p ; #2 ; +aux:k.set:T
//   OR p q: p ; #2 ; q ; +aux:k.set:T
//   AND p q: p ; #2 ; #3 ; q ; +aux:k.set:T
// where an operand is "+in:j.get" or "+aux:j.get".
inline InstructionSequence compile_circuit(const Circuit& c) {
  using namespace detail;
  auto order = topological_order(c);
  std::vector<unsigned> rank(c.gates.size() + 1);
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<unsigned>(i + 1);
  auto operand = [&](const GateInput& x) {
    return Prim::pos(x.is_gate ? Basic::reg(Focus::aux(rank[x.index]), Method::Get) : in_get(x.index));
  };
  std::vector<Prim> v;
  for (unsigned g : order) {
    const Gate& gate = c.gates[g - 1];
    Prim store = Prim::pos(Basic::reg(Focus::aux(rank[g]), Method::SetTrue));
    v.push_back(operand(gate.a));
    v.push_back(Prim::jmp(2));
    if (gate.kind == GateKind::And) v.push_back(Prim::jmp(3));
    if (gate.kind != GateKind::Not) v.push_back(operand(gate.b));
    v.push_back(store);
  }
  v.push_back(Prim::pos(Basic::reg(Focus::aux(rank[c.output_gate]), Method::Get)));
  v.push_back(Prim::pos(out_set(true)));
  v.push_back(Prim::term());
  return InstructionSequence(std::move(v));
}

//===----------------------------------------------------------------------===//
// Text formats
//===----------------------------------------------------------------------===//

inline Cnf parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  Cnf f;
  bool header = false;
  long declared_clauses = 0;
  Clause current;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    std::size_t line_start = offset;
    offset += line.size() + 1;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c" || tok == "%") continue;
    if (tok == "p") {
      std::string fmt;
      long v = -1, c = -1;
      if (!(ls >> fmt >> v >> c) || fmt != "cnf" || v < 0 || c < 0)
        throw ParseError("malformed DIMACS header", line_start);
      f.num_vars = static_cast<unsigned>(v);
      declared_clauses = c;
      header = true;
      continue;
    }
    if (!header) throw ParseError("clause before the 'p cnf' header", line_start);
    std::istringstream cs(line);
    long lit;
    while (cs >> tok) {
      try {
        std::size_t used = 0;
        lit = std::stol(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("bad literal '" + tok + "'", line_start);
      }
      if (lit == 0) {
        f.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      unsigned var = static_cast<unsigned>(lit < 0 ? -lit : lit);
      if (var > f.num_vars) throw ParseError("literal " + tok + " exceeds the declared variable count", line_start);
      current.push_back({var, lit < 0});
    }
  }
  if (!header) throw ParseError("missing 'p cnf' header", 0);
  if (!current.empty()) throw ParseError("last clause is not terminated by 0", text.size());
  if (static_cast<long>(f.clauses.size()) != declared_clauses)
    throw ParseError("header declares " + std::to_string(declared_clauses) + " clauses, found " +
                         std::to_string(f.clauses.size()),
                     text.size());
  return f;
}

inline std::string render_dimacs(const Cnf& f) {
  std::string s = "p cnf " + std::to_string(f.num_vars) + " " + std::to_string(f.clauses.size()) + "\n";
  for (const auto& c : f.clauses) {
    for (const auto& l : c) s += (l.negated ? "-" : "") + std::to_string(l.var) + " ";
    s += "0\n";
  }
  return s;
}

inline std::string render_formula(const BoolFormula& f) {
  switch (f.kind()) {
    case BoolFormula::Kind::Var: return "v" + std::to_string(f.index());
    case BoolFormula::Kind::Not: return "(not " + render_formula(f.left()) + ")";
    case BoolFormula::Kind::Or: return "(or " + render_formula(f.left()) + " " + render_formula(f.right()) + ")";
    case BoolFormula::Kind::And: return "(and " + render_formula(f.left()) + " " + render_formula(f.right()) + ")";
  }
  return "?";
}

namespace detail {

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view s) : s_(s) {}

  BoolFormula parse() {
    BoolFormula f = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError("trailing input after formula", pos_);
    return f;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string atom() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
           s_[pos_] != ')')
      ++pos_;
    if (start == pos_) throw ParseError("expected a symbol", pos_);
    return std::string(s_.substr(start, pos_ - start));
  }

  BoolFormula variable(const std::string& a, std::size_t at) {
    if (a.size() < 2 || a[0] != 'v') throw ParseError("expected a variable like v1, got '" + a + "'", at);
    unsigned long k = 0;
    for (std::size_t i = 1; i < a.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(a[i]))) throw ParseError("bad variable '" + a + "'", at);
      k = k * 10 + static_cast<unsigned long>(a[i] - '0');
      if (k > 1000000) throw ParseError("variable index too large", at);
    }
    if (k == 0) throw ParseError("variables are numbered from 1", at);
    return BoolFormula::var(static_cast<unsigned>(k));
  }

  BoolFormula expr() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of formula", pos_);
    std::size_t at = pos_;
    if (s_[pos_] != '(') return variable(atom(), at);
    ++pos_;
    std::string op = atom();
    std::vector<BoolFormula> args;
    for (;;) {
      skip();
      if (pos_ >= s_.size()) throw ParseError("missing ')'", pos_);
      if (s_[pos_] == ')') {
        ++pos_;
        break;
      }
      args.push_back(expr());
    }
    if (op == "not") {
      if (args.size() != 1) throw ParseError("'not' takes one operand", at);
      return BoolFormula::lnot(args[0]);
    }
    if (op != "and" && op != "or") throw ParseError("unknown connective '" + op + "'", at);
    if (args.size() < 2) throw ParseError("'" + op + "' takes at least two operands", at);
    BoolFormula acc = args[0];
    for (std::size_t i = 1; i < args.size(); ++i)
      acc = op == "and" ? BoolFormula::land(acc, args[i]) : BoolFormula::lor(acc, args[i]);
    return acc;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// "(and (or v1 (not v2)) v2)"; n-ary and/or nest to the left.
inline BoolFormula parse_formula(std::string_view text) { return detail::FormulaParser(text).parse(); }

// Lines "g<k> = NOT|OR|AND <node> [<node>]" and "output g<m>"; ';' also
// separates lines. The input count is the largest in<j> mentioned.
inline Circuit parse_netlist(std::string_view text) {
  Circuit c;
  std::vector<std::optional<Gate>> defined;
  bool have_output = false;
  std::size_t offset = 0;
  auto node = [&](const std::string& tok, std::size_t at) -> GateInput {
    auto number = [&](std::size_t from) {
      if (tok.size() <= from) throw ParseError("bad node '" + tok + "'", at);
      unsigned long v = 0;
      for (std::size_t i = from; i < tok.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) throw ParseError("bad node '" + tok + "'", at);
        v = v * 10 + static_cast<unsigned long>(tok[i] - '0');
        if (v > 1000000) throw ParseError("node index too large", at);
      }
      if (v == 0) throw ParseError("node indices start at 1", at);
      return static_cast<unsigned>(v);
    };
    if (tok.rfind("in", 0) == 0) {
      unsigned j = number(2);
      c.num_inputs = std::max(c.num_inputs, j);
      return GateInput::input(j);
    }
    if (tok.rfind("g", 0) == 0) return GateInput::gate(number(1));
    throw ParseError("bad node '" + tok + "'", at);
  };
  std::string all(text);
  for (char& ch : all)
    if (ch == ';') ch = '\n';
  std::istringstream in(all);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t at = offset;
    offset += line.size() + 1;
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks[0] == "output") {
      if (toks.size() != 2) throw ParseError("expected 'output g<m>'", at);
      GateInput g = node(toks[1], at);
      if (!g.is_gate) throw ParseError("output must be a gate", at);
      c.output_gate = g.index;
      have_output = true;
      continue;
    }
    if (toks.size() < 4 || toks[1] != "=") throw ParseError("expected 'g<k> = OP ...'", at);
    GateInput lhs = node(toks[0], at);
    if (!lhs.is_gate) throw ParseError("left-hand side must be a gate", at);
    Gate g;
    if (toks[2] == "NOT")
      g.kind = GateKind::Not;
    else if (toks[2] == "OR")
      g.kind = GateKind::Or;
    else if (toks[2] == "AND")
      g.kind = GateKind::And;
    else
      throw ParseError("unknown gate type '" + toks[2] + "'", at);
    std::size_t arity = g.kind == GateKind::Not ? 1 : 2;
    if (toks.size() != 3 + arity) throw ParseError("wrong operand count for " + toks[2], at);
    g.a = node(toks[3], at);
    if (arity == 2) g.b = node(toks[4], at);
    if (defined.size() < lhs.index) defined.resize(lhs.index);
    if (defined[lhs.index - 1]) throw ParseError("gate g" + std::to_string(lhs.index) + " defined twice", at);
    defined[lhs.index - 1] = g;
  }
  if (!have_output) throw ParseError("missing 'output' line", text.size());
  for (std::size_t i = 0; i < defined.size(); ++i) {
    if (!defined[i]) throw ParseError("gate g" + std::to_string(i + 1) + " is never defined", text.size());
    c.gates.push_back(*defined[i]);
  }
  topological_order(c);  // reports cycles and dangling references
  return c;
}

inline std::string render_netlist(const Circuit& c) {
  auto node = [](const GateInput& x) { return (x.is_gate ? "g" : "in") + std::to_string(x.index); };
  std::string s;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    s += "g" + std::to_string(i + 1) + " = ";
    s += g.kind == GateKind::Not ? "NOT " : g.kind == GateKind::Or ? "OR " : "AND ";
    s += node(g.a);
    if (g.kind != GateKind::Not) s += " " + node(g.b);
    s += "\n";
  }
  s += "output g" + std::to_string(c.output_gate) + "\n";
  return s;
}

}  // namespace isq
