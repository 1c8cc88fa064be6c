#pragma once

// Primitive instructions, finite instruction sequences, their text format
// and syntactic classification.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace isq {

//===----------------------------------------------------------------------===//
// Errors
//===----------------------------------------------------------------------===//

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class EmptySequence : public ParseError {
 public:
  EmptySequence() : ParseError("empty instruction sequence", 0) {}
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

//===----------------------------------------------------------------------===//
// Basic instructions
//===----------------------------------------------------------------------===//

enum class FocusKind : std::uint8_t { In, Aux, Out };

struct Focus {
  FocusKind kind = FocusKind::Out;
  unsigned index = 0;  // 0 for Out

  static constexpr Focus in(unsigned i) { return {FocusKind::In, i}; }
  static constexpr Focus aux(unsigned i) { return {FocusKind::Aux, i}; }
  static constexpr Focus out() { return {FocusKind::Out, 0}; }

  friend constexpr auto operator<=>(const Focus&, const Focus&) = default;
};

enum class Method : std::uint8_t { Get, SetTrue, SetFalse };

enum class BasicKind : std::uint8_t { Register, Split, Reply };

struct BasicInstruction {
  BasicKind kind = BasicKind::Register;
  Focus focus{};
  Method method = Method::Get;
  unsigned param = 0;  // Split/Reply only

  static constexpr BasicInstruction reg(Focus f, Method m) { return {BasicKind::Register, f, m, 0}; }
  static constexpr BasicInstruction split(unsigned p) { return {BasicKind::Split, Focus{}, Method::Get, p}; }
  static constexpr BasicInstruction reply(unsigned p) { return {BasicKind::Reply, Focus{}, Method::Get, p}; }

  constexpr bool is_register() const { return kind == BasicKind::Register; }
  constexpr bool on(Focus f) const { return kind == BasicKind::Register && focus == f; }

  friend constexpr auto operator<=>(const BasicInstruction&, const BasicInstruction&) = default;
};

//===----------------------------------------------------------------------===//
// Primitive instructions
//===----------------------------------------------------------------------===//

enum class InstrKind : std::uint8_t { Plain, PosTest, NegTest, Jump, Term };

struct PrimitiveInstruction {
  InstrKind kind = InstrKind::Term;
  BasicInstruction basic{};
  unsigned jump = 0;

  static constexpr PrimitiveInstruction plain(BasicInstruction b) { return {InstrKind::Plain, b, 0}; }
  static constexpr PrimitiveInstruction pos(BasicInstruction b) { return {InstrKind::PosTest, b, 0}; }
  static constexpr PrimitiveInstruction neg(BasicInstruction b) { return {InstrKind::NegTest, b, 0}; }
  static constexpr PrimitiveInstruction jmp(unsigned l) { return {InstrKind::Jump, BasicInstruction{}, l}; }
  static constexpr PrimitiveInstruction term() { return {InstrKind::Term, BasicInstruction{}, 0}; }

  constexpr bool has_basic() const {
    return kind == InstrKind::Plain || kind == InstrKind::PosTest || kind == InstrKind::NegTest;
  }
  constexpr bool is_test() const { return kind == InstrKind::PosTest || kind == InstrKind::NegTest; }

  // Equality ignores the unused payload fields so that factories compare
  // equal regardless of how they were built.
  friend constexpr bool operator==(const PrimitiveInstruction& a, const PrimitiveInstruction& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == InstrKind::Jump) return a.jump == b.jump;
    if (a.kind == InstrKind::Term) return true;
    return a.basic == b.basic;
  }
};

// Same basic instruction, other test polarity. Only meaningful for tests.
constexpr PrimitiveInstruction flipped(const PrimitiveInstruction& u) {
  return u.kind == InstrKind::PosTest ? PrimitiveInstruction::neg(u.basic) : PrimitiveInstruction::pos(u.basic);
}

//===----------------------------------------------------------------------===//
// Instruction sequences
//===----------------------------------------------------------------------===//

class InstructionSequence {
 public:
  using value_type = PrimitiveInstruction;

  explicit InstructionSequence(std::vector<PrimitiveInstruction> items) : items_(std::move(items)) {
    if (items_.empty()) throw EmptySequence();
  }
  InstructionSequence(std::initializer_list<PrimitiveInstruction> items)
      : InstructionSequence(std::vector<PrimitiveInstruction>(items)) {}

  std::size_t size() const noexcept { return items_.size(); }
  const PrimitiveInstruction& operator[](std::size_t i) const { return items_[i]; }
  // 1-based access, as positions are numbered in the algebra.
  const PrimitiveInstruction& at(std::size_t pos) const { return items_.at(pos - 1); }

  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }
  const std::vector<PrimitiveInstruction>& items() const noexcept { return items_; }

  friend bool operator==(const InstructionSequence&, const InstructionSequence&) = default;

 private:
  std::vector<PrimitiveInstruction> items_;
};

inline std::size_t psize(const InstructionSequence& x) { return x.size(); }

inline InstructionSequence concat(const InstructionSequence& x, const InstructionSequence& y) {
  std::vector<PrimitiveInstruction> v(x.begin(), x.end());
  v.insert(v.end(), y.begin(), y.end());
  return InstructionSequence(std::move(v));
}

//===----------------------------------------------------------------------===//
// Rendering
//===----------------------------------------------------------------------===//

inline std::string to_string(Focus f) {
  switch (f.kind) {
    case FocusKind::In: return "in:" + std::to_string(f.index);
    case FocusKind::Aux: return "aux:" + std::to_string(f.index);
    case FocusKind::Out: return "out";
  }
  return "?";
}

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Get: return "get";
    case Method::SetTrue: return "set:T";
    case Method::SetFalse: return "set:F";
  }
  return "?";
}

inline std::string to_string(const BasicInstruction& b) {
  switch (b.kind) {
    case BasicKind::Register: return to_string(b.focus) + "." + std::string(to_string(b.method));
    case BasicKind::Split: return "split:" + std::to_string(b.param);
    case BasicKind::Reply: return "reply:" + std::to_string(b.param);
  }
  return "?";
}

inline std::string to_string(const PrimitiveInstruction& u) {
  switch (u.kind) {
    case InstrKind::Plain: return to_string(u.basic);
    case InstrKind::PosTest: return "+" + to_string(u.basic);
    case InstrKind::NegTest: return "-" + to_string(u.basic);
    case InstrKind::Jump: return "#" + std::to_string(u.jump);
    case InstrKind::Term: return "!";
  }
  return "?";
}

inline std::string render(const InstructionSequence& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += " ; ";
    s += to_string(x[i]);
  }
  return s;
}

//===----------------------------------------------------------------------===//
// Parsing
//===----------------------------------------------------------------------===//

namespace detail {

class SequenceParser {
 public:
  explicit SequenceParser(std::string_view text) : text_(text) {}

  InstructionSequence parse() {
    skip_ws();
    if (at_end()) throw EmptySequence();
    std::vector<PrimitiveInstruction> items;
    items.push_back(instruction());
    skip_ws();
    while (!at_end()) {
      expect(";");
      items.push_back(instruction());
      skip_ws();
    }
    return InstructionSequence(std::move(items));
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  void skip_ws() {
    while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  unsigned nat() {
    skip_ws();
    std::size_t start = pos_;
    std::uint64_t v = 0;
    while (!at_end() && text_[pos_] >= '0' && text_[pos_] <= '9') {
      v = v * 10 + static_cast<unsigned>(text_[pos_] - '0');
      if (v > std::numeric_limits<unsigned>::max()) throw ParseError("number too large", start);
      ++pos_;
    }
    if (pos_ == start) fail("expected a number");
    return static_cast<unsigned>(v);
  }

  unsigned positive() {
    std::size_t start = pos_;
    unsigned v = nat();
    if (v == 0) throw ParseError("index must be positive", start);
    return v;
  }

  PrimitiveInstruction instruction() {
    skip_ws();
    if (accept("!")) return PrimitiveInstruction::term();
    if (accept("#")) return PrimitiveInstruction::jmp(nat());
    if (accept("+")) return PrimitiveInstruction::pos(basic());
    if (accept("-")) return PrimitiveInstruction::neg(basic());
    return PrimitiveInstruction::plain(basic());
  }

  BasicInstruction basic() {
    if (accept("split")) {
      expect(":");
      return BasicInstruction::split(positive());
    }
    if (accept("reply")) {
      expect(":");
      return BasicInstruction::reply(positive());
    }
    Focus f;
    if (accept("in")) {
      expect(":");
      f = Focus::in(positive());
    } else if (accept("aux")) {
      expect(":");
      f = Focus::aux(positive());
    } else if (accept("out")) {
      f = Focus::out();
    } else {
      fail("expected an instruction");
    }
    expect(".");
    Method m;
    if (accept("get")) {
      m = Method::Get;
    } else if (accept("set")) {
      expect(":");
      if (accept("T"))
        m = Method::SetTrue;
      else if (accept("F"))
        m = Method::SetFalse;
      else
        fail("expected T or F");
    } else {
      fail("expected a method");
    }
    return BasicInstruction::reg(f, m);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline InstructionSequence parse(std::string_view text) { return detail::SequenceParser(text).parse(); }

//===----------------------------------------------------------------------===//
// Classification
//===----------------------------------------------------------------------===//

struct ClassProfile {
  bool is_isbr = true;
  bool is_isbrna = true;
  bool is_sisbr = true;
  unsigned max_jump = 0;
  unsigned max_aux_index = 0;
  unsigned max_input_index = 0;
  unsigned max_param_index = 0;
  std::size_t term_count = 0;
  bool has_out_set_false = false;

  friend bool operator==(const ClassProfile&, const ClassProfile&) = default;
};

inline ClassProfile classify(const InstructionSequence& x) {
  ClassProfile p;
  for (const auto& u : x) {
    if (u.kind == InstrKind::Term) {
      ++p.term_count;
      continue;
    }
    if (u.kind == InstrKind::Jump) {
      p.max_jump = std::max(p.max_jump, u.jump);
      continue;
    }
    const BasicInstruction& b = u.basic;
    bool isbr = false, isbrna = false, sisbr = false;
    switch (b.kind) {
      case BasicKind::Split:
      case BasicKind::Reply:
        p.max_param_index = std::max(p.max_param_index, b.param);
        sisbr = true;
        break;
      case BasicKind::Register:
        switch (b.focus.kind) {
          case FocusKind::In:
            p.max_input_index = std::max(p.max_input_index, b.focus.index);
            isbr = isbrna = sisbr = b.method == Method::Get;
            break;
          case FocusKind::Aux:
            p.max_aux_index = std::max(p.max_aux_index, b.focus.index);
            isbr = true;
            break;
          case FocusKind::Out:
            isbr = isbrna = b.method != Method::Get;
            sisbr = b.method == Method::SetTrue;
            if (b.method == Method::SetFalse) p.has_out_set_false = true;
            break;
        }
        break;
    }
    p.is_isbr = p.is_isbr && isbr;
    p.is_isbrna = p.is_isbrna && isbrna;
    p.is_sisbr = p.is_sisbr && sisbr;
  }
  return p;
}

}  // namespace isq
