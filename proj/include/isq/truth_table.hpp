#pragma once

// Boolean functions tabulated over all input vectors. Entries may be
// undefined when a sequence fails to compute a value for that input.

#include <cstddef>
#include <ostream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isq/instr.hpp"

namespace isq {

// Input vector number `index` of arity n; b_1 is the most significant bit.
inline std::vector<bool> input_vector(unsigned n, std::size_t index) {
  std::vector<bool> b(n);
  for (unsigned i = 0; i < n; ++i) b[i] = (index >> (n - 1 - i)) & 1U;
  return b;
}

inline std::size_t input_index(const std::vector<bool>& b) {
  std::size_t idx = 0;
  for (bool v : b) idx = (idx << 1) | (v ? 1U : 0U);
  return idx;
}

// Accepts "TFT" or "101"; the empty string is the empty vector.
inline std::vector<bool> parse_bits(std::string_view s) {
  std::vector<bool> b;
  b.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == 'T' || c == '1')
      b.push_back(true);
    else if (c == 'F' || c == '0')
      b.push_back(false);
    else
      throw ParseError(std::string("bad bit '") + c + "'", i);
  }
  return b;
}

inline std::string render_bits(const std::vector<bool>& b) {
  std::string s;
  for (bool v : b) s += v ? 'T' : 'F';
  return s;
}

class TruthTable {
 public:
  TruthTable() : TruthTable(0, {std::optional<bool>(false)}) {}

  TruthTable(unsigned arity, std::vector<std::optional<bool>> values) : arity_(arity), values_(std::move(values)) {
    if (arity_ > 24) throw ResourceError("truth table arity too large");
    if (values_.size() != (std::size_t{1} << arity_)) throw Error("truth table size does not match its arity");
  }

  template <class F>
  static TruthTable from_function(unsigned arity, F&& f) {
    if (arity > 24) throw ResourceError("truth table arity too large");
    std::vector<std::optional<bool>> v(std::size_t{1} << arity);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<bool>(f(input_vector(arity, i)));
    return TruthTable(arity, std::move(v));
  }

  static TruthTable constant(unsigned arity, bool value) {
    return from_function(arity, [value](const std::vector<bool>&) { return value; });
  }

  // "TFFT" style; '?' marks an undefined entry. Length must be a power of 2.
  static TruthTable parse(std::string_view s) {
    unsigned n = 0;
    while ((std::size_t{1} << n) < s.size()) ++n;
    if ((std::size_t{1} << n) != s.size()) throw ParseError("truth table length must be a power of two", s.size());
    std::vector<std::optional<bool>> v;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == 'T' || s[i] == '1')
        v.emplace_back(true);
      else if (s[i] == 'F' || s[i] == '0')
        v.emplace_back(false);
      else if (s[i] == '?')
        v.emplace_back(std::nullopt);
      else
        throw ParseError(std::string("bad truth table entry '") + s[i] + "'", i);
    }
    return TruthTable(n, std::move(v));
  }

  unsigned arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::optional<bool>& operator[](std::size_t index) const { return values_.at(index); }
  const std::optional<bool>& operator()(const std::vector<bool>& b) const { return values_.at(input_index(b)); }
  const std::vector<std::optional<bool>>& values() const noexcept { return values_; }

  bool is_total() const {
    for (const auto& v : values_)
      if (!v) return false;
    return true;
  }

  std::string render() const {
    std::string s;
    for (const auto& v : values_) s += !v ? '?' : (*v ? 'T' : 'F');
    return s;
  }

  friend bool operator==(const TruthTable&, const TruthTable&) = default;
  friend std::ostream& operator<<(std::ostream& o, const TruthTable& t) { return o << t.render(); }

 private:
  unsigned arity_;
  std::vector<std::optional<bool>> values_;
};

inline bool tables_equal(const TruthTable& a, const TruthTable& b) { return a == b; }

}  // namespace isq
