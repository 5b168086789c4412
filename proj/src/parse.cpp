#include "heightkit/parse.hpp"

#include <algorithm>
#include <cctype>

#include "heightkit/errors.hpp"

namespace heightkit {
namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> vars) : text_(text), vars_(vars) {}

  MultiPoly parse() {
    skip_ws();
    if (at_end()) throw ParseError("empty polynomial", pos_);
    MultiPoly result = expr();
    skip_ws();
    if (!at_end()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return result;
  }

 private:
  MultiPoly expr() {
    skip_ws();
    bool negate = false;
    if (peek() == '+' || peek() == '-') {
      negate = peek() == '-';
      ++pos_;
    }
    MultiPoly acc = term();
    if (negate) acc = -acc;
    for (;;) {
      skip_ws();
      char op = peek();
      if (op != '+' && op != '-') break;
      ++pos_;
      MultiPoly rhs = term();
      acc = op == '+' ? acc + rhs : acc - rhs;
    }
    return acc;
  }

  MultiPoly term() {
    MultiPoly acc = factor();
    for (;;) {
      skip_ws();
      if (peek() != '*') break;
      ++pos_;
      acc = acc * factor();
    }
    return acc;
  }

  MultiPoly factor() {
    MultiPoly b = base();
    skip_ws();
    if (peek() != '^') return b;
    ++pos_;
    skip_ws();
    const std::size_t start = pos_;
    if (peek() == '-') throw ParseError("negative exponent", start);
    if (!is_digit(peek())) throw ParseError("expected a nonnegative integer exponent", start);
    unsigned long value = 0;
    while (is_digit(peek())) {
      value = value * 10 + static_cast<unsigned long>(text_[pos_] - '0');
      if (value > kMaxExponent) throw ParseError("exponent too large", start);
      ++pos_;
    }
    return b.pow(static_cast<unsigned>(value));
  }

  MultiPoly base() {
    skip_ws();
    const std::size_t start = pos_;
    if (at_end()) throw ParseError("unexpected end of input", pos_);
    const char c = peek();
    if (is_digit(c)) {
      while (is_digit(peek())) ++pos_;
      Integer value(std::string(text_.substr(start, pos_ - start)), 10);
      return MultiPoly::constant(vars_.size(), value);
    }
    if (is_ident_start(c)) {
      while (is_ident_char(peek())) ++pos_;
      std::string_view name = text_.substr(start, pos_ - start);
      auto it = std::find(vars_.begin(), vars_.end(), name);
      if (it == vars_.end()) throw ParseError("unknown variable '" + std::string(name) + "'", start);
      return MultiPoly::variable(vars_.size(), static_cast<std::size_t>(it - vars_.begin()));
    }
    if (c == '(') {
      ++pos_;
      MultiPoly inner = expr();
      skip_ws();
      if (peek() != ')') throw ParseError("expected ')'", pos_);
      ++pos_;
      return inner;
    }
    throw ParseError(std::string("unexpected '") + c + "'", start);
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  std::string_view text_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

// Natural ordering: digit runs compare numerically.
bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t i2 = i;
      std::size_t j2 = j;
      while (i2 < a.size() && is_digit(a[i2])) ++i2;
      while (j2 < b.size() && is_digit(b[j2])) ++j2;
      Integer x(a.substr(i, i2 - i), 10);
      Integer y(b.substr(j, j2 - j), 10);
      if (x != y) return x < y;
      i = i2;
      j = j2;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

}  // namespace

MultiPoly parse_poly(std::string_view text, std::span<const std::string> vars) {
  return Parser(text, vars).parse();
}

IntPoly parse_univariate(std::string_view text, std::string_view var) {
  const std::string name(var);
  return parse_poly(text, std::span<const std::string>(&name, 1)).to_univariate();
}

std::vector<std::string> detect_variables(std::string_view text) {
  std::vector<std::string> names;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_digit(text[i])) {
      while (i < text.size() && is_ident_char(text[i])) ++i;
    } else if (is_ident_start(text[i])) {
      std::size_t start = i;
      while (i < text.size() && is_ident_char(text[i])) ++i;
      std::string name(text.substr(start, i - start));
      if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
    } else {
      ++i;
    }
  }
  std::sort(names.begin(), names.end(), natural_less);
  return names;
}

}  // namespace heightkit
