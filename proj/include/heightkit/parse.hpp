#pragma once

// Recursive-descent parser for polynomial text.
//
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := base ('^' nat)?
//   base   := integer | var | '(' expr ')'
//
// Whitespace is ignored between tokens. There is no implicit multiplication.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heightkit/poly.hpp"

namespace heightkit {

/// Largest exponent literal accepted after '^'.
inline constexpr unsigned kMaxExponent = 1U << 20;

/// Expands `text` exactly over the named variables. Throws ParseError (with position) on bad input.
MultiPoly parse_poly(std::string_view text, std::span<const std::string> vars);

/// Single-variable convenience wrapper.
IntPoly parse_univariate(std::string_view text, std::string_view var = "T");

/// Identifiers appearing in `text`, deduplicated and in natural order (x2 before x10).
std::vector<std::string> detect_variables(std::string_view text);

}  // namespace heightkit
