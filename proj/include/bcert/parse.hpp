#pragma once

#include <string_view>

#include "bcert/polynomial.hpp"

namespace bcert {

// Parses expressions such as "-0.00012*T^4 + 0.01045*T^3 - (x + 2*y)^2".
// Grammar (recursive descent):
//   expr    := term (('+' | '-') term)*
//   term    := unary ('*' unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' integer)?
//   primary := number | identifier | '(' expr ')'
// Identifiers must name variables of `space`. Errors carry the column.
Polynomial parse_polynomial(std::string_view text, const SpacePtr& space);

}  // namespace bcert
