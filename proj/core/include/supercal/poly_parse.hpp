#pragma once

#include "supercal/polynomial.hpp"

#include <string_view>

namespace supercal {

// Parses an exact polynomial expression in variables x1..xn. Grammar:
//   expr   := ['-'] term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := base ('^' nonneg-integer)?
//   base   := number | 'x'<index> | '(' expr ')' | '-' base
// Numbers are integers or decimals and stay exact rationals; '/' needs a nonzero
// constant divisor. Malformed input throws InvalidArgument naming the position.
QPoly parse_poly(int n, std::string_view text);

} // namespace supercal
