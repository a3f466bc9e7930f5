#pragma once

#include "supercal/form.hpp"

#include <span>
#include <string>

namespace supercal {

// Shortest decimal string that parses back to exactly v.
std::string double_repr(double v);

// Exact rational expression in x1..xn, parseable by parse_poly.
std::string poly_to_string(const QPoly& p);

// Superform text format, one term per line:
//   coeff * dx[K] ^ dxi[L]
// with K, L comma lists of 1-based strictly increasing indices and coeff either a
// decimal number or a polynomial expression. The zero form serializes to an empty
// string; parsers need at least one line to fix the bidegree.
std::string form_to_string(const NumForm& a);
std::string form_to_string(const PolyForm& a);

NumForm parse_num_form(int n, std::span<const std::string> lines);
PolyForm parse_poly_form(int n, std::span<const std::string> lines);

} // namespace supercal
