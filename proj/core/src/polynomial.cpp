#include "supercal/polynomial.hpp"

namespace supercal {

DPoly to_dpoly(const QPoly& p) {
    DPoly r(p.n_vars());
    for (const auto& [k, c] : p.terms()) r.add_term(k, to_double(c));
    return r;
}

} // namespace supercal
