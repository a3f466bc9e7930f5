#pragma once

#include "supercal/region.hpp"
#include "supercal/scalar_field.hpp"

#include <optional>
#include <span>

namespace supercal {

struct ExactIntegral {
    double value = 0.0;
    bool divergent = false; // radial exponent <= -(dimension) at the center
};

// Surface integral of the monomial x^alpha over the unit sphere S^{n-1}:
// 2 prod_i Gamma((alpha_i+1)/2) / Gamma((|alpha|+n)/2), zero if any alpha_i is odd.
double sphere_monomial_moment(int n, std::span<const int> alpha);

// Closed-form integral of a radial-polynomial density over the shell
// r_inner <= |x - center| <= r_outer around its own center.
ExactIntegral integrate_radial(const RadialDensity& d, double r_inner, double r_outer);

// Exact integral of a polynomial over an axis-aligned box.
double integrate_poly_box(const DPoly& p, const std::vector<double>& lo,
                          const std::vector<double>& hi);

// Dispatch: radial densities over balls/shells centered at the region's center,
// polynomials over boxes. nullopt when no closed form applies.
std::optional<ExactIntegral> integrate_exact(const ScalarField& g, const Region& region);

} // namespace supercal
