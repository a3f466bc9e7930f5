#pragma once

#include "supercal/degree.hpp"
#include "supercal/mesh.hpp"

#include <string>
#include <vector>

namespace supercal {

// Fixed corpus of named example objects. Names are stable identifiers used by
// scenario files and the CLI catalog listing.
struct BuiltinInfo {
    std::string name;
    std::string kind; // field | current | mesh | tropical
    std::string summary;
};

const std::vector<BuiltinInfo>& builtin_catalog();

// Constructs the named entry at small default parameters and discards it;
// proves the catalog instantiates. Unknown names throw InvalidArgument.
void instantiate_builtin(const std::string& name);

// Radial potential with parameter 1 <= m <= n: away from the origin
//   phi_m = -|x|^(2 - n/m) / (n/m - 2)   when m != n/2,
//   phi_m = log|x|                        when m = n/2.
ScalarField phi_m_field(int n, int m);

SmoothCurrent beta_power_current(int n, int k);

// -phi_m (dd#phi_m)^(m-1), bidegree (m-1, m-1). For n > 2m its small-ball
// masses scaled by r^(-(n/m)(m - n + p)) diverge like r^(2 - n/m).
SmoothCurrent phi_m_hessian_current(int n, int m);

// n = 2 current 2 f(x2) dx1^dxi1 + 2 g(x2) x1^2 dx2^dxi2 with
// f = (1 - x2^2)^4 / 8 and g = (1 - x2^2)^4, meant as truncated to the strip
// |x2| <= 1. The raw form carries global polynomial coefficients; pairings go
// through the handle below, which clips regions to the strip.
SmoothCurrent strip_growth_current();
CurrentHandle strip_growth_handle(const QuadratureSpec& quad);
// Density matching the truncated coefficients: zero outside the strip.
std::function<double(std::span<const double>)> strip_growth_probe();

// n = 2 diagonal current with coefficients 1 -+ sin(1/(x1+x2)^2), smooth away
// from the line x1 + x2 = 0; its exterior derivative has divergent mass there.
SmoothCurrent sin_singularity_current();

// k-th shell hugging that line on one side:
// { |x2| < 1, 1/sqrt(2 pi k + pi/4) < x1 + x2 < 1/sqrt(2 pi k) } for the
// positive side, mirrored for the negative one. The mass of d of the current
// above is exactly 2 on each (the cosine factor has a closed antiderivative).
Region sin_singularity_shell(int k, bool positive_side);

// Mesh-backed currents.
SubmanifoldCurrent coordinate_plane_current(int n, int dim, double half_extent,
                                            int resolution);
SubmanifoldCurrent sphere_current(double radius, int resolution);
SubmanifoldCurrent catenoid_current(double v_max, int u_resolution, int v_resolution);
SubmanifoldCurrent line_current(int n, double half_length, int resolution);

// Max-affine samples; tropical_ddsharp turns them into currents.
ScalarField hinge_field(int n);  // max(0, x1)
ScalarField abs_field(int n);    // |x1|
ScalarField corner_field();      // max(0, x1, x2), n = 2

} // namespace supercal
