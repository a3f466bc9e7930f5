#pragma once

#include "supercal/region.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <variant>

namespace supercal {

struct MonteCarloSpec {
    std::int64_t samples = 200000;
    std::uint64_t seed = 1;
};

// Midpoint or Gauss tensor grid on the region's parameter box. Gauss pays off
// only when the integrand is smooth on the whole box (no indicator cut).
struct TensorGridSpec {
    int points_per_axis = 64;
    bool gauss = false;
};

using QuadratureSpec = std::variant<MonteCarloSpec, TensorGridSpec>;

struct MeasureEstimate {
    double value = 0.0;
    // CLT standard error for Monte Carlo; |fine - half resolution| gap for grids.
    double error = 0.0;
    std::int64_t evaluations = 0;
    std::string method;
};

using Integrand = std::function<double(std::span<const double>)>;

// Integral of f over the region. Monte Carlo draws are chunked with per-chunk
// substreams of the given seed, so results do not depend on scheduling.
MeasureEstimate integrate(const Region& region, const Integrand& f, const QuadratureSpec& spec);

// Points, outward unit normals and weights for the sphere |x - center| = radius;
// weights sum to the Euclidean surface area. n = 2, 3 use product rules whose
// resolution parameter is the polar point count; higher n draws `resolution`
// seeded gaussian directions.
struct SpherePoint {
    std::vector<double> x;
    std::vector<double> normal;
    double w = 0.0;
};

std::vector<SpherePoint> sphere_quadrature(const std::vector<double>& center, double radius,
                                           int resolution, std::uint64_t seed = 7);

double sphere_surface_area(int n, double radius);
double ball_volume(int n, double radius);

} // namespace supercal
