#pragma once

#include "supercal/scalar_field.hpp"

#include <Eigen/Dense>

#include <vector>

namespace supercal {

// Quadrature mesh on a d-dimensional surface in R^n: points with area weights.
// Weights carry the surface measure, so sums of w * f approximate surface
// integrals of f.
struct SurfaceMesh {
    int n = 0;
    int dim = 0;
    std::vector<std::vector<double>> points;
    std::vector<double> weights;

    double total_area() const;
};

// Flat patch origin + span of `tangent` over [-half_extent, half_extent]^dim,
// midpoint rule. Tangent vectors must be orthonormal.
SurfaceMesh plane_mesh(int n, const std::vector<double>& origin,
                       const std::vector<Eigen::VectorXd>& tangent, double half_extent,
                       int resolution);

// Round sphere |x| = radius in R^3; Gauss nodes in the polar direction avoid
// the poles and keep all weights positive.
SurfaceMesh sphere_mesh(double radius, int resolution);

// (cosh v cos u, cosh v sin u, v) for |v| <= v_max; dS = cosh(v)^2 du dv.
SurfaceMesh catenoid_mesh(double v_max, int u_resolution, int v_resolution);

// Segment origin + t * dir, |t| <= half_length, in R^n; dir must be a unit vector.
SurfaceMesh line_mesh(const std::vector<double>& origin, const Eigen::VectorXd& dir,
                      double half_length, int resolution);

// Implicit descriptions whose gradients span the normal spaces of the meshes above.
ScalarField sphere_implicit(double radius);               // |x| - radius in R^3
ScalarField catenoid_implicit();                          // sqrt(x1^2 + x2^2) - cosh x3
std::vector<ScalarField> plane_implicit(int n, const std::vector<double>& origin,
                                        const std::vector<Eigen::VectorXd>& tangent);

} // namespace supercal
