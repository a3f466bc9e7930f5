#pragma once

#include "supercal/current.hpp"

namespace supercal {

// dd# of a max-affine function as an explicit singular current. In one variable it
// is a sum of point masses (slope jumps); in two variables each facet of the tie
// locus carries the constant matrix g g^T / |g| for the gradient difference g of
// the two active pieces, against one-dimensional Hausdorff measure.
class TropicalCurrent {
public:
    struct PointMass {
        double x = 0.0;
        double mass = 0.0; // slope jump
    };

    struct Facet {
        int piece_i = 0, piece_j = 0;
        Eigen::Vector2d g;     // gradient difference; normal to the facet
        Eigen::Vector2d point; // a point on the tie line
        Eigen::Vector2d dir;   // unit tangent
        double t_lo = 0.0, t_hi = 0.0; // active parameter range, possibly infinite
        Eigen::Matrix2d w;             // g g^T / |g|
    };

    int n() const { return n_; }
    const std::vector<PointMass>& point_masses() const { return points_; }
    const std::vector<Facet>& facets() const { return facets_; }

    // (1,1) current paired with a (n-1, n-1) weighted test product over the region.
    // `resolution` is the Gauss point count per facet chord; point masses are exact.
    MeasureEstimate pair(const TestProduct& psi, const Region& region,
                         int resolution = 64) const;

private:
    friend TropicalCurrent tropical_ddsharp(const ScalarField& u);
    int n_ = 0;
    std::vector<PointMass> points_;
    std::vector<Facet> facets_;
};

// Builds dd#u for a max-affine u. Supported in one and two variables; two-variable
// inputs must have pieces in general position (no two tie lines may coincide).
TropicalCurrent tropical_ddsharp(const ScalarField& u);

} // namespace supercal
