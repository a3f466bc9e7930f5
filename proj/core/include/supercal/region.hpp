#pragma once

#include "supercal/rng.hpp"
#include "supercal/scalar_field.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace supercal {

struct BoundingBox {
    std::vector<double> lo, hi;
    double volume() const;
};

// Integration domain. Balls, boxes, shells and affine images of boxes know their
// exact volume; sublevel sets integrate by rejection from a caller-supplied box.
class Region {
public:
    enum class Kind { Ball, Box, Shell, Sublevel, AffineImage };

    static Region ball(std::vector<double> center, double radius);
    static Region box(std::vector<double> lo, std::vector<double> hi);
    static Region shell(std::vector<double> center, double inner, double outer);
    static Region sublevel(ScalarField phi, double level, std::vector<double> lo,
                           std::vector<double> hi);
    // { map * t + shift : t in [lo, hi] }; map must be square and invertible.
    static Region affine_image(Eigen::MatrixXd map, std::vector<double> shift,
                               std::vector<double> lo, std::vector<double> hi);

    Kind kind() const { return kind_; }
    int dim() const { return n_; }

    bool contains(std::span<const double> x) const;
    BoundingBox bounding() const;

    // Uniform point in the sampling parameterization; writes the mapped point and
    // returns whether it lies inside the region. sampling_weight() is the measure
    // of the parameterization box, so E[f(x) * indicator] * sampling_weight()
    // estimates the integral of f over the region.
    bool sample(SplitMix64& rng, std::vector<double>& out) const;
    double sampling_weight() const;

    // Maps a tensor-grid parameter point t in [0,1]^n onto the sampling box;
    // returns whether the mapped point (written to out) lies inside the region.
    bool grid_point(std::span<const double> t, std::vector<double>& out) const;

    std::optional<double> exact_volume() const;

    // accessors for the exact-density fast paths
    const std::vector<double>* center() const;
    double inner_radius() const { return inner_; }
    double outer_radius() const { return outer_; }

private:
    Region() = default;

    Kind kind_ = Kind::Box;
    int n_ = 0;
    std::vector<double> center_;
    double inner_ = 0.0, outer_ = 0.0; // shell radii; ball uses outer_
    std::vector<double> lo_, hi_;      // parameter box
    Eigen::MatrixXd map_, map_inv_;
    double abs_det_ = 1.0;
    std::vector<double> shift_;
    ScalarField phi_;
    double level_ = 0.0;
};

} // namespace supercal
