#pragma once

#include "supercal/calculus.hpp"
#include "supercal/exact_integrals.hpp"
#include "supercal/mesh.hpp"

#include <functional>

namespace supercal {

// Test side of a current pairing: a wedge of form factors scaled by an optional
// scalar weight. Pairings evaluate factors pointwise and wedge numerically.
class TestProduct {
public:
    explicit TestProduct(int n) : n_(n) {}

    TestProduct& times(FieldForm f);
    TestProduct& weighted(const ScalarField& w); // multiplies into the existing weight

    int n() const { return n_; }
    int total_p() const;
    int total_q() const;
    const std::vector<FieldForm>& factors() const { return factors_; }
    bool has_weight() const { return weight_.valid(); }
    const ScalarField& weight() const { return weight_; }

    NumForm form_at(std::span<const double> x) const; // wedge of factors, weight excluded
    double weight_at(std::span<const double> x) const;

    // Symbolic wedge of the factors; coefficient algebra may lose closed forms,
    // so this is only used for the exact-integral path.
    FieldForm symbolic_form() const;

private:
    int n_ = 0;
    std::vector<FieldForm> factors_;
    ScalarField weight_;
};

// Current with locally integrable coefficient fields, stored as the form itself.
class SmoothCurrent {
public:
    explicit SmoothCurrent(FieldForm form) : form_(std::move(form)) {}

    const FieldForm& form() const { return form_; }
    int n() const { return form_.n(); }
    int p() const { return form_.p(); }
    int q() const { return form_.q(); }

    SmoothCurrent d() const { return SmoothCurrent(exterior_d(form_)); }
    SmoothCurrent dsharp() const { return SmoothCurrent(supercal::dsharp(form_)); }
    SmoothCurrent ddsharp() const { return SmoothCurrent(dd_sharp(form_)); }

    // integral over the region of weight * density(T ^ psi); T ^ psi must be (n,n)
    MeasureEstimate pair(const TestProduct& psi, const Region& region,
                         const QuadratureSpec& spec) const;

    // closed form when the full symbolic density (and weight) normalizes to a
    // radial or polynomial expression compatible with the region
    std::optional<ExactIntegral> pair_exact(const TestProduct& psi, const Region& region) const;

    // integral of the pointwise l2 norm of the coefficient vector
    MeasureEstimate mass(const Region& region, const QuadratureSpec& spec) const;

private:
    FieldForm form_;
};

// Integration current of a d-dimensional surface: at each mesh point the wedge of
// rank-one forms of an orthonormal normal frame, integrated against the surface
// measure. Frames come from Gram-Schmidt on the gradients of the implicit
// functions and are validated at construction.
class SubmanifoldCurrent {
public:
    SubmanifoldCurrent(SurfaceMesh mesh, std::vector<ScalarField> implicits);

    int n() const { return mesh_.n; }
    int codim() const { return int(implicits_.size()); }
    const SurfaceMesh& mesh() const { return mesh_; }
    const std::vector<Eigen::VectorXd>& frame(std::size_t sample) const {
        return frames_[sample];
    }

    // mesh-rule sum of weight * density(frame product ^ psi) over samples inside
    // the region; the mesh is the quadrature, so no spec is taken
    MeasureEstimate pair(const TestProduct& psi, const Region& region) const;

    double area(const Region& region) const;

private:
    SurfaceMesh mesh_;
    std::vector<ScalarField> implicits_;
    std::vector<std::vector<Eigen::VectorXd>> frames_;
};

struct RichardsonResult {
    std::vector<double> eps;
    std::vector<double> raw;
    double extrapolated = 0.0;
    double error_hint = 0.0; // gap between the last two extrapolation steps
};

// Evaluates at the given widths and extrapolates assuming error ~ C eps^order.
RichardsonResult richardson_sequence(const std::function<double(double)>& eval,
                                     std::span<const double> eps_values, int order = 2);

struct SuperhessianReport {
    std::vector<double> eps;
    std::vector<MeasureEstimate> values; // pairing per mollification width
    double extrapolated = 0.0;           // Richardson limit from the tail of the schedule
    double error_hint = 0.0;
    bool cauchy = false; // tail gaps within 3x the combined quadrature errors
};

// <T ^ beta^(n-m) ^ dd#(u_1 * rho_eps) ^ ... ^ dd#(u_q * rho_eps), test> over the
// region along the width schedule, extrapolated to eps -> 0. Requires q <= p+m-n
// for bidimension p, each u_j m-convex on the region (sampled certificate) and T
// m-positive at sampled points; violations throw HypothesisError.
SuperhessianReport superhessian_product(const SmoothCurrent& t, int m,
                                        std::span<const ScalarField> u_list,
                                        const TestProduct& test, const Region& region,
                                        std::span<const double> eps_schedule,
                                        const QuadratureSpec& quad, int mollify_order = 12);

// 2^-k for k = 3..8, the default width schedule.
std::vector<double> default_eps_schedule();

// Max over battery elements g and axes j of |<[M]_s, beta^(p-1) ^ d(g dxi_j)>|,
// a quadrature residual of d([M]_s ^ beta^(p-1)) = 0. Battery fields should decay
// toward the mesh boundary when the surface has one.
double minimality_residual(const SubmanifoldCurrent& m, int p,
                           std::span<const ScalarField> battery);

} // namespace supercal
