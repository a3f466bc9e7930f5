#pragma once

#include "supercal/current.hpp"
#include "supercal/tropical.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace supercal {

// Weight for localized mass normalizations: a positive C^2 function phi together
// with its derived forms omega = dd#phi and alpha = dd#sqrt(phi).
class Weight {
public:
    explicit Weight(ScalarField phi);

    // phi = |x - center|^2; unlocks ball sublevels and the exact-density path
    static Weight squared_distance_weight(int n, std::vector<double> center);

    const ScalarField& phi() const { return phi_; }
    int n() const { return phi_.n_vars(); }
    const std::optional<std::vector<double>>& distance_center() const { return center_; }
    // c for recognized phi = c |x - center|^2, else 1
    double distance_scale() const { return scale_; }

    FieldForm omega() const;
    FieldForm alpha() const;

    // sampling box for sublevel regions of general weights
    void set_box(std::vector<double> lo, std::vector<double> hi);
    Region sublevel(double r) const; // { phi < r }

    // samples the Hessian of sqrt(phi) on the region; a certified violation
    // throws HypothesisError, otherwise the certificate is recorded
    void certify_sqrt_convex(const Region& sample_region, int samples = 400,
                             std::uint64_t seed = 19);
    bool sqrt_convex() const { return sqrt_convex_; }
    int certificate_samples() const { return certificate_samples_; }

private:
    ScalarField phi_;
    std::optional<std::vector<double>> center_;
    double scale_ = 1.0;
    std::vector<double> box_lo_, box_hi_;
    bool sqrt_convex_ = false;
    int certificate_samples_ = 0;
};

// Uniform pairing interface over the current representations. bidim is the p for
// which T turns a (p,p) test product into a measure. pair_exact may be empty.
struct CurrentHandle {
    int n = 0;
    int bidim = 0;
    std::function<MeasureEstimate(const TestProduct&, const Region&)> pair;
    std::function<std::optional<ExactIntegral>(const TestProduct&, const Region&)> pair_exact;
};

CurrentHandle smooth_handle(const SmoothCurrent& t, const QuadratureSpec& quad);
CurrentHandle submanifold_handle(const SubmanifoldCurrent& t);
CurrentHandle tropical_handle(const TropicalCurrent& t, int resolution = 64);

struct LelongReport {
    std::vector<double> r_grid; // strictly decreasing
    std::vector<double> nu;
    std::vector<double> nu_error;  // quadrature error, scaled like nu
    std::vector<double> ball_mass; // raw localized masses before normalization
    std::vector<double> normalizer;
    bool monotone_ok = false;     // nu nondecreasing in r within 3 errors
    double limit_estimate = 0.0;  // value at the smallest r; brackets the limit from above
    bool exact = false;           // every grid point came from the exact-density path
    bool diverges = false;        // values blow up toward small r
    double loglog_slope = 0.0;    // least-squares d log nu / d log r (when nu > 0)
};

// nu_T(phi, r) = 1/(2^p r^{p/2}) * integral over {phi < r} of T ^ (dd#phi)^p.
// The exact-density path is tried per grid point before the handle's quadrature.
LelongReport lelong_number(const CurrentHandle& t, const Weight& w,
                           std::span<const double> r_grid);

// Classical normalization r^{-p} * integral over {|x-a| < r} of T ^ beta^p;
// the grid is in radius units (r), not weight units (r^2).
LelongReport classical_lelong_number(const CurrentHandle& t, const std::vector<double>& a,
                                     std::span<const double> r_grid);

// r^{-(n/m)(m-n+p)} * integral over {|x-a| < r} of T ^ beta^p; needs m + p > n.
// m = n is the classical normalization.
LelongReport m_lelong_number(const CurrentHandle& t, const std::vector<double>& a, int m,
                             std::span<const double> r_grid);

// r_max * ratio^k for k = 0..points-1; strictly decreasing.
std::vector<double> geometric_grid(double r_max, double ratio = 0.5, int points = 8);

// Five-term localized Jensen identity for a smooth current: with
// k(t) = 1/(2^p t^{p/2}) and G(t) the mass of dd#T ^ omega^{p-1} on {phi < t},
//   nu(r2) - nu(r1) = shell + (k(r1) - k(r2)) int_0^{r1} G dt
//                           + int_{r1}^{r2} (k(t) - k(r2)) G(t) dt.
// The double integrals are swapped into single weighted masses with closed-form
// kernels, so every term is one quadrature.
struct JensenRecord {
    double r1 = 0.0, r2 = 0.0;
    double nu_r1 = 0.0, nu_r2 = 0.0;
    double shell = 0.0;     // integral over {r1 < phi < r2} of T ^ alpha^p
    double dd_linear = 0.0; // (k(r1) - k(r2)) * int_0^{r1} G
    double dd_tail = 0.0;   // int_{r1}^{r2} (k(t) - k(r2)) G(t) dt
    double residual = 0.0;
    double relative_residual = 0.0;
    double quadrature_error = 0.0; // combined error estimate of all terms
    bool closed = false;           // dd#T vanishes symbolically; dd terms are exact zeros
};

JensenRecord jensen_terms(const SmoothCurrent& t, const Weight& w, double r1, double r2,
                          const QuadratureSpec& quad);

// Lower bound for weakly negative convex currents: nu_T(a, r) >= r nu_{dd#T}(a, r0) + c0
// with c0 = min(0, nu_T(a, r0) - r0 nu_{dd#T}(a, r0)), classical normalization.
struct ConcaveBoundRecord {
    double r0 = 0.0;
    double nu_dd_r0 = 0.0;
    double c0 = 0.0;
    std::vector<double> r_grid;
    std::vector<double> lhs, rhs, margin;
    double tolerance = 0.0; // 3x the worst quadrature error
    bool holds = false;
};

ConcaveBoundRecord concave_lower_bound(const SmoothCurrent& t, const std::vector<double>& a,
                                       double r0, std::span<const double> r_grid,
                                       const QuadratureSpec& quad);

// Small-r integrability diagnostic for the concave case: the integrand
// nu_{dd#T}(phi, t) / (2 sqrt t), its trapezoid pieces on the grid, and the
// monotone comparison sequence Lambda.
struct IntegrabilityDiagnostic {
    std::vector<double> r_grid; // decreasing
    std::vector<double> nu_dd;  // nu_{dd#T}(phi, r), bidimension p-1
    std::vector<double> pieces; // per-interval trapezoid contributions
    double integral_estimate = 0.0;
    double piece_slope = 0.0; // d log piece / d log r; <= 0 means divergence
    bool integrable = false;
    std::vector<double> lambda;
    bool lambda_monotone = false;
};

IntegrabilityDiagnostic t5_integrability_diagnostic(const SmoothCurrent& t, const Weight& w,
                                                    std::span<const double> r_grid,
                                                    const QuadratureSpec& quad);

// max over members of nu_{T_k}(phi, r_min) <= nu_limit(phi, r_min) + 3 errors.
struct SemicontinuityRecord {
    std::vector<double> nu_members;
    double nu_limit = 0.0;
    double tolerance = 0.0;
    double margin = 0.0; // nu_limit + tolerance - max member
    bool holds = false;
};

SemicontinuityRecord semicontinuity_check(std::span<const CurrentHandle> members,
                                          const CurrentHandle& limit, const Weight& w,
                                          double r_min);

// Boundary functional (1/(2^p r^{p/2})) * flux of T ^ d#phi ^ omega^{p-1} through
// {phi = r}, expected nondecreasing in r for convex data. Distance-center weights
// only; level sets of general weights are not meshed.
struct BoundaryFunctionalReport {
    std::vector<double> r_grid; // decreasing, weight units
    std::vector<double> values;
    bool monotone_ok = false;
};

BoundaryFunctionalReport boundary_functional(const SmoothCurrent& t, const Weight& w,
                                             std::span<const double> r_grid, int resolution);

// Sampling spot-checks for caller-declared hypotheses; certified violations throw
// HypothesisError with a witness point.
void spot_check_weak_positivity(const SmoothCurrent& t, const Region& region, int samples = 64,
                                std::uint64_t seed = 23, double tol = 1e-9);
void spot_check_wedge_convexity(const SmoothCurrent& t, const Weight& w, const Region& region,
                                int samples = 64, std::uint64_t seed = 23, double tol = 1e-7);

} // namespace supercal
