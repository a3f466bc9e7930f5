#pragma once

#include "supercal/lelong.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace supercal {

// Convex function of at most linear growth, carrying a sampled certificate
// f(x) <= slope * |x| + offset. The certificate is a schedule of sphere checks,
// not a proof; certify() records how far it was pushed.
class LelongClassFunction {
public:
    LelongClassFunction(ScalarField f, double slope, double offset);

    const ScalarField& field() const { return f_; }
    int n() const { return f_.n_vars(); }
    double slope() const { return slope_; }
    double offset() const { return offset_; }

    // Convexity spot-check on the ball of radius r_max plus the growth bound on
    // spheres up to r_max; a certified violation throws HypothesisError.
    void certify(double r_max, int samples = 200, std::uint64_t seed = 29);
    bool certified() const { return certified_; }
    double certified_radius() const { return certified_radius_; }

private:
    ScalarField f_;
    double slope_ = 0.0;
    double offset_ = 0.0;
    bool certified_ = false;
    double certified_radius_ = 0.0;
};

// Partial degrees over growing balls. The improper integral is never claimed;
// converged only says the last two partials agree within tolerance.
struct DegreeReport {
    std::vector<double> r_grid; // strictly increasing outer radii
    std::vector<double> partial;
    std::vector<double> stderr_vals;
    bool converged = false;
    double limit_estimate = 0.0; // last partial
    bool nondecreasing = false;  // within 3 errors, expected for positive integrands
    bool exact = false;          // every partial came from the exact-density path
};

// delta(T) restricted to balls: integral of T ^ (dd#|x|)^p over the shell
// 1e-6 < |x| < R. The cone form dd#|x| is singular at the origin, so a fixed
// excision radius stands in for the puncture. Quadrature comes with the handle.
DegreeReport degree(const CurrentHandle& t, std::span<const double> r_grid);

// Same degree through the cutoff pairing <|x| T, dd#chi_R ^ (dd#|x|)^(p-1)> with
// chi_R = (1 - |x|^2/R^2)^2. Integration by parts turns chi_R (dd#|x|)^p into
// |x| dd#chi_R ^ (dd#|x|)^(p-1) when dT = 0, and chi_R(0) = 1 makes a conical
// ray through the origin contribute its full weight at every finite R, which
// the excised direct route cannot see. Only valid for d-closed currents.
DegreeReport degree_cutoff(const CurrentHandle& t, std::span<const double> r_grid);

// delta(T, w) partials: integral of T ^ (dd#w)^p over the same excised balls.
// Convexity of w is spot-checked by sampling; a certified violation throws.
DegreeReport weighted_degree(const CurrentHandle& t, const ScalarField& weight,
                             std::span<const double> r_grid);

// Running max of u/w over sphere samples on the given radius schedule. The
// value underestimates limsup u/w whenever the schedule stops early; the full
// running sequence is reported so that is visible.
struct SigmaGrowthReport {
    std::vector<double> radii;
    std::vector<double> running_max;
    double value = 0.0;
};

SigmaGrowthReport sigma_growth(
    const LelongClassFunction& u, const ScalarField& weight, std::span<const double> radii,
    int samples_per_sphere = 256, std::uint64_t seed = 29,
    const std::function<bool(std::span<const double>)>& on_support = nullptr);

// Local comparison of two weights with ratio limit l = lim psi/phi near the
// common zero. Both candidate bounds are reported: the stated one l^p nu(phi)
// and the square-root one l^(p/2) nu(phi). Substituting psi = c phi into the
// normalization 1/(2^p r^(p/2)) gives nu(c phi, r) = c^(p/2) nu(phi, r/c),
// since {c phi < r} = {phi < r/c} and (dd#(c phi))^p = c^p (dd#phi)^p; the
// limit therefore scales with exponent p/2, not p.
struct ComparisonLocalReport {
    double ratio = 0.0; // l
    int bidim = 0;
    double nu_phi = 0.0;
    double nu_psi = 0.0;
    double bound_stated = 0.0; // ratio^p * nu_phi
    double bound_sqrt = 0.0;   // ratio^(p/2) * nu_phi
    bool stated_holds = false; // nu_psi <= bound_stated + tolerance
    bool sqrt_holds = false;
    double tolerance = 0.0;
};

ComparisonLocalReport verify_comparison_local(const CurrentHandle& t, const Weight& phi,
                                              const Weight& psi, double ratio,
                                              std::span<const double> r_grid);

// Comparison at infinity: integral of T ^ dd#u_1 ^ ... ^ dd#u_p against the
// same product over the v_j, scaled by prod l_j. Hinged test functions are
// mollified at two widths and the finer value is kept, with the gap folded
// into the error.
struct ComparisonInfinityReport {
    double lhs = 0.0;
    double lhs_error = 0.0;
    double rhs_base = 0.0; // integral with the v_j superhessians
    double rhs_error = 0.0;
    double ratio_product = 1.0;
    double rhs = 0.0;
    bool holds = false;
    double tolerance = 0.0;
};

ComparisonInfinityReport verify_comparison_infinity(
    const CurrentHandle& t, std::span<const LelongClassFunction> u_list,
    std::span<const LelongClassFunction> v_list, std::span<const double> l_list, double R,
    double mollify_eps = 0.1);

// Growth link between the trace measure of dd#T and the mass of T: reports the
// smallest c >= 0 with r * nu_ddT(0, r) >= -c * nu_T(0, 2r) across the grid,
// classical normalizations on both sides.
struct GrowthLinkReport {
    std::vector<double> r_grid;
    std::vector<double> lhs; // r * nu_ddT(0, r)
    std::vector<double> rhs; // nu_T(0, 2r)
    double c = 0.0;
    bool bounded = false; // a finite c fits every grid point
    double tolerance = 0.0;
};

GrowthLinkReport growth_link_check(const SmoothCurrent& t, std::span<const double> r_grid,
                                   const QuadratureSpec& quad = MonteCarloSpec{});

// nu_T(0, r) pushed to large r for currents supported in the strip
// sum_{j>k} |x_j|^delta <= 1. bounded requires the last three values to agree
// within tolerance; the log-log slope over the upper half of the grid is the
// measured growth exponent. When a density probe is supplied, points outside
// the strip are sampled and the largest probed density is reported as leak.
struct StripReport {
    std::vector<double> r_grid; // strictly increasing
    std::vector<double> nu;
    std::vector<double> nu_error;
    bool bounded = false;
    double loglog_slope = 0.0;
    bool support_checked = false;
    bool support_ok = true;
    double support_leak = 0.0;
};

StripReport strip_experiment(const CurrentHandle& t, int k, double delta,
                             std::span<const double> r_grid,
                             const std::function<double(std::span<const double>)>&
                                 density_probe = nullptr,
                             int support_samples = 256, std::uint64_t seed = 31);

// Pointwise l2 norm of the current's coefficient vector, for strip support checks.
std::function<double(std::span<const double>)> density_probe(const SmoothCurrent& t);

// delta(limit) <= min over members + tolerance, all at the same outer radius.
struct DegreeSemicontinuityRecord {
    std::vector<double> member_degrees;
    double limit_degree = 0.0;
    double tolerance = 0.0;
    double margin = 0.0; // min member + tolerance - limit
    bool holds = false;
};

DegreeSemicontinuityRecord degree_semicontinuity_check(std::span<const CurrentHandle> members,
                                                       const CurrentHandle& limit, double R);

// Weight-family variant: delta(T, limit_weight) against delta(T, w_k) at radius R.
DegreeSemicontinuityRecord degree_semicontinuity_check(const CurrentHandle& t,
                                                       std::span<const ScalarField> weights,
                                                       const ScalarField& limit_weight, double R);

} // namespace supercal
