#pragma once

#include "supercal/errors.hpp"
#include "supercal/form.hpp"
#include "supercal/polynomial.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace supercal {

// One summand poly(y) * |y|^rpow * log(|y|)^logpow of a radial-polynomial expression
// in the shifted variable y = x - center.
struct RadialTermData {
    DPoly poly;
    double rpow = 0.0;
    int logpow = 0;
};

// Normal form "sum of radial-polynomial terms around a common center". Densities in
// this form integrate over centered balls and shells in closed form.
struct RadialDensity {
    int n = 0;
    std::vector<double> center;
    std::vector<RadialTermData> terms;
};

struct MaxAffineData {
    Eigen::MatrixXd a; // one row per affine piece
    Eigen::VectorXd b;
};

struct SampledData {
    std::vector<double> lo, hi;
    std::vector<int> dims;        // grid points per axis, >= 2
    std::vector<double> values;   // row-major, last axis fastest
};

// Compactly supported mollifier rho(z) = c_n (1 - |z|^2)^4 on the unit ball. The
// profile is polynomial, so kernel derivatives of any order stay exact; the
// normalizing constant is fixed by the same tensor quadrature used in evaluation,
// which makes mollification reproduce affine functions to machine precision.
struct MollifierKernel {
    int n = 0;
    int points_per_axis = 16;

    double normalization() const;          // quadrature mass of the unnormalized profile
    DPoly profile() const;                 // (1 - |z|^2)^4 as a polynomial in z
    double closed_form_mass() const;       // pi^{n/2} Gamma(5) / Gamma(n/2 + 5)
};

// Scalar function R^n -> R with exact symbolic partial derivatives. Immutable value
// type over a shared expression tree. Variants: polynomial, radial-polynomial sums,
// max-affine, mollification of another field, sampled grid, and the closure of those
// under +, *, powers, log, sin, cos.
class ScalarField {
public:
    ScalarField() = default;

    static ScalarField zero(int n);
    static ScalarField constant(int n, double v);
    static ScalarField from_poly(int n, DPoly p);
    static ScalarField from_poly(int n, const QPoly& p);
    static ScalarField coordinate(int n, int var);
    static ScalarField radial(int n, std::vector<double> center, std::vector<RadialTermData> terms);
    static ScalarField max_affine(int n, Eigen::MatrixXd a, Eigen::VectorXd b);
    static ScalarField sampled(int n, SampledData data);

    bool valid() const { return node_ != nullptr; }
    int n_vars() const;
    bool is_zero() const; // structural; false negatives possible for composite trees

    double eval(std::span<const double> x) const;
    double operator()(std::span<const double> x) const { return eval(x); }

    ScalarField partial(int var) const;

    // Convolution with the standard kernel at width eps. points_per_axis controls the
    // tensor quadrature used whenever the result is evaluated.
    ScalarField mollified(double eps, int points_per_axis = 16) const;

    std::optional<RadialDensity> as_radial(std::span<const double> center) const;
    std::optional<DPoly> as_poly() const;
    std::optional<MaxAffineData> as_max_affine() const;

    friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator*(double s, const ScalarField& a);
    ScalarField operator-() const;

    friend ScalarField pow_field(const ScalarField& f, double exponent);
    friend ScalarField log_field(const ScalarField& f);
    friend ScalarField exp_field(const ScalarField& f);
    friend ScalarField sin_field(const ScalarField& f);
    friend ScalarField cos_field(const ScalarField& f);

    std::string describe() const;

    struct Node;
    explicit ScalarField(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    const Node& node() const;

private:
    std::shared_ptr<const Node> node_;
};

ScalarField pow_field(const ScalarField& f, double exponent);
ScalarField log_field(const ScalarField& f);
ScalarField exp_field(const ScalarField& f);
ScalarField sin_field(const ScalarField& f);
ScalarField cos_field(const ScalarField& f);

// (e^f + e^{-f}) / 2 and (e^f - e^{-f}) / 2.
ScalarField cosh_field(const ScalarField& f);
ScalarField sinh_field(const ScalarField& f);

template <>
struct CoefOps<ScalarField> {
    static bool is_zero(const ScalarField& c) { return !c.valid() || c.is_zero(); }
    static ScalarField from_int(int n, long v) { return ScalarField::constant(n, double(v)); }
    static ScalarField add(const ScalarField& a, const ScalarField& b) { return a + b; }
    static ScalarField neg(const ScalarField& a) { return -a; }
    static ScalarField mul(const ScalarField& a, const ScalarField& b) { return a * b; }
};

using FieldForm = Form<ScalarField>;

NumForm evaluate(const FieldForm& a, std::span<const double> x);
FieldForm to_field_form(const PolyForm& a);
FieldForm to_field_form(const NumForm& a);

// |x - c|^2 as a polynomial field, the standard quadratic weight.
ScalarField squared_distance(int n, std::span<const double> center);

} // namespace supercal
