#pragma once

#include "supercal/calculus.hpp"

#include <Eigen/Dense>

#include <string>

namespace supercal {

// Coefficient matrix W of a (1,1) form, W(i,j) on dx_i ^ dxi_j.
Eigen::MatrixXd coefficient_matrix(const NumForm& a);
NumForm from_matrix(const Eigen::MatrixXd& w);

// (sum_i v_i dx_i) ^ (sum_j v_j dxi_j): the rank-one building block of strong
// positivity.
NumForm rank_one_form(const Eigen::VectorXd& v);

// Wedge of k rank-one forms with seeded gaussian vectors: a strongly positive
// (k,k) test product.
NumForm random_positive_product(int n, int k, SplitMix64& rng);

enum class VerdictKind { CertifiedTrue, CertifiedFalse, PlausiblyTrue };

struct PositivityVerdict {
    VerdictKind kind = VerdictKind::PlausiblyTrue;
    double margin = 0.0; // smallest eigenvalue or pairing encountered
    std::int64_t trials = 0;
    std::string witness; // how to reproduce a violation, when certified false
};

// Weak positivity: pairings with strongly positive complements are nonnegative.
// Bidegrees (0,0), (1,1), (n-1,n-1) and (n,n) are decided exactly through the
// associated symmetric matrix; middle bidegrees are sampled with seeded products.
PositivityVerdict weakly_positive(const NumForm& a, double tol = 1e-12,
                                  std::int64_t samples = 2000, std::uint64_t seed = 11);

// Membership of the symmetrized coefficient matrix in the m-th Garding cone:
// e_1, ..., e_m of its eigenvalues are all nonnegative. (1,1) forms only.
PositivityVerdict m_positive(const NumForm& a, int m, double tol = 1e-12);

// e_k of a list of eigenvalues.
double elementary_symmetric(std::span<const double> lambda, int k);

// Sum of the k x k principal minors of the Hessian of u, exact.
QPoly hessian_minor_sum(const QPoly& u, int n, int k);

// The same minor sum as a field, for non-polynomial variants (radial profiles,
// mollifications). Polynomial inputs fold back to polynomial nodes.
ScalarField hessian_Fk(const ScalarField& u, int k);

struct HessianIdentity {
    bool matches = false;
    QPoly lhs, rhs; // densities relative to the canonical volume
};

// (dd#u)^k ^ beta^{n-k} = k!(n-k)!/n! * (sum of k x k principal Hessian minors) beta^n,
// checked as an exact polynomial identity.
HessianIdentity hessian_wedge_identity(const QPoly& u, int n, int k);

struct ConvexityVerdict {
    VerdictKind kind = VerdictKind::PlausiblyTrue;
    double margin = 0.0;
    std::int64_t trials = 0;
    std::vector<double> witness_point;
};

// Samples Hessians of u over the region and checks e_1..e_m of the eigenvalues.
// Quadratic u has a constant Hessian and is decided exactly. Points where u is
// singular are skipped.
ConvexityVerdict m_convex(const ScalarField& u, const Region& region, int m,
                          std::int64_t samples = 500, std::uint64_t seed = 13, double tol = 1e-9);

} // namespace supercal
