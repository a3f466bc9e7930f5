#pragma once

#include "supercal/form.hpp"
#include "supercal/quadrature.hpp"
#include "supercal/scalar_field.hpp"

namespace supercal {

namespace detail {
inline ScalarField coef_partial(const ScalarField& c, int var) { return c.partial(var); }
template <class T>
Polynomial<T> coef_partial(const Polynomial<T>& c, int var) {
    return c.partial(var);
}
} // namespace detail

// d(c dx_K ^ dxi_L) = sum_i (d_i c) dx_i ^ dx_K ^ dxi_L.
template <class C>
Form<C> exterior_d(const Form<C>& a) {
    if (a.p() + 1 > a.n()) return Form<C>(a.n(), a.n(), a.q());
    Form<C> r(a.n(), a.p() + 1, a.q());
    for (const auto& [key, c] : a.terms()) {
        Mask k = key_k(key), l = key_l(key);
        for (int i = 0; i < a.n(); ++i) {
            Mask bi = Mask(1) << i;
            if (k & bi) continue;
            C dc = detail::coef_partial(c, i);
            if (CoefOps<C>::is_zero(dc)) continue;
            if (merge_sign(bi, k) < 0) dc = CoefOps<C>::neg(std::move(dc));
            r.add_term(bi | k, l, std::move(dc));
        }
    }
    return r;
}

// d# = J d J^{-1}; on scalars d#u = sum_i (d_i u) dxi_i.
template <class C>
Form<C> dsharp(const Form<C>& a) {
    Form<C> r = apply_J(exterior_d(apply_J(a)));
    if ((a.p() + a.q()) % 2 != 0) r = -r;
    return r;
}

template <class C>
Form<C> dd_sharp(const Form<C>& a) {
    return exterior_d(dsharp(a));
}

// dd#u = sum_ij (d_i d_j u) dx_i ^ dxi_j for a scalar u; symmetric (1,1) form.
FieldForm dd_sharp(const ScalarField& u);
PolyForm dd_sharp(const QPoly& u, int n);

inline FieldForm scalar_form(const ScalarField& f) {
    FieldForm r(f.n_vars(), 0, 0);
    r.add_term(0, 0, f);
    return r;
}

// dd# sqrt(phi) expanded on {phi > 0}:
//   dd#phi / (2 phi^{1/2}) - (dphi ^ d#phi) / (4 phi^{3/2}).
FieldForm alpha_form(const ScalarField& phi);

// Pointwise density of an (n,n) form with field coefficients.
ScalarField density_field(const FieldForm& a);

// Integral over the region of the density of an (n,n) form.
MeasureEstimate integrate_form(const FieldForm& a, const Region& region,
                               const QuadratureSpec& spec);

struct StokesCheck {
    double volume_integral = 0.0;
    double boundary_integral = 0.0;
    double residual = 0.0;
};

// Compares the integral of density(d a) over a ball or box against the flux of the
// matching vector field through the boundary; a has bidegree (n-1, n).
StokesCheck stokes_residual(const FieldForm& a, const Region& region, int boundary_resolution,
                            const QuadratureSpec& volume_spec);

// Flux of the vector field matching the (n-1, n) form a through a quadrature rule
// with outward normals; the boundary side of stokes_residual.
double flux_integral(const FieldForm& a, std::span<const SpherePoint> points);

// Average of the field over the sphere |x - center| = radius.
double sphere_mean(const ScalarField& f, const std::vector<double>& center, double radius,
                   int resolution, std::uint64_t seed = 7);

} // namespace supercal
