#include "supercal/calculus.hpp"

#include <cmath>

namespace supercal {

FieldForm dd_sharp(const ScalarField& u) {
    int n = u.n_vars();
    FieldForm r(n, 1, 1);
    std::vector<ScalarField> grad;
    grad.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i) grad.push_back(u.partial(i));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.add_term(Mask(1) << i, Mask(1) << j, grad[i].partial(j));
    return r;
}

PolyForm dd_sharp(const QPoly& u, int n) {
    PolyForm r(n, 1, 1);
    for (int i = 0; i < n; ++i) {
        QPoly di = u.partial(i);
        for (int j = 0; j < n; ++j) r.add_term(Mask(1) << i, Mask(1) << j, di.partial(j));
    }
    return r;
}

FieldForm alpha_form(const ScalarField& phi) {
    FieldForm sf = scalar_form(phi);
    FieldForm first = dd_sharp(phi).scaled(0.5 * pow_field(phi, -0.5));
    FieldForm second =
        wedge(exterior_d(sf), dsharp(sf)).scaled(0.25 * pow_field(phi, -1.5));
    return first - second;
}

ScalarField density_field(const FieldForm& a) {
    if (a.p() != a.n() || a.q() != a.n())
        throw InvalidArgument("density_field: form must be (n,n)");
    if (a.is_zero()) return ScalarField::zero(a.n());
    const ScalarField& c = a.terms().front().second;
    return orientation_sign(a.n()) > 0 ? c : -c;
}

MeasureEstimate integrate_form(const FieldForm& a, const Region& region,
                               const QuadratureSpec& spec) {
    if (a.n() != region.dim()) throw InvalidArgument("integrate_form: dimension mismatch");
    ScalarField g = density_field(a);
    return integrate(
        region, [&g](std::span<const double> x) { return g.eval(x); }, spec);
}

namespace {

// F_j = sign * (-1)^{j-1} c_j, where c_j is the coefficient on
// dx_{[n] minus j} ^ dxi_{[n]}; then density(d a) = div F.
std::vector<ScalarField> flux_field(const FieldForm& a) {
    const int n = a.n();
    Mask full = (n == 31) ? ~Mask(0) : (Mask(1) << n) - 1;
    std::vector<ScalarField> flux(std::size_t(n), ScalarField::zero(n));
    int sig = orientation_sign(n);
    for (int j = 0; j < n; ++j) {
        const ScalarField* c = a.coefficient(full & ~(Mask(1) << j), full);
        if (!c) continue;
        double s = (j % 2 == 0) ? sig : -sig;
        flux[std::size_t(j)] = s * *c;
    }
    return flux;
}

} // namespace

double flux_integral(const FieldForm& a, std::span<const SpherePoint> points) {
    const int n = a.n();
    if (a.p() != n - 1 || a.q() != n)
        throw InvalidArgument("flux_integral: form must have bidegree (n-1, n)");
    auto flux = flux_field(a);
    double acc = 0.0;
    for (const auto& p : points) {
        double fn = 0.0;
        for (int j = 0; j < n; ++j) fn += flux[std::size_t(j)].eval(p.x) * p.normal[j];
        acc += p.w * fn;
    }
    return acc;
}

StokesCheck stokes_residual(const FieldForm& a, const Region& region, int boundary_resolution,
                            const QuadratureSpec& volume_spec) {
    const int n = a.n();
    if (a.p() != n - 1 || a.q() != n)
        throw InvalidArgument("stokes_residual: form must have bidegree (n-1, n)");
    if (region.dim() != n) throw InvalidArgument("stokes_residual: dimension mismatch");

    auto flux = flux_field(a);

    StokesCheck out;
    out.volume_integral = integrate_form(exterior_d(a), region, volume_spec).value;

    if (region.kind() == Region::Kind::Ball) {
        out.boundary_integral = flux_integral(
            a, sphere_quadrature(*region.center(), region.outer_radius(), boundary_resolution));
    } else if (region.kind() == Region::Kind::Box) {
        BoundingBox b = region.bounding();
        double acc = 0.0;
        std::vector<double> x(std::size_t(n), 0.0);
        std::vector<int> idx(std::size_t(std::max(n - 1, 0)), 0);
        for (int axis = 0; axis < n; ++axis) {
            for (int side = 0; side < 2; ++side) {
                double face_area = 1.0;
                for (int i = 0; i < n; ++i)
                    if (i != axis) face_area *= b.hi[i] - b.lo[i];
                std::fill(idx.begin(), idx.end(), 0);
                double face_sum = 0.0;
                std::int64_t count = 0;
                while (true) {
                    int pos = 0;
                    for (int i = 0; i < n; ++i) {
                        if (i == axis) {
                            x[i] = side ? b.hi[i] : b.lo[i];
                        } else {
                            x[i] = b.lo[i] +
                                   (idx[pos] + 0.5) / boundary_resolution * (b.hi[i] - b.lo[i]);
                            ++pos;
                        }
                    }
                    face_sum += flux[std::size_t(axis)].eval(x) * (side ? 1.0 : -1.0);
                    ++count;
                    if (n == 1) break;
                    int ax = n - 2;
                    while (ax >= 0 && ++idx[ax] == boundary_resolution) idx[ax--] = 0;
                    if (ax < 0) break;
                }
                acc += face_area * face_sum / double(count);
            }
        }
        out.boundary_integral = acc;
    } else {
        throw InvalidArgument("stokes_residual: region must be a ball or a box");
    }

    out.residual = std::abs(out.volume_integral - out.boundary_integral);
    return out;
}

double sphere_mean(const ScalarField& f, const std::vector<double>& center, double radius,
                   int resolution, std::uint64_t seed) {
    auto pts = sphere_quadrature(center, radius, resolution, seed);
    double num = 0.0, den = 0.0;
    for (const auto& p : pts) {
        num += p.w * f.eval(p.x);
        den += p.w;
    }
    return num / den;
}

} // namespace supercal
