#include "supercal/exact_integrals.hpp"

#include <cmath>

namespace supercal {

double sphere_monomial_moment(int n, std::span<const int> alpha) {
    int total = 0;
    for (int a : alpha) {
        if (a < 0) throw InvalidArgument("sphere moment: negative exponent");
        if (a % 2 != 0) return 0.0;
        total += a;
    }
    double log_num = 0.0;
    for (int a : alpha) log_num += std::lgamma(0.5 * (a + 1));
    for (std::size_t i = alpha.size(); int(i) < n; ++i) log_num += std::lgamma(0.5);
    double log_den = std::lgamma(0.5 * (total + n));
    return 2.0 * std::exp(log_num - log_den);
}

namespace {

// antiderivative of rho^e log(rho)^b, evaluated at rho > 0
double radial_antiderivative(double e, int b, double rho) {
    double lg = std::log(rho);
    if (e == -1.0) return std::pow(lg, b + 1) / (b + 1);
    // integrate by parts b times: rho^{e+1} * sum_{j=0..b} (-1)^j b!/(b-j)! lg^{b-j} / (e+1)^{j+1}
    double acc = 0.0;
    double coef = 1.0 / (e + 1.0);
    for (int j = 0; j <= b; ++j) {
        acc += coef * std::pow(lg, b - j);
        coef *= -double(b - j) / (e + 1.0);
    }
    return std::pow(rho, e + 1.0) * acc;
}

// integral of rho^e log(rho)^b over [r0, r1]; flags divergence at rho = 0
void radial_integral(double e, int b, double r0, double r1, double& value, bool& divergent) {
    if (r0 == 0.0) {
        if (e <= -1.0) {
            divergent = true;
            return;
        }
        value += radial_antiderivative(e, b, r1); // limit at 0 is 0 since e + 1 > 0
        return;
    }
    value += radial_antiderivative(e, b, r1) - radial_antiderivative(e, b, r0);
}

} // namespace

ExactIntegral integrate_radial(const RadialDensity& d, double r_inner, double r_outer) {
    if (!(0.0 <= r_inner && r_inner < r_outer))
        throw InvalidArgument("integrate_radial: radii out of order");
    ExactIntegral out;
    std::vector<int> alpha(std::size_t(d.n), 0);
    for (const auto& term : d.terms) {
        for (const auto& [key, c] : term.poly.terms()) {
            int total = 0;
            for (int v = 0; v < d.n; ++v) {
                alpha[std::size_t(v)] = mono_exp(key, v);
                total += alpha[std::size_t(v)];
            }
            double s = sphere_monomial_moment(d.n, alpha);
            if (s == 0.0) continue;
            double e = term.rpow + total + d.n - 1;
            double radial = 0.0;
            radial_integral(e, term.logpow, r_inner, r_outer, radial, out.divergent);
            if (out.divergent) return out;
            out.value += c * s * radial;
        }
    }
    return out;
}

double integrate_poly_box(const DPoly& p, const std::vector<double>& lo,
                          const std::vector<double>& hi) {
    if (lo.size() != hi.size()) throw InvalidArgument("integrate_poly_box: shape mismatch");
    int n = int(lo.size());
    double acc = 0.0;
    for (const auto& [key, c] : p.terms()) {
        double m = c;
        for (int v = 0; v < n; ++v) {
            int e = mono_exp(key, v);
            m *= (std::pow(hi[std::size_t(v)], e + 1) - std::pow(lo[std::size_t(v)], e + 1)) /
                 (e + 1);
        }
        acc += m;
    }
    return acc;
}

std::optional<ExactIntegral> integrate_exact(const ScalarField& g, const Region& region) {
    if (g.n_vars() != region.dim()) throw InvalidArgument("integrate_exact: dimension mismatch");
    switch (region.kind()) {
    case Region::Kind::Ball:
    case Region::Kind::Shell: {
        auto rd = g.as_radial(*region.center());
        if (!rd) return std::nullopt;
        return integrate_radial(*rd, region.inner_radius(), region.outer_radius());
    }
    case Region::Kind::Box: {
        auto p = g.as_poly();
        if (!p) return std::nullopt;
        BoundingBox b = region.bounding();
        return ExactIntegral{integrate_poly_box(*p, b.lo, b.hi), false};
    }
    default:
        return std::nullopt;
    }
}

} // namespace supercal
