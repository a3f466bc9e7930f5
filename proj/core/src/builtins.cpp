#include "supercal/builtins.hpp"

#include "supercal/errors.hpp"

#include <cmath>
#include <numbers>

namespace supercal {

namespace {

// Ball of radius R about c clipped to the band |x_j| <= half_width for j >= axis_from,
// expressed as a sublevel region so membership stays exact.
std::optional<Region> clip_ball_to_band(const std::vector<double>& c, double R,
                                        int axis_from, double half_width) {
    const int n = int(c.size());
    if (!(R > 0.0)) return std::nullopt;
    std::vector<double> lo(c), hi(c);
    for (int i = 0; i < n; ++i) {
        lo[i] -= R;
        hi[i] += R;
        if (i >= axis_from) {
            lo[i] = std::max(lo[i], -half_width);
            hi[i] = std::min(hi[i], half_width);
        }
        if (!(lo[i] < hi[i])) return std::nullopt;
    }
    std::vector<double> center(c);
    return Region::sublevel(squared_distance(n, center), R * R, std::move(lo),
                            std::move(hi));
}

std::optional<Region> clip_box_to_band(const Region& region, int axis_from,
                                       double half_width) {
    BoundingBox bb = region.bounding();
    std::vector<double> lo = bb.lo, hi = bb.hi;
    for (int i = axis_from; i < int(lo.size()); ++i) {
        lo[i] = std::max(lo[i], -half_width);
        hi[i] = std::min(hi[i], half_width);
        if (!(lo[i] < hi[i])) return std::nullopt;
    }
    return Region::box(std::move(lo), std::move(hi));
}

} // namespace

const std::vector<BuiltinInfo>& builtin_catalog() {
    static const std::vector<BuiltinInfo> cat = {
        {"phi_m", "field",
         "radial potential -|x|^(2-n/m)/(n/m-2), log profile at m = n/2; parameters n, m"},
        {"beta_power", "current", "beta^k as a smooth current; parameters n, k"},
        {"phi_m_hessian", "current",
         "-phi_m (dd#phi_m)^(m-1); scaled small-ball masses diverge when n > 2m"},
        {"paper_strip_counterexample", "current",
         "strip-supported convex current whose normalized ball masses grow like r^2"},
        {"paper_sin_singularity", "current",
         "diagonal coefficients 1 -+ sin(1/(x1+x2)^2); the exterior derivative has "
         "divergent mass near the line x1 + x2 = 0"},
        {"plane", "mesh", "coordinate-plane patch in R^n; parameters n, dim"},
        {"sphere", "mesh", "round sphere in R^3"},
        {"catenoid", "mesh", "catenoid patch in R^3"},
        {"line", "mesh", "x1-axis segment in R^n"},
        {"tropical_hinge", "tropical", "dd# max(0, x1)"},
        {"tropical_abs", "tropical", "dd# |x1|"},
        {"tropical_corner", "tropical", "dd# max(0, x1, x2) in R^2"},
    };
    return cat;
}

void instantiate_builtin(const std::string& name) {
    if (name == "phi_m") {
        phi_m_field(3, 1);
        phi_m_field(4, 2);
    } else if (name == "beta_power") {
        beta_power_current(3, 2);
    } else if (name == "phi_m_hessian") {
        phi_m_hessian_current(4, 2);
    } else if (name == "paper_strip_counterexample") {
        strip_growth_current();
    } else if (name == "paper_sin_singularity") {
        sin_singularity_current();
        sin_singularity_shell(1, true);
    } else if (name == "plane") {
        coordinate_plane_current(3, 2, 1.0, 8);
    } else if (name == "sphere") {
        sphere_current(1.0, 12);
    } else if (name == "catenoid") {
        catenoid_current(0.5, 16, 8);
    } else if (name == "line") {
        line_current(2, 1.0, 16);
    } else if (name == "tropical_hinge") {
        tropical_ddsharp(hinge_field(2));
    } else if (name == "tropical_abs") {
        tropical_ddsharp(abs_field(2));
    } else if (name == "tropical_corner") {
        tropical_ddsharp(corner_field());
    } else {
        throw InvalidArgument("unknown builtin: " + name);
    }
}

ScalarField phi_m_field(int n, int m) {
    if (n < 1 || m < 1 || m > n) throw InvalidArgument("phi_m needs 1 <= m <= n");
    std::vector<double> zeros(n, 0.0);
    std::vector<RadialTermData> terms(1);
    if (2 * m == n) {
        terms[0].poly.add_term(0, 1.0);
        terms[0].rpow = 0.0;
        terms[0].logpow = 1;
    } else {
        double e = double(n) / double(m) - 2.0;
        terms[0].poly.add_term(0, -1.0 / e);
        terms[0].rpow = -e;
        terms[0].logpow = 0;
    }
    return ScalarField::radial(n, std::move(zeros), std::move(terms));
}

SmoothCurrent beta_power_current(int n, int k) {
    if (n < 1 || k < 0 || k > n) throw InvalidArgument("beta power needs 0 <= k <= n");
    return SmoothCurrent(to_field_form(beta_power<double>(n, k)));
}

SmoothCurrent phi_m_hessian_current(int n, int m) {
    ScalarField phi = phi_m_field(n, m);
    FieldForm acc = scalar_form(-phi);
    if (m >= 2) {
        FieldForm h = dd_sharp(phi);
        for (int i = 0; i + 1 < m; ++i) acc = wedge(acc, h);
    }
    return SmoothCurrent(std::move(acc));
}

SmoothCurrent strip_growth_current() {
    const int n = 2;
    ScalarField x1 = ScalarField::coordinate(n, 0);
    ScalarField x2 = ScalarField::coordinate(n, 1);
    ScalarField w = ScalarField::constant(n, 1.0) - x2 * x2;
    ScalarField w2 = w * w;
    ScalarField w4 = w2 * w2;
    FieldForm f(n, 1, 1);
    f.add_term(1u, 1u, 0.25 * w4);       // 2 f(x2)
    f.add_term(2u, 2u, 2.0 * w4 * x1 * x1); // 2 g(x2) x1^2
    return SmoothCurrent(std::move(f));
}

CurrentHandle strip_growth_handle(const QuadratureSpec& quad) {
    CurrentHandle inner = smooth_handle(strip_growth_current(), quad);
    CurrentHandle h;
    h.n = inner.n;
    h.bidim = inner.bidim;
    h.pair = [inner](const TestProduct& psi, const Region& region) -> MeasureEstimate {
        const MeasureEstimate empty{0.0, 0.0, 0, "empty"};
        switch (region.kind()) {
        case Region::Kind::Ball:
        case Region::Kind::Shell: {
            const std::vector<double>& c = *region.center();
            auto outer = clip_ball_to_band(c, region.outer_radius(), 1, 1.0);
            if (!outer) return empty;
            MeasureEstimate est = inner.pair(psi, *outer);
            if (region.kind() == Region::Kind::Shell) {
                auto hole = clip_ball_to_band(c, region.inner_radius(), 1, 1.0);
                if (hole) {
                    MeasureEstimate sub = inner.pair(psi, *hole);
                    est.value -= sub.value;
                    est.error += sub.error;
                    est.evaluations += sub.evaluations;
                }
            }
            return est;
        }
        case Region::Kind::Box: {
            auto clipped = clip_box_to_band(region, 1, 1.0);
            if (!clipped) return empty;
            return inner.pair(psi, *clipped);
        }
        default:
            throw InvalidArgument("strip pairings support balls, shells and boxes");
        }
    };
    return h;
}

std::function<double(std::span<const double>)> strip_growth_probe() {
    auto raw = density_probe(strip_growth_current());
    return [raw](std::span<const double> x) {
        return std::abs(x[1]) <= 1.0 ? raw(x) : 0.0;
    };
}

SmoothCurrent sin_singularity_current() {
    const int n = 2;
    ScalarField s = ScalarField::coordinate(n, 0) + ScalarField::coordinate(n, 1);
    ScalarField g = pow_field(s * s, -1.0);
    ScalarField one = ScalarField::constant(n, 1.0);
    FieldForm f(n, 1, 1);
    f.add_term(1u, 1u, one - sin_field(g));
    f.add_term(2u, 2u, one + sin_field(g));
    return SmoothCurrent(std::move(f));
}

Region sin_singularity_shell(int k, bool positive_side) {
    if (k < 1) throw InvalidArgument("shell index starts at 1");
    const double pi = std::numbers::pi;
    double outer = 1.0 / std::sqrt(2.0 * pi * double(k));
    double inner = 1.0 / std::sqrt(2.0 * pi * double(k) + pi / 4.0);
    Eigen::MatrixXd map(2, 2);
    map << 1.0, -1.0, 0.0, 1.0; // (u, x2) -> (u - x2, x2), so x1 + x2 = u
    std::vector<double> lo, hi;
    if (positive_side) {
        lo = {inner, -1.0};
        hi = {outer, 1.0};
    } else {
        lo = {-outer, -1.0};
        hi = {-inner, 1.0};
    }
    return Region::affine_image(std::move(map), {0.0, 0.0}, std::move(lo), std::move(hi));
}

SubmanifoldCurrent coordinate_plane_current(int n, int dim, double half_extent,
                                            int resolution) {
    if (dim < 1 || dim >= n) throw InvalidArgument("plane dimension must be in [1, n)");
    std::vector<double> origin(n, 0.0);
    std::vector<Eigen::VectorXd> tangent;
    for (int i = 0; i < dim; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[i] = 1.0;
        tangent.push_back(std::move(e));
    }
    return SubmanifoldCurrent(plane_mesh(n, origin, tangent, half_extent, resolution),
                              plane_implicit(n, origin, tangent));
}

SubmanifoldCurrent sphere_current(double radius, int resolution) {
    return SubmanifoldCurrent(sphere_mesh(radius, resolution), {sphere_implicit(radius)});
}

SubmanifoldCurrent catenoid_current(double v_max, int u_resolution, int v_resolution) {
    return SubmanifoldCurrent(catenoid_mesh(v_max, u_resolution, v_resolution),
                              {catenoid_implicit()});
}

SubmanifoldCurrent line_current(int n, double half_length, int resolution) {
    if (n < 2) throw InvalidArgument("line current needs ambient dimension at least 2");
    std::vector<double> origin(n, 0.0);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
    dir[0] = 1.0;
    std::vector<Eigen::VectorXd> tangent{dir};
    return SubmanifoldCurrent(line_mesh(origin, dir, half_length, resolution),
                              plane_implicit(n, origin, tangent));
}

ScalarField hinge_field(int n) {
    if (n < 1) throw InvalidArgument("dimension must be positive");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, n);
    a(1, 0) = 1.0;
    return ScalarField::max_affine(n, std::move(a), Eigen::VectorXd::Zero(2));
}

ScalarField abs_field(int n) {
    if (n < 1) throw InvalidArgument("dimension must be positive");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, n);
    a(0, 0) = -1.0;
    a(1, 0) = 1.0;
    return ScalarField::max_affine(n, std::move(a), Eigen::VectorXd::Zero(2));
}

ScalarField corner_field() {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 2);
    a(1, 0) = 1.0;
    a(2, 1) = 1.0;
    return ScalarField::max_affine(2, std::move(a), Eigen::VectorXd::Zero(3));
}

} // namespace supercal
