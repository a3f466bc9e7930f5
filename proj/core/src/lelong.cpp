#include "supercal/lelong.hpp"

#include "supercal/errors.hpp"
#include "supercal/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace supercal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// recognizes c (sum x_i^2 - 2 a_i x_i + |a|^2) and recovers center and scale
struct DistanceWeight {
    std::vector<double> center;
    double scale = 1.0;
};

std::optional<DistanceWeight> detect_distance_center(const ScalarField& phi) {
    const auto poly = phi.as_poly();
    if (!poly) return std::nullopt;
    const int n = phi.n_vars();
    double scale = 0.0;
    for (const auto& [key, c] : poly->terms())
        if (mono_total_degree(key) == 2) {
            int var = -1;
            for (int v = 0; v < n; ++v)
                if (mono_exp(key, v) == 2) var = v;
            if (var < 0) return std::nullopt;
            if (scale == 0.0) scale = c;
        }
    if (!(scale > 0.0)) return std::nullopt;
    std::vector<double> center(std::size_t(n), 0.0);
    double constant = 0.0;
    for (const auto& [key, c] : poly->terms()) {
        const int deg = mono_total_degree(key);
        if (deg == 0) {
            constant = c;
        } else if (deg == 1) {
            for (int v = 0; v < n; ++v)
                if (mono_exp(key, v) == 1) center[std::size_t(v)] = -0.5 * c / scale;
        } else if (deg == 2) {
            int var = -1;
            for (int v = 0; v < n; ++v)
                if (mono_exp(key, v) == 2) var = v;
            if (var < 0 || std::abs(c - scale) > 1e-12 * scale) return std::nullopt;
        } else {
            return std::nullopt;
        }
    }
    // every square must be present and the constant must close the square
    for (int v = 0; v < n; ++v) {
        MonoKey sq = mono_with_exp(0, v, 2);
        bool found = false;
        for (const auto& [key, c] : poly->terms())
            if (key == sq) found = true;
        if (!found) return std::nullopt;
    }
    double want = 0.0;
    for (double a : center) want += a * a;
    want *= scale;
    if (std::abs(constant - want) > 1e-10 * (1.0 + std::abs(want))) return std::nullopt;
    return DistanceWeight{std::move(center), scale};
}

void check_grid(std::span<const double> g) {
    if (g.size() < 2) throw InvalidArgument("grid needs at least 2 points");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g[i] > 0.0)) throw InvalidArgument("grid values must be positive");
        if (i > 0 && !(g[i] < g[i - 1]))
            throw InvalidArgument("grid must be strictly decreasing");
    }
}

struct PointEval {
    double mass = 0.0;
    double err = 0.0;
    bool exact = false;
};

PointEval eval_mass(const CurrentHandle& t, const TestProduct& psi, const Region& reg) {
    if (t.pair_exact) {
        auto e = t.pair_exact(psi, reg);
        if (e) {
            if (e->divergent) return {kInf, 0.0, true};
            return {e->value, 0.0, true};
        }
    }
    const MeasureEstimate est = t.pair(psi, reg);
    return {est.value, est.error, false};
}

double fit_loglog_slope(std::span<const double> r, std::span<const double> v) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!(v[i] > 0.0) || !std::isfinite(v[i])) continue;
        const double x = std::log(r[i]), y = std::log(v[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) return 0.0;
    const double den = m * sxx - sx * sx;
    if (std::abs(den) < 1e-30) return 0.0;
    return (m * sxy - sx * sy) / den;
}

LelongReport assemble_report(std::vector<double> grid, std::vector<double> masses,
                             std::vector<double> errs, std::vector<double> norms,
                             bool all_exact) {
    LelongReport rep;
    rep.r_grid = std::move(grid);
    rep.ball_mass = std::move(masses);
    rep.normalizer = std::move(norms);
    rep.exact = all_exact;
    const std::size_t k = rep.r_grid.size();
    rep.nu.resize(k);
    rep.nu_error.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        rep.nu[i] = rep.ball_mass[i] * rep.normalizer[i];
        rep.nu_error[i] = errs[i] * rep.normalizer[i];
    }
    rep.limit_estimate = rep.nu.back();
    rep.monotone_ok = true;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        // grid is decreasing, so nondecreasing in r means nu[i] >= nu[i+1]
        const double slack = 3.0 * (rep.nu_error[i] + rep.nu_error[i + 1]);
        if (rep.nu[i] < rep.nu[i + 1] - slack - 1e-12 * std::abs(rep.nu[i + 1]))
            rep.monotone_ok = false;
    }
    rep.loglog_slope = fit_loglog_slope(rep.r_grid, rep.nu);
    bool blowup = std::isfinite(rep.nu.front()) && std::isfinite(rep.nu.back())
                      ? rep.nu.back() > 1.2 * std::max(rep.nu.front(), 0.0) &&
                            rep.loglog_slope < -0.02
                      : true;
    rep.diverges = blowup;
    return rep;
}

double classical_norm(double r, int p) { return std::pow(r, -double(p)); }

} // namespace

Weight::Weight(ScalarField phi) : phi_(std::move(phi)) {
    if (!phi_.valid()) throw InvalidArgument("weight needs a valid field");
    if (auto d = detect_distance_center(phi_)) {
        center_ = std::move(d->center);
        scale_ = d->scale;
    }
}

Weight Weight::squared_distance_weight(int n, std::vector<double> center) {
    if (int(center.size()) != n) throw InvalidArgument("center size mismatch");
    Weight w(squared_distance(n, center));
    w.center_ = std::move(center);
    return w;
}

FieldForm Weight::omega() const { return dd_sharp(phi_); }

FieldForm Weight::alpha() const { return alpha_form(phi_); }

void Weight::set_box(std::vector<double> lo, std::vector<double> hi) {
    if (int(lo.size()) != n() || int(hi.size()) != n())
        throw InvalidArgument("box size mismatch");
    box_lo_ = std::move(lo);
    box_hi_ = std::move(hi);
}

Region Weight::sublevel(double r) const {
    if (!(r > 0.0)) throw InvalidArgument("sublevel needs r > 0");
    if (center_) return Region::ball(*center_, std::sqrt(r / scale_));
    if (box_lo_.empty())
        throw InvalidArgument("general weights need set_box before sublevel regions");
    return Region::sublevel(phi_, r, box_lo_, box_hi_);
}

void Weight::certify_sqrt_convex(const Region& sample_region, int samples,
                                 std::uint64_t seed) {
    const ConvexityVerdict v =
        m_convex(pow_field(phi_, 0.5), sample_region, n(), samples, seed);
    if (v.kind == VerdictKind::CertifiedFalse) {
        std::ostringstream msg;
        msg << "sqrt of the weight is not convex near (";
        for (std::size_t i = 0; i < v.witness_point.size(); ++i)
            msg << (i ? ", " : "") << v.witness_point[i];
        msg << ")";
        throw HypothesisError(msg.str());
    }
    sqrt_convex_ = true;
    certificate_samples_ = samples;
}

CurrentHandle smooth_handle(const SmoothCurrent& t, const QuadratureSpec& quad) {
    CurrentHandle h;
    h.n = t.n();
    h.bidim = t.n() - t.p();
    h.pair = [t, quad](const TestProduct& psi, const Region& reg) {
        return t.pair(psi, reg, quad);
    };
    h.pair_exact = [t](const TestProduct& psi, const Region& reg) {
        return t.pair_exact(psi, reg);
    };
    return h;
}

CurrentHandle submanifold_handle(const SubmanifoldCurrent& t) {
    CurrentHandle h;
    h.n = t.n();
    h.bidim = t.n() - t.codim();
    h.pair = [t](const TestProduct& psi, const Region& reg) { return t.pair(psi, reg); };
    return h;
}

CurrentHandle tropical_handle(const TropicalCurrent& t, int resolution) {
    CurrentHandle h;
    h.n = t.n();
    h.bidim = t.n() - 1;
    h.pair = [t, resolution](const TestProduct& psi, const Region& reg) {
        return t.pair(psi, reg, resolution);
    };
    return h;
}

LelongReport lelong_number(const CurrentHandle& t, const Weight& w,
                           std::span<const double> r_grid) {
    if (w.n() != t.n) throw InvalidArgument("weight dimension mismatch");
    check_grid(r_grid);
    const int p = t.bidim;
    if (p < 0 || p > t.n) throw InvalidArgument("bidimension out of range");

    TestProduct psi(t.n);
    const FieldForm om = w.omega();
    for (int i = 0; i < p; ++i) psi.times(om);

    std::vector<double> grid(r_grid.begin(), r_grid.end());
    std::vector<double> masses, errs, norms;
    bool all_exact = true;
    for (double r : grid) {
        const PointEval ev = eval_mass(t, psi, w.sublevel(r));
        masses.push_back(ev.mass);
        errs.push_back(ev.err);
        norms.push_back(1.0 / (std::pow(2.0, p) * std::pow(r, 0.5 * p)));
        all_exact = all_exact && ev.exact;
    }
    return assemble_report(std::move(grid), std::move(masses), std::move(errs),
                           std::move(norms), all_exact);
}

LelongReport classical_lelong_number(const CurrentHandle& t, const std::vector<double>& a,
                                     std::span<const double> r_grid) {
    if (int(a.size()) != t.n) throw InvalidArgument("center size mismatch");
    check_grid(r_grid);
    const int p = t.bidim;
    if (p < 0 || p > t.n) throw InvalidArgument("bidimension out of range");

    TestProduct psi(t.n);
    if (p > 0) psi.times(to_field_form(beta_power<double>(t.n, p)));

    std::vector<double> grid(r_grid.begin(), r_grid.end());
    std::vector<double> masses, errs, norms;
    bool all_exact = true;
    for (double r : grid) {
        const PointEval ev = eval_mass(t, psi, Region::ball(a, r));
        masses.push_back(ev.mass);
        errs.push_back(ev.err);
        norms.push_back(classical_norm(r, p));
        all_exact = all_exact && ev.exact;
    }
    return assemble_report(std::move(grid), std::move(masses), std::move(errs),
                           std::move(norms), all_exact);
}

LelongReport m_lelong_number(const CurrentHandle& t, const std::vector<double>& a, int m,
                             std::span<const double> r_grid) {
    if (int(a.size()) != t.n) throw InvalidArgument("center size mismatch");
    check_grid(r_grid);
    const int p = t.bidim;
    if (m < 1 || m > t.n) throw InvalidArgument("m out of range 1..n");
    if (m + p <= t.n) throw InvalidArgument("m-scaled masses need m + p > n");

    TestProduct psi(t.n);
    if (p > 0) psi.times(to_field_form(beta_power<double>(t.n, p)));
    const double expo = double(t.n) / double(m) * double(m - t.n + p);

    std::vector<double> grid(r_grid.begin(), r_grid.end());
    std::vector<double> masses, errs, norms;
    bool all_exact = true;
    for (double r : grid) {
        const PointEval ev = eval_mass(t, psi, Region::ball(a, r));
        masses.push_back(ev.mass);
        errs.push_back(ev.err);
        norms.push_back(std::pow(r, -expo));
        all_exact = all_exact && ev.exact;
    }
    return assemble_report(std::move(grid), std::move(masses), std::move(errs),
                           std::move(norms), all_exact);
}

std::vector<double> geometric_grid(double r_max, double ratio, int points) {
    if (!(r_max > 0.0)) throw InvalidArgument("r_max must be positive");
    if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("ratio must lie in (0,1)");
    if (points < 2) throw InvalidArgument("need at least 2 points");
    std::vector<double> g;
    double r = r_max;
    for (int i = 0; i < points; ++i, r *= ratio) g.push_back(r);
    return g;
}

JensenRecord jensen_terms(const SmoothCurrent& t, const Weight& w, double r1, double r2,
                          const QuadratureSpec& quad) {
    const int n = t.n();
    if (w.n() != n) throw InvalidArgument("weight dimension mismatch");
    if (!(r1 > 0.0) || !(r2 >= r1)) throw InvalidArgument("need r2 >= r1 > 0");
    const int p = n - t.p();
    if (p < 0 || t.p() != t.q()) throw InvalidArgument("current must have bidegree (q,q)");

    JensenRecord rec;
    rec.r1 = r1;
    rec.r2 = r2;

    const auto kfun = [p](double s) {
        return 1.0 / (std::pow(2.0, p) * std::pow(s, 0.5 * p));
    };

    TestProduct omp(n);
    const FieldForm om = w.omega();
    for (int i = 0; i < p; ++i) omp.times(om);
    const MeasureEstimate m1 = t.pair(omp, w.sublevel(r1), quad);
    const MeasureEstimate m2 =
        r2 > r1 ? t.pair(omp, w.sublevel(r2), quad) : m1;
    rec.nu_r1 = kfun(r1) * m1.value;
    rec.nu_r2 = kfun(r2) * m2.value;
    double err = kfun(r1) * m1.error + kfun(r2) * m2.error;

    const ScalarField& phi = w.phi();

    // shell term: alpha^p density over { r1 < phi < r2 }
    if (r2 > r1) {
        FieldForm full = t.form();
        const FieldForm al = w.alpha();
        for (int i = 0; i < p; ++i) full = wedge(full, al);
        const ScalarField dens = density_field(full);
        const MeasureEstimate sh = integrate(
            w.sublevel(r2),
            [&](std::span<const double> x) {
                if (phi.eval(x) <= r1) return 0.0;
                return dens.eval(x);
            },
            quad);
        rec.shell = sh.value;
        err += sh.error;
    }

    const FieldForm ddt = dd_sharp(t.form());
    if (ddt.is_zero()) {
        rec.closed = true;
    } else if (r2 > r1) {
        FieldForm mu = ddt;
        for (int i = 0; i < p - 1; ++i) mu = wedge(mu, om);
        const ScalarField dens_mu = density_field(mu);

        const MeasureEstimate lin = integrate(
            w.sublevel(r1),
            [&](std::span<const double> x) {
                return (r1 - phi.eval(x)) * dens_mu.eval(x);
            },
            quad);
        rec.dd_linear = (kfun(r1) - kfun(r2)) * lin.value;
        err += std::abs(kfun(r1) - kfun(r2)) * lin.error;

        // h(s) = int_s^{r2} (k(t) - k(r2)) dt, evaluated at max(r1, phi(x))
        const auto hfun = [&](double s) {
            if (p == 0) return 0.0;
            if (p == 2) return 0.25 * (std::log(r2 / s) - (r2 - s) / r2);
            const double c = 1.0 / std::pow(2.0, p);
            const double e = 1.0 - 0.5 * p;
            return c * ((std::pow(r2, e) - std::pow(s, e)) / e -
                        (r2 - s) * std::pow(r2, -0.5 * p));
        };
        const MeasureEstimate tail = integrate(
            w.sublevel(r2),
            [&](std::span<const double> x) {
                return hfun(std::max(r1, phi.eval(x))) * dens_mu.eval(x);
            },
            quad);
        rec.dd_tail = tail.value;
        err += tail.error;
    }

    const double lhs = rec.nu_r2 - rec.nu_r1;
    const double rhs = rec.shell + rec.dd_linear + rec.dd_tail;
    rec.residual = std::abs(lhs - rhs);
    const double scale = std::max({std::abs(rec.nu_r1), std::abs(rec.nu_r2),
                                   std::abs(rec.shell) + std::abs(rec.dd_linear) +
                                       std::abs(rec.dd_tail),
                                   1e-30});
    rec.relative_residual = rec.residual / scale;
    rec.quadrature_error = err;
    return rec;
}

ConcaveBoundRecord concave_lower_bound(const SmoothCurrent& t, const std::vector<double>& a,
                                       double r0, std::span<const double> r_grid,
                                       const QuadratureSpec& quad) {
    const int n = t.n();
    if (int(a.size()) != n) throw InvalidArgument("center size mismatch");
    check_grid(r_grid);
    if (!(r0 > 0.0) || r_grid.front() > r0 * (1.0 + 1e-12))
        throw InvalidArgument("grid must stay within (0, r0]");
    const int p = n - t.p();
    if (p < 1) throw InvalidArgument("needs bidimension at least (1,1)");

    const CurrentHandle th = smooth_handle(t, quad);
    const CurrentHandle dd = smooth_handle(SmoothCurrent(dd_sharp(t.form())), quad);

    // classical-normalization masses
    TestProduct bp(n);
    bp.times(to_field_form(beta_power<double>(n, p)));
    TestProduct bp1(n);
    if (p - 1 > 0) bp1.times(to_field_form(beta_power<double>(n, p - 1)));

    ConcaveBoundRecord rec;
    rec.r0 = r0;
    const PointEval dd0 = eval_mass(dd, bp1, Region::ball(a, r0));
    rec.nu_dd_r0 = dd0.mass * classical_norm(r0, p - 1);
    const PointEval t0 = eval_mass(th, bp, Region::ball(a, r0));
    const double upsilon_r0 = t0.mass * classical_norm(r0, p) - r0 * rec.nu_dd_r0;
    rec.c0 = std::min(0.0, upsilon_r0);

    double worst_err = t0.err * classical_norm(r0, p) + r0 * dd0.err * classical_norm(r0, p - 1);
    rec.r_grid.assign(r_grid.begin(), r_grid.end());
    for (double r : rec.r_grid) {
        const PointEval ev = eval_mass(th, bp, Region::ball(a, r));
        const double lhs = ev.mass * classical_norm(r, p);
        const double rhs = r * rec.nu_dd_r0 + rec.c0;
        rec.lhs.push_back(lhs);
        rec.rhs.push_back(rhs);
        rec.margin.push_back(lhs - rhs);
        worst_err = std::max(worst_err, ev.err * classical_norm(r, p));
    }
    rec.tolerance = 3.0 * worst_err;
    rec.holds = true;
    for (double mg : rec.margin)
        if (mg < -rec.tolerance - 1e-12) rec.holds = false;
    return rec;
}

IntegrabilityDiagnostic t5_integrability_diagnostic(const SmoothCurrent& t, const Weight& w,
                                                    std::span<const double> r_grid,
                                                    const QuadratureSpec& quad) {
    const int n = t.n();
    if (w.n() != n) throw InvalidArgument("weight dimension mismatch");
    if (r_grid.size() < 4) throw InvalidArgument("diagnostic needs at least 4 grid points");
    check_grid(r_grid);
    const int p = n - t.p();
    if (p < 1) throw InvalidArgument("needs bidimension at least (1,1)");

    IntegrabilityDiagnostic diag;
    diag.r_grid.assign(r_grid.begin(), r_grid.end());

    const FieldForm om = w.omega();
    const FieldForm ddt = dd_sharp(t.form());
    const bool closed = ddt.is_zero();

    ScalarField dens_mu = ScalarField::zero(n);
    if (!closed) {
        FieldForm mu = ddt;
        for (int i = 0; i < p - 1; ++i) mu = wedge(mu, om);
        dens_mu = density_field(mu);
    }
    const ScalarField& phi = w.phi();

    // nu_{dd#T}(phi, r), bidimension p-1
    for (double r : diag.r_grid) {
        if (closed) {
            diag.nu_dd.push_back(0.0);
            continue;
        }
        const MeasureEstimate m = integrate(
            w.sublevel(r), [&](std::span<const double> x) { return dens_mu.eval(x); }, quad);
        diag.nu_dd.push_back(m.value /
                             (std::pow(2.0, p - 1) * std::pow(r, 0.5 * (p - 1))));
    }

    // trapezoid pieces of the integrand nu_dd(t) / (2 sqrt t) along the grid
    double scale = 0.0;
    for (double v : diag.nu_dd) scale = std::max(scale, std::abs(v));
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < diag.r_grid.size(); ++i) {
        const double ra = diag.r_grid[i], rb = diag.r_grid[i + 1];
        const double fa = diag.nu_dd[i] / (2.0 * std::sqrt(ra));
        const double fb = diag.nu_dd[i + 1] / (2.0 * std::sqrt(rb));
        diag.pieces.push_back(0.5 * (fa + fb) * (ra - rb));
        mids.push_back(std::sqrt(ra * rb));
    }
    for (double piece : diag.pieces) diag.integral_estimate += piece;

    if (scale < 1e-12) {
        diag.integrable = true;
        diag.piece_slope = 0.0;
    } else {
        std::vector<double> abs_pieces;
        for (double piece : diag.pieces) abs_pieces.push_back(std::abs(piece));
        diag.piece_slope = fit_loglog_slope(mids, abs_pieces);
        diag.integrable = diag.piece_slope > 0.05;
    }

    // Lambda(r) = nu(r) + int_{phi<r} [ (r - phi) k(r) - (K(r) - K(phi)) ] dmu,
    // K the antiderivative of k
    const auto kfun = [p](double s) {
        return 1.0 / (std::pow(2.0, p) * std::pow(s, 0.5 * p));
    };
    const auto K = [p](double s) {
        if (p == 2) return 0.25 * std::log(s);
        const double e = 1.0 - 0.5 * p;
        return std::pow(s, e) / (std::pow(2.0, p) * e);
    };

    TestProduct omp(n);
    for (int i = 0; i < p; ++i) omp.times(om);
    for (double r : diag.r_grid) {
        const MeasureEstimate base = t.pair(omp, w.sublevel(r), quad);
        double lam = kfun(r) * base.value;
        if (!closed) {
            const MeasureEstimate corr = integrate(
                w.sublevel(r),
                [&](std::span<const double> x) {
                    const double f = phi.eval(x);
                    return ((r - f) * kfun(r) - (K(r) - K(f))) * dens_mu.eval(x);
                },
                quad);
            lam += corr.value;
        }
        diag.lambda.push_back(lam);
    }
    diag.lambda_monotone = true;
    for (std::size_t i = 0; i + 1 < diag.lambda.size(); ++i) {
        const double tol = 1e-6 * (1.0 + std::abs(diag.lambda[i]));
        if (diag.lambda[i] < diag.lambda[i + 1] - tol) diag.lambda_monotone = false;
    }
    return diag;
}

SemicontinuityRecord semicontinuity_check(std::span<const CurrentHandle> members,
                                          const CurrentHandle& limit, const Weight& w,
                                          double r_min) {
    if (members.empty()) throw InvalidArgument("empty current family");
    if (!(r_min > 0.0)) throw InvalidArgument("r_min must be positive");

    TestProduct psi(limit.n);
    const FieldForm om = w.omega();
    for (int i = 0; i < limit.bidim; ++i) psi.times(om);
    const Region reg = w.sublevel(r_min);
    const double norm = 1.0 / (std::pow(2.0, limit.bidim) * std::pow(r_min, 0.5 * limit.bidim));

    SemicontinuityRecord rec;
    const PointEval lv = eval_mass(limit, psi, reg);
    rec.nu_limit = lv.mass * norm;
    double err = lv.err * norm;
    for (const CurrentHandle& m : members) {
        if (m.n != limit.n || m.bidim != limit.bidim)
            throw InvalidArgument("family members must share the limit's bidimension");
        const PointEval ev = eval_mass(m, psi, reg);
        rec.nu_members.push_back(ev.mass * norm);
        err = std::max(err, ev.err * norm);
    }
    rec.tolerance = 3.0 * err;
    const double worst = *std::max_element(rec.nu_members.begin(), rec.nu_members.end());
    rec.margin = rec.nu_limit + rec.tolerance - worst;
    rec.holds = rec.margin >= -1e-12;
    return rec;
}

BoundaryFunctionalReport boundary_functional(const SmoothCurrent& t, const Weight& w,
                                             std::span<const double> r_grid, int resolution) {
    const int n = t.n();
    if (w.n() != n) throw InvalidArgument("weight dimension mismatch");
    check_grid(r_grid);
    if (!w.distance_center())
        throw InvalidArgument("boundary functional needs a squared-distance weight");
    const int p = n - t.p();
    if (p < 1) throw InvalidArgument("needs bidimension at least (1,1)");

    FieldForm flux_form = wedge(t.form(), dsharp(scalar_form(w.phi())));
    const FieldForm om = w.omega();
    for (int i = 0; i < p - 1; ++i) flux_form = wedge(flux_form, om);
    if (flux_form.p() != n - 1 || flux_form.q() != n)
        throw InvalidArgument("flux form must have bidegree (n-1, n)");

    BoundaryFunctionalReport rep;
    rep.r_grid.assign(r_grid.begin(), r_grid.end());
    for (double r : rep.r_grid) {
        const auto pts = sphere_quadrature(*w.distance_center(), std::sqrt(r), resolution);
        const double v =
            flux_integral(flux_form, pts) / (std::pow(2.0, p) * std::pow(r, 0.5 * p));
        rep.values.push_back(v);
    }
    rep.monotone_ok = true;
    for (std::size_t i = 0; i + 1 < rep.values.size(); ++i) {
        const double tol = 1e-6 * (1.0 + std::abs(rep.values[i]));
        if (rep.values[i] < rep.values[i + 1] - tol) rep.monotone_ok = false;
    }
    return rep;
}

void spot_check_weak_positivity(const SmoothCurrent& t, const Region& region, int samples,
                                std::uint64_t seed, double tol) {
    const int n = t.n();
    if (region.dim() != n) throw InvalidArgument("region dimension mismatch");
    SplitMix64 rng(seed);
    std::vector<double> x;
    int done = 0;
    std::int64_t attempts = 0;
    while (done < samples) {
        if (++attempts > 64ll * samples + 64)
            throw NonConvergenceError("sampling region is too thin");
        if (!region.sample(rng, x)) continue;
        NumForm v(n, 0, 0);
        try {
            v = evaluate(t.form(), x);
        } catch (const SingularPointError&) {
            continue;
        }
        const PositivityVerdict verdict =
            weakly_positive(v, tol, 400, substream_seed(seed, std::uint64_t(done)));
        if (verdict.kind == VerdictKind::CertifiedFalse) {
            std::ostringstream msg;
            msg << "current fails weak positivity at (";
            for (int i = 0; i < n; ++i) msg << (i ? ", " : "") << x[std::size_t(i)];
            msg << "): " << verdict.witness;
            throw HypothesisError(msg.str());
        }
        ++done;
    }
}

void spot_check_wedge_convexity(const SmoothCurrent& t, const Weight& w, const Region& region,
                                int samples, std::uint64_t seed, double tol) {
    const int n = t.n();
    if (region.dim() != n || w.n() != n) throw InvalidArgument("dimension mismatch");
    const int p = n - t.p();
    if (p < 1) throw InvalidArgument("needs bidimension at least (1,1)");

    FieldForm s = t.form();
    const FieldForm om = w.omega();
    for (int i = 0; i < p - 1; ++i) s = wedge(s, om);
    const ScalarField dens = density_field(dd_sharp(s));

    SplitMix64 rng(seed);
    std::vector<double> x;
    int done = 0;
    std::int64_t attempts = 0;
    double scale = 1.0;
    while (done < samples) {
        if (++attempts > 64ll * samples + 64)
            throw NonConvergenceError("sampling region is too thin");
        if (!region.sample(rng, x)) continue;
        double v = 0.0;
        try {
            v = dens.eval(x);
        } catch (const SingularPointError&) {
            continue;
        }
        scale = std::max(scale, std::abs(v));
        if (v < -tol * scale) {
            std::ostringstream msg;
            msg << "dd# of the wedge pairs negatively (" << v << ") at (";
            for (int i = 0; i < n; ++i) msg << (i ? ", " : "") << x[std::size_t(i)];
            msg << ")";
            throw HypothesisError(msg.str());
        }
        ++done;
    }
}

} // namespace supercal
