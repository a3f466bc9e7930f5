#include "supercal/degree.hpp"

#include "supercal/errors.hpp"
#include "supercal/positivity.hpp"
#include "supercal/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace supercal {

namespace {

constexpr double kExcision = 1e-6;

std::string fmt_point(std::span<const double> x) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

void check_radius_grid(std::span<const double> grid) {
    if (grid.empty()) throw InvalidArgument("radius grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw InvalidArgument("radius grid must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw InvalidArgument("radius grid must be strictly increasing");
    }
}

struct PointEval {
    double value = 0.0;
    double error = 0.0;
    bool exact = false;
};

PointEval eval_pair(const CurrentHandle& t, const TestProduct& psi, const Region& region) {
    if (t.pair_exact) {
        if (auto ex = t.pair_exact(psi, region)) {
            if (ex->divergent)
                return {std::numeric_limits<double>::infinity(), 0.0, true};
            return {ex->value, 0.0, true};
        }
    }
    MeasureEstimate est = t.pair(psi, region);
    return {est.value, est.error, false};
}

double fit_loglog_slope(std::span<const double> r, std::span<const double> v) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!(v[i] > 0.0) || !std::isfinite(v[i])) continue;
        double lx = std::log(r[i]), ly = std::log(v[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    if (m < 2) return 0.0;
    double den = m * sxx - sx * sx;
    if (std::abs(den) < 1e-14) return 0.0;
    return (m * sxy - sx * sy) / den;
}

DegreeReport assemble_degree(std::span<const double> grid, const std::vector<PointEval>& evals) {
    DegreeReport rep;
    rep.r_grid.assign(grid.begin(), grid.end());
    rep.exact = true;
    for (const auto& e : evals) {
        rep.partial.push_back(e.value);
        rep.stderr_vals.push_back(e.error);
        rep.exact = rep.exact && e.exact;
    }
    rep.limit_estimate = rep.partial.back();
    rep.nondecreasing = true;
    for (std::size_t i = 0; i + 1 < rep.partial.size(); ++i) {
        double slack = 3.0 * (rep.stderr_vals[i] + rep.stderr_vals[i + 1]) +
                       1e-12 * std::abs(rep.partial[i]);
        if (!std::isfinite(rep.partial[i]) || !(rep.partial[i + 1] >= rep.partial[i] - slack))
            rep.nondecreasing = false;
    }
    if (rep.partial.size() >= 2) {
        double last = rep.partial.back();
        double prev = rep.partial[rep.partial.size() - 2];
        if (std::isfinite(last) && std::isfinite(prev)) {
            double scale = std::max({std::abs(last), std::abs(prev), 1e-30});
            double tol = std::max(3.0 * (rep.stderr_vals.back() +
                                         rep.stderr_vals[rep.stderr_vals.size() - 2]),
                                  1e-3 * scale);
            rep.converged = std::abs(last - prev) <= tol;
        }
    }
    return rep;
}

TestProduct cone_powers(int n, int count) {
    TestProduct psi(n);
    if (count > 0) {
        std::vector<double> zeros(n, 0.0);
        FieldForm cone = alpha_form(squared_distance(n, zeros));
        for (int i = 0; i < count; ++i) psi.times(cone);
    }
    return psi;
}

} // namespace

LelongClassFunction::LelongClassFunction(ScalarField f, double slope, double offset)
    : f_(std::move(f)), slope_(slope), offset_(offset) {
    if (!f_.valid()) throw InvalidArgument("growth-class function is empty");
    if (!(slope_ >= 0.0)) throw InvalidArgument("growth slope must be nonnegative");
}

void LelongClassFunction::certify(double r_max, int samples, std::uint64_t seed) {
    if (!(r_max > 0.0)) throw InvalidArgument("certification radius must be positive");
    const int dim = f_.n_vars();
    std::vector<double> zeros(dim, 0.0);
    ConvexityVerdict cv = m_convex(f_, Region::ball(zeros, r_max), dim, samples, seed);
    if (cv.kind == VerdictKind::CertifiedFalse)
        throw HypothesisError("growth-class function is not convex near " +
                              fmt_point(cv.witness_point));
    const int shells = 8;
    for (int k = 1; k <= shells; ++k) {
        double r = r_max * double(k) / shells;
        std::vector<SpherePoint> pts;
        if (dim == 1) {
            pts.push_back({{-r}, {-1.0}, 1.0});
            pts.push_back({{r}, {1.0}, 1.0});
        } else {
            pts = sphere_quadrature(zeros, r, std::max(8, samples / shells),
                                    substream_seed(seed, 100 + std::uint64_t(k)));
        }
        for (const auto& pt : pts) {
            double fv = f_(pt.x);
            double bound = slope_ * r + offset_;
            if (fv > bound + 1e-9 * (1.0 + std::abs(bound)))
                throw HypothesisError("growth bound fails at " + fmt_point(pt.x));
        }
    }
    certified_ = true;
    certified_radius_ = r_max;
}

DegreeReport degree(const CurrentHandle& t, std::span<const double> r_grid) {
    check_radius_grid(r_grid);
    if (t.bidim < 0 || t.bidim > t.n)
        throw InvalidArgument("bidimension out of range for the cone power");
    if (r_grid.front() <= kExcision)
        throw InvalidArgument("degree radii must exceed the excision radius");
    TestProduct psi = cone_powers(t.n, t.bidim);
    std::vector<double> zeros(t.n, 0.0);
    std::vector<PointEval> evals;
    for (double R : r_grid) evals.push_back(eval_pair(t, psi, Region::shell(zeros, kExcision, R)));
    return assemble_degree(r_grid, evals);
}

DegreeReport degree_cutoff(const CurrentHandle& t, std::span<const double> r_grid) {
    check_radius_grid(r_grid);
    if (t.bidim < 1) throw InvalidArgument("cutoff degree needs bidimension at least 1");
    if (t.bidim > t.n) throw InvalidArgument("bidimension out of range for the cone power");
    std::vector<double> zeros(t.n, 0.0);
    ScalarField sq = squared_distance(t.n, zeros);
    ScalarField dist = pow_field(sq, 0.5);
    FieldForm cone = alpha_form(sq);
    std::vector<PointEval> evals;
    for (double R : r_grid) {
        ScalarField bump = ScalarField::constant(t.n, 1.0) - (1.0 / (R * R)) * sq;
        TestProduct psi(t.n);
        psi.times(dd_sharp(bump * bump));
        for (int i = 1; i < t.bidim; ++i) psi.times(cone);
        psi.weighted(dist);
        // the cone factors reappear for bidim >= 2, so keep their excision there
        Region reg = t.bidim > 1 ? Region::shell(zeros, kExcision, R) : Region::ball(zeros, R);
        evals.push_back(eval_pair(t, psi, reg));
    }
    return assemble_degree(r_grid, evals);
}

DegreeReport weighted_degree(const CurrentHandle& t, const ScalarField& weight,
                             std::span<const double> r_grid) {
    check_radius_grid(r_grid);
    if (!weight.valid() || weight.n_vars() != t.n)
        throw InvalidArgument("weight dimension does not match the current");
    if (t.bidim < 0 || t.bidim > t.n)
        throw InvalidArgument("bidimension out of range for the weight power");
    std::vector<double> zeros(t.n, 0.0);
    ConvexityVerdict cv = m_convex(weight, Region::ball(zeros, r_grid.back()), t.n, 200, 13);
    if (cv.kind == VerdictKind::CertifiedFalse)
        throw HypothesisError("degree weight is not convex near " + fmt_point(cv.witness_point));
    TestProduct psi(t.n);
    if (t.bidim > 0) {
        FieldForm h = dd_sharp(weight);
        for (int i = 0; i < t.bidim; ++i) psi.times(h);
    }
    std::vector<PointEval> evals;
    for (double R : r_grid) {
        if (R <= kExcision) throw InvalidArgument("degree radii must exceed the excision radius");
        evals.push_back(eval_pair(t, psi, Region::shell(zeros, kExcision, R)));
    }
    return assemble_degree(r_grid, evals);
}

SigmaGrowthReport sigma_growth(const LelongClassFunction& u, const ScalarField& weight,
                               std::span<const double> radii, int samples_per_sphere,
                               std::uint64_t seed,
                               const std::function<bool(std::span<const double>)>& on_support) {
    check_radius_grid(radii);
    const int dim = u.n();
    if (!weight.valid() || weight.n_vars() != dim)
        throw InvalidArgument("growth weight dimension mismatch");
    if (samples_per_sphere < 2) throw InvalidArgument("need at least two samples per sphere");
    std::vector<double> zeros(dim, 0.0);
    SigmaGrowthReport rep;
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        double r = radii[i];
        std::vector<SpherePoint> pts;
        if (dim == 1) {
            pts.push_back({{-r}, {-1.0}, 1.0});
            pts.push_back({{r}, {1.0}, 1.0});
        } else {
            pts = sphere_quadrature(zeros, r, samples_per_sphere, substream_seed(seed, i));
        }
        for (const auto& pt : pts) {
            if (on_support && !on_support(pt.x)) continue;
            double wv = weight(pt.x);
            if (std::abs(wv) <= 1e-12 * (1.0 + r))
                throw InvalidArgument("growth weight vanishes at " + fmt_point(pt.x));
            best = std::max(best, u.field()(pt.x) / wv);
            any = true;
        }
        rep.radii.push_back(r);
        rep.running_max.push_back(best);
    }
    if (!any) throw InvalidArgument("no growth samples hit the declared support");
    rep.value = best;
    return rep;
}

ComparisonLocalReport verify_comparison_local(const CurrentHandle& t, const Weight& phi,
                                              const Weight& psi, double ratio,
                                              std::span<const double> r_grid) {
    if (!(ratio > 0.0)) throw InvalidArgument("comparison ratio must be positive");
    LelongReport a = lelong_number(t, phi, r_grid);
    LelongReport b = lelong_number(t, psi, r_grid);
    ComparisonLocalReport rep;
    rep.ratio = ratio;
    rep.bidim = t.bidim;
    rep.nu_phi = a.limit_estimate;
    rep.nu_psi = b.limit_estimate;
    double stated_factor = std::pow(ratio, double(t.bidim));
    double sqrt_factor = std::pow(ratio, 0.5 * double(t.bidim));
    rep.bound_stated = stated_factor * rep.nu_phi;
    rep.bound_sqrt = sqrt_factor * rep.nu_phi;
    double factor = std::max(stated_factor, sqrt_factor);
    double scale = std::max({std::abs(rep.nu_psi), std::abs(rep.bound_stated),
                             std::abs(rep.bound_sqrt), 1e-30});
    rep.tolerance = 3.0 * (b.nu_error.back() + factor * a.nu_error.back()) + 1e-9 * scale;
    rep.stated_holds = rep.nu_psi <= rep.bound_stated + rep.tolerance;
    rep.sqrt_holds = rep.nu_psi <= rep.bound_sqrt + rep.tolerance;
    return rep;
}

ComparisonInfinityReport verify_comparison_infinity(const CurrentHandle& t,
                                                    std::span<const LelongClassFunction> u_list,
                                                    std::span<const LelongClassFunction> v_list,
                                                    std::span<const double> l_list, double R,
                                                    double mollify_eps) {
    const int p = t.bidim;
    if (p < 1) throw InvalidArgument("comparison needs bidimension at least 1");
    if (int(u_list.size()) != p || int(v_list.size()) != p || int(l_list.size()) != p)
        throw InvalidArgument("comparison needs one test function and ratio per factor");
    if (!(R > 0.0)) throw InvalidArgument("comparison radius must be positive");
    if (!(mollify_eps > 0.0)) throw InvalidArgument("mollification width must be positive");
    for (const auto& f : u_list)
        if (f.n() != t.n) throw InvalidArgument("test function dimension mismatch");
    for (const auto& f : v_list)
        if (f.n() != t.n) throw InvalidArgument("test function dimension mismatch");

    std::vector<double> zeros(t.n, 0.0);
    Region reg = Region::ball(zeros, R);

    auto build = [&](std::span<const LelongClassFunction> fs, double eps, bool* smoothed) {
        TestProduct prod(t.n);
        for (const auto& f : fs) {
            ScalarField g = f.field();
            if (g.as_poly()) {
                prod.times(dd_sharp(g));
            } else {
                prod.times(dd_sharp(g.mollified(eps)));
                *smoothed = true;
            }
        }
        return prod;
    };
    auto run = [&](std::span<const LelongClassFunction> fs) {
        bool smoothed = false;
        TestProduct fine = build(fs, 0.5 * mollify_eps, &smoothed);
        MeasureEstimate ef = t.pair(fine, reg);
        double err = ef.error;
        if (smoothed) {
            bool ignore = false;
            MeasureEstimate ec = t.pair(build(fs, mollify_eps, &ignore), reg);
            err += std::abs(ef.value - ec.value);
        }
        return std::pair<double, double>(ef.value, err);
    };

    auto [lv, le] = run(u_list);
    auto [rv, re] = run(v_list);
    ComparisonInfinityReport rep;
    rep.lhs = lv;
    rep.lhs_error = le;
    rep.rhs_base = rv;
    rep.rhs_error = re;
    rep.ratio_product = 1.0;
    for (double l : l_list) rep.ratio_product *= l;
    rep.rhs = rep.ratio_product * rv;
    double scale = std::max({std::abs(rep.lhs), std::abs(rep.rhs), 1e-30});
    rep.tolerance = 3.0 * (le + std::abs(rep.ratio_product) * re) + 1e-9 * scale;
    rep.holds = rep.lhs <= rep.rhs + rep.tolerance;
    return rep;
}

GrowthLinkReport growth_link_check(const SmoothCurrent& t, std::span<const double> r_grid,
                                   const QuadratureSpec& quad) {
    check_radius_grid(r_grid);
    if (t.p() != t.q()) throw InvalidArgument("growth link needs a symmetric bidegree");
    const int dim = t.n();
    const int p = dim - t.q();
    if (p < 1) throw InvalidArgument("growth link needs bidimension at least 1");
    CurrentHandle th = smooth_handle(t, quad);
    CurrentHandle dh = smooth_handle(t.ddsharp(), quad);
    TestProduct psi_p(dim);
    psi_p.times(to_field_form(beta_power<double>(dim, p)));
    TestProduct psi_p1(dim);
    if (p > 1) psi_p1.times(to_field_form(beta_power<double>(dim, p - 1)));
    std::vector<double> zeros(dim, 0.0);

    GrowthLinkReport rep;
    rep.r_grid.assign(r_grid.begin(), r_grid.end());
    rep.bounded = true;
    double worst_err = 0.0;
    for (double r : r_grid) {
        PointEval a = eval_pair(dh, psi_p1, Region::ball(zeros, r));
        PointEval b = eval_pair(th, psi_p, Region::ball(zeros, 2.0 * r));
        double lhs = std::pow(r, 2.0 - double(p)) * a.value;
        double rhs = std::pow(2.0 * r, -double(p)) * b.value;
        double ea = std::pow(r, 2.0 - double(p)) * a.error;
        double eb = std::pow(2.0 * r, -double(p)) * b.error;
        worst_err = std::max(worst_err, ea + eb);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        if (lhs < -3.0 * ea - 1e-12) {
            if (rhs > 3.0 * eb)
                rep.c = std::max(rep.c, -lhs / rhs);
            else
                rep.bounded = false;
        }
    }
    rep.tolerance = 3.0 * worst_err;
    return rep;
}

StripReport strip_experiment(const CurrentHandle& t, int k, double delta,
                             std::span<const double> r_grid,
                             const std::function<double(std::span<const double>)>& density_probe,
                             int support_samples, std::uint64_t seed) {
    check_radius_grid(r_grid);
    const int dim = t.n;
    const int p = t.bidim;
    if (k < 1 || k > dim) throw InvalidArgument("strip free-coordinate count out of range");
    if (p < k) throw InvalidArgument("strip experiment needs bidimension at least the free count");
    if (!(delta > 0.0)) throw InvalidArgument("strip exponent must be positive");

    TestProduct psi(dim);
    if (p >= 1) psi.times(to_field_form(beta_power<double>(dim, p)));
    std::vector<double> zeros(dim, 0.0);

    StripReport rep;
    rep.r_grid.assign(r_grid.begin(), r_grid.end());
    for (double r : r_grid) {
        PointEval e = eval_pair(t, psi, Region::ball(zeros, r));
        rep.nu.push_back(e.value / std::pow(r, double(p)));
        rep.nu_error.push_back(e.error / std::pow(r, double(p)));
    }
    rep.loglog_slope = fit_loglog_slope(
        std::span<const double>(rep.r_grid).subspan(rep.r_grid.size() / 2),
        std::span<const double>(rep.nu).subspan(rep.nu.size() / 2));
    if (rep.nu.size() >= 3) {
        double last = rep.nu.back();
        double scale = std::max(std::abs(last), 1e-12);
        rep.bounded = true;
        for (std::size_t i = rep.nu.size() - 3; i < rep.nu.size(); ++i) {
            double tol = 0.05 * scale + 3.0 * (rep.nu_error[i] + rep.nu_error.back());
            if (!(std::abs(rep.nu[i] - last) <= tol)) rep.bounded = false;
        }
    }
    if (density_probe) {
        rep.support_checked = true;
        SplitMix64 rng(substream_seed(seed, 0));
        double r_max = r_grid.back();
        std::vector<double> x(dim);
        int found = 0;
        for (int s = 0; s < 64 * support_samples && found < support_samples; ++s) {
            for (int j = 0; j < dim; ++j) x[j] = rng.next_in(-r_max, r_max);
            double band = 0.0;
            for (int j = k; j < dim; ++j) band += std::pow(std::abs(x[j]), delta);
            if (band <= 1.05) continue; // inside (or hugging) the strip
            ++found;
            rep.support_leak = std::max(rep.support_leak, std::abs(density_probe(x)));
        }
        rep.support_ok = rep.support_leak <= 1e-9;
    }
    return rep;
}

std::function<double(std::span<const double>)> density_probe(const SmoothCurrent& t) {
    FieldForm f = t.form();
    return [f](std::span<const double> x) {
        double s = 0.0;
        for (const auto& [key, c] : f.terms()) {
            double v = c(x);
            s += v * v;
        }
        return std::sqrt(s);
    };
}

DegreeSemicontinuityRecord degree_semicontinuity_check(std::span<const CurrentHandle> members,
                                                       const CurrentHandle& limit, double R) {
    if (members.empty()) throw InvalidArgument("semicontinuity needs at least one member");
    if (!(R > kExcision)) throw InvalidArgument("semicontinuity radius must exceed the excision");
    for (const auto& m : members)
        if (m.n != limit.n || m.bidim != limit.bidim)
            throw InvalidArgument("family members must share dimension and bidimension");
    TestProduct psi = cone_powers(limit.n, limit.bidim);
    std::vector<double> zeros(limit.n, 0.0);
    Region reg = Region::shell(zeros, kExcision, R);

    DegreeSemicontinuityRecord rec;
    double min_member = std::numeric_limits<double>::infinity();
    double worst_err = 0.0;
    for (const auto& m : members) {
        PointEval e = eval_pair(m, psi, reg);
        rec.member_degrees.push_back(e.value);
        min_member = std::min(min_member, e.value);
        worst_err = std::max(worst_err, e.error);
    }
    PointEval lim = eval_pair(limit, psi, reg);
    rec.limit_degree = lim.value;
    double scale = std::max({std::abs(rec.limit_degree), std::abs(min_member), 1e-30});
    rec.tolerance = 3.0 * (worst_err + lim.error) + 1e-9 * scale;
    rec.margin = min_member + rec.tolerance - rec.limit_degree;
    rec.holds = rec.margin >= 0.0;
    return rec;
}

DegreeSemicontinuityRecord degree_semicontinuity_check(const CurrentHandle& t,
                                                       std::span<const ScalarField> weights,
                                                       const ScalarField& limit_weight,
                                                       double R) {
    if (weights.empty()) throw InvalidArgument("semicontinuity needs at least one weight");
    if (!(R > kExcision)) throw InvalidArgument("semicontinuity radius must exceed the excision");
    if (!limit_weight.valid() || limit_weight.n_vars() != t.n)
        throw InvalidArgument("limit weight dimension mismatch");
    std::vector<double> zeros(t.n, 0.0);
    Region reg = Region::shell(zeros, kExcision, R);
    auto weight_power = [&](const ScalarField& w) {
        TestProduct psi(t.n);
        if (t.bidim > 0) {
            FieldForm h = dd_sharp(w);
            for (int i = 0; i < t.bidim; ++i) psi.times(h);
        }
        return psi;
    };

    DegreeSemicontinuityRecord rec;
    double min_member = std::numeric_limits<double>::infinity();
    double worst_err = 0.0;
    for (const auto& w : weights) {
        if (!w.valid() || w.n_vars() != t.n)
            throw InvalidArgument("family weight dimension mismatch");
        PointEval e = eval_pair(t, weight_power(w), reg);
        rec.member_degrees.push_back(e.value);
        min_member = std::min(min_member, e.value);
        worst_err = std::max(worst_err, e.error);
    }
    PointEval lim = eval_pair(t, weight_power(limit_weight), reg);
    rec.limit_degree = lim.value;
    double scale = std::max({std::abs(rec.limit_degree), std::abs(min_member), 1e-30});
    rec.tolerance = 3.0 * (worst_err + lim.error) + 1e-9 * scale;
    rec.margin = min_member + rec.tolerance - rec.limit_degree;
    rec.holds = rec.margin >= 0.0;
    return rec;
}

} // namespace supercal
