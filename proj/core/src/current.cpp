#include "supercal/current.hpp"

#include "supercal/positivity.hpp"

#include <cmath>

namespace supercal {

TestProduct& TestProduct::times(FieldForm f) {
    if (f.n() != n_) throw InvalidArgument("test product: factor dimension mismatch");
    factors_.push_back(std::move(f));
    return *this;
}

TestProduct& TestProduct::weighted(const ScalarField& w) {
    if (w.n_vars() != n_) throw InvalidArgument("test product: weight dimension mismatch");
    weight_ = weight_.valid() ? weight_ * w : w;
    return *this;
}

int TestProduct::total_p() const {
    int p = 0;
    for (const auto& f : factors_) p += f.p();
    return p;
}

int TestProduct::total_q() const {
    int q = 0;
    for (const auto& f : factors_) q += f.q();
    return q;
}

NumForm TestProduct::form_at(std::span<const double> x) const {
    NumForm acc(n_, 0, 0);
    acc.add_term(0, 0, 1.0);
    for (const auto& f : factors_) acc = wedge(acc, evaluate(f, x));
    return acc;
}

double TestProduct::weight_at(std::span<const double> x) const {
    return weight_.valid() ? weight_.eval(x) : 1.0;
}

FieldForm TestProduct::symbolic_form() const {
    FieldForm acc = scalar_form(ScalarField::constant(n_, 1.0));
    for (const auto& f : factors_) acc = wedge(acc, f);
    return acc;
}

MeasureEstimate SmoothCurrent::pair(const TestProduct& psi, const Region& region,
                                    const QuadratureSpec& spec) const {
    if (psi.n() != n() || region.dim() != n())
        throw InvalidArgument("pair: dimension mismatch");
    if (p() + psi.total_p() != n() || q() + psi.total_q() != n())
        throw InvalidArgument("pair: total bidegree must be (n,n)");
    const FieldForm& t = form_;
    Integrand f = [&t, &psi](std::span<const double> x) {
        NumForm tx = evaluate(t, x);
        double d = density(wedge(tx, psi.form_at(x)));
        return d == 0.0 ? 0.0 : d * psi.weight_at(x);
    };
    return integrate(region, f, spec);
}

std::optional<ExactIntegral> SmoothCurrent::pair_exact(const TestProduct& psi,
                                                       const Region& region) const {
    if (psi.n() != n() || region.dim() != n())
        throw InvalidArgument("pair_exact: dimension mismatch");
    if (p() + psi.total_p() != n() || q() + psi.total_q() != n())
        throw InvalidArgument("pair_exact: total bidegree must be (n,n)");
    FieldForm full = wedge(form_, psi.symbolic_form());
    ScalarField g = density_field(full);
    if (psi.has_weight()) g = g * psi.weight();
    return integrate_exact(g, region);
}

MeasureEstimate SmoothCurrent::mass(const Region& region, const QuadratureSpec& spec) const {
    const FieldForm& t = form_;
    Integrand f = [&t](std::span<const double> x) {
        NumForm tx = evaluate(t, x);
        double s = 0.0;
        for (const auto& [key, c] : tx.terms()) s += c * c;
        return std::sqrt(s);
    };
    return integrate(region, f, spec);
}

SubmanifoldCurrent::SubmanifoldCurrent(SurfaceMesh mesh, std::vector<ScalarField> implicits)
    : mesh_(std::move(mesh)), implicits_(std::move(implicits)) {
    const int n = mesh_.n;
    const int c = int(implicits_.size());
    if (c < 1 || c >= n) throw InvalidArgument("submanifold: need 1..n-1 implicit functions");
    if (mesh_.dim != n - c)
        throw InvalidArgument("submanifold: mesh dimension and implicit count disagree");
    for (const auto& r : implicits_)
        if (r.n_vars() != n) throw InvalidArgument("submanifold: implicit dimension mismatch");

    std::vector<std::vector<ScalarField>> grads(std::size_t(c), std::vector<ScalarField>{});
    for (int j = 0; j < c; ++j)
        for (int i = 0; i < n; ++i) grads[std::size_t(j)].push_back(implicits_[std::size_t(j)].partial(i));

    frames_.reserve(mesh_.points.size());
    for (std::size_t s = 0; s < mesh_.points.size(); ++s) {
        const auto& x = mesh_.points[s];
        std::vector<Eigen::VectorXd> frame;
        for (int j = 0; j < c; ++j) {
            Eigen::VectorXd g(n);
            for (int i = 0; i < n; ++i) g[i] = grads[std::size_t(j)][std::size_t(i)].eval(x);
            double raw = g.norm();
            for (const auto& prev : frame) g -= prev.dot(g) * prev;
            if (g.norm() <= 1e-8 * std::max(raw, 1e-30))
                throw HypothesisError("submanifold: implicit gradients are dependent at a mesh point");
            g.normalize();
            frame.push_back(std::move(g));
        }
        for (std::size_t a = 0; a < frame.size(); ++a)
            for (std::size_t b = 0; b <= a; ++b) {
                double dot = frame[a].dot(frame[b]);
                double want = (a == b) ? 1.0 : 0.0;
                if (std::abs(dot - want) > 1e-8)
                    throw HypothesisError("submanifold: frame failed the orthonormality check");
            }
        frames_.push_back(std::move(frame));
    }
}

namespace {

NumForm frame_product(const std::vector<Eigen::VectorXd>& frame, int n) {
    NumForm acc(n, 0, 0);
    acc.add_term(0, 0, 1.0);
    for (const auto& nu : frame) {
        NumForm r(n, 1, 1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r.add_term(Mask(1) << i, Mask(1) << j, nu[i] * nu[j]);
        acc = wedge(acc, r);
    }
    return acc;
}

} // namespace

MeasureEstimate SubmanifoldCurrent::pair(const TestProduct& psi, const Region& region) const {
    const int n = mesh_.n;
    if (psi.n() != n || region.dim() != n) throw InvalidArgument("pair: dimension mismatch");
    if (codim() + psi.total_p() != n || codim() + psi.total_q() != n)
        throw InvalidArgument("pair: total bidegree must be (n,n)");
    long double acc = 0.0L, err = 0.0L;
    std::int64_t used = 0;
    std::vector<double> probe(std::size_t(n), 0.0);
    for (std::size_t s = 0; s < mesh_.points.size(); ++s) {
        const auto& x = mesh_.points[s];
        const bool inside = region.contains(x);
        // One sample decides the whole element, so elements whose
        // neighborhood crosses the region boundary carry their full
        // contribution as quantization uncertainty.
        const double h = std::pow(mesh_.weights[s], 1.0 / mesh_.dim);
        bool straddle = false;
        probe.assign(x.begin(), x.end());
        for (int j = 0; j < n && !straddle; ++j) {
            for (double sgn : {-1.0, 1.0}) {
                probe[std::size_t(j)] = x[std::size_t(j)] + sgn * h;
                if (region.contains(probe) != inside) {
                    straddle = true;
                    break;
                }
            }
            probe[std::size_t(j)] = x[std::size_t(j)];
        }
        if (!inside && !straddle) continue;
        NumForm prod = wedge(frame_product(frames_[s], n), psi.form_at(x));
        double d = density(prod);
        if (d != 0.0) d *= psi.weight_at(x);
        if (inside) {
            acc += mesh_.weights[s] * d;
            ++used;
        }
        if (straddle) err += std::abs(mesh_.weights[s] * d);
    }
    MeasureEstimate est;
    est.value = double(acc);
    est.error = double(err);
    est.evaluations = used;
    est.method = "surface_mesh";
    return est;
}

double SubmanifoldCurrent::area(const Region& region) const {
    double a = 0.0;
    for (std::size_t s = 0; s < mesh_.points.size(); ++s)
        if (region.contains(mesh_.points[s])) a += mesh_.weights[s];
    return a;
}

RichardsonResult richardson_sequence(const std::function<double(double)>& eval,
                                     std::span<const double> eps_values, int order) {
    if (eps_values.size() < 2)
        throw InvalidArgument("richardson_sequence: need at least two widths");
    RichardsonResult r;
    for (double e : eps_values) {
        r.eps.push_back(e);
        r.raw.push_back(eval(e));
    }
    auto extrap = [order](double v_coarse, double v_fine, double ratio) {
        double f = std::pow(ratio, order);
        return (f * v_fine - v_coarse) / (f - 1.0);
    };
    std::size_t m = r.raw.size();
    double ratio1 = r.eps[m - 2] / r.eps[m - 1];
    double last = extrap(r.raw[m - 2], r.raw[m - 1], ratio1);
    r.extrapolated = last;
    if (m >= 3) {
        double ratio0 = r.eps[m - 3] / r.eps[m - 2];
        double prev = extrap(r.raw[m - 3], r.raw[m - 2], ratio0);
        r.error_hint = std::abs(last - prev);
    } else {
        r.error_hint = std::abs(r.raw[m - 1] - last);
    }
    return r;
}

SuperhessianReport superhessian_product(const SmoothCurrent& t, int m,
                                        std::span<const ScalarField> u_list,
                                        const TestProduct& test, const Region& region,
                                        std::span<const double> eps_schedule,
                                        const QuadratureSpec& quad, int mollify_order) {
    const int n = t.n();
    if (t.p() != t.q()) throw InvalidArgument("superhessian_product: T must be symmetric bidegree");
    if (m < 1 || m > n) throw InvalidArgument("superhessian_product: m must be in 1..n");
    if (test.n() != n) throw InvalidArgument("superhessian_product: test dimension mismatch");
    const int p = n - t.p();
    const int q = int(u_list.size());
    if (q < 1) throw InvalidArgument("superhessian_product: need at least one factor");
    if (q > p + m - n)
        throw InvalidArgument("superhessian_product: too many factors for bidimension " +
                              std::to_string(p));
    if (eps_schedule.empty())
        throw InvalidArgument("superhessian_product: empty width schedule");
    for (std::size_t i = 0; i + 1 < eps_schedule.size(); ++i)
        if (!(eps_schedule[i] > eps_schedule[i + 1]) || !(eps_schedule[i + 1] > 0.0))
            throw InvalidArgument("superhessian_product: widths must decrease and stay positive");

    for (const ScalarField& u : u_list) {
        if (!u.valid() || u.n_vars() != n)
            throw InvalidArgument("superhessian_product: factor dimension mismatch");
        ConvexityVerdict cv = m_convex(u, region, m, 200, 13);
        if (cv.kind == VerdictKind::CertifiedFalse) {
            std::string at;
            for (double v : cv.witness_point) at += (at.empty() ? "" : ", ") + std::to_string(v);
            throw HypothesisError("superhessian_product: factor fails " + std::to_string(m) +
                                  "-convexity near (" + at + ")");
        }
    }
    {
        SplitMix64 rng(17);
        std::vector<double> x;
        for (int s = 0; s < 32; ++s) {
            if (!region.sample(rng, x)) continue;
            NumForm fx = evaluate(t.form(), x);
            PositivityVerdict pv = t.p() == 1 ? m_positive(fx, m) : weakly_positive(fx);
            if (pv.kind == VerdictKind::CertifiedFalse) {
                std::string at;
                for (double v : x) at += (at.empty() ? "" : ", ") + std::to_string(v);
                throw HypothesisError("superhessian_product: T fails positivity at (" + at +
                                      "): " + pv.witness);
            }
        }
    }

    SuperhessianReport rep;
    for (double eps : eps_schedule) {
        TestProduct psi = test;
        if (n - m > 0) psi.times(to_field_form(beta_power<double>(n, n - m)));
        for (const ScalarField& u : u_list)
            psi.times(dd_sharp(u.mollified(eps, mollify_order)));
        MeasureEstimate est = t.pair(psi, region, quad);
        rep.eps.push_back(eps);
        rep.values.push_back(est);
    }

    std::size_t count = rep.values.size();
    std::vector<double> raw;
    for (const MeasureEstimate& e : rep.values) raw.push_back(e.value);
    if (count >= 2) {
        std::size_t i = 0;
        RichardsonResult rich = richardson_sequence(
            [&](double) { return raw[std::min(i++, count - 1)]; }, eps_schedule, 2);
        rep.extrapolated = rich.extrapolated;
        rep.error_hint = rich.error_hint;
    } else {
        rep.extrapolated = raw.front();
        rep.error_hint = rep.values.front().error;
    }

    rep.cauchy = count >= 2;
    double scale = 0.0;
    for (double v : raw) scale = std::max(scale, std::abs(v));
    std::size_t tail = count >= 4 ? count - 3 : (count >= 2 ? count - 1 : 0);
    for (std::size_t i = tail; i + 1 < count; ++i) {
        double gap = std::abs(raw[i + 1] - raw[i]);
        double tol = 3.0 * (rep.values[i].error + rep.values[i + 1].error) + 1e-9 * scale;
        if (gap > tol) rep.cauchy = false;
    }
    return rep;
}

std::vector<double> default_eps_schedule() {
    std::vector<double> e;
    for (int k = 3; k <= 8; ++k) e.push_back(std::pow(2.0, -k));
    return e;
}

double minimality_residual(const SubmanifoldCurrent& m, int p,
                           std::span<const ScalarField> battery) {
    const int n = m.n();
    const int dim = n - m.codim();
    if (p < 1 || p > dim) throw InvalidArgument("minimality_residual: p must be in 1..dim");
    if (battery.empty()) throw InvalidArgument("minimality_residual: empty battery");
    if (m.mesh().points.empty()) throw InvalidArgument("minimality_residual: empty mesh");

    std::vector<double> lo(m.mesh().points.front()), hi(lo);
    for (const auto& pt : m.mesh().points)
        for (int i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], pt[i]);
            hi[i] = std::max(hi[i], pt[i]);
        }
    for (int i = 0; i < n; ++i) {
        lo[i] -= 0.5;
        hi[i] += 0.5;
    }
    Region box = Region::box(lo, hi);

    double worst = 0.0;
    for (const ScalarField& g : battery) {
        if (!g.valid() || g.n_vars() != n)
            throw InvalidArgument("minimality_residual: battery dimension mismatch");
        for (int j = 0; j < n; ++j) {
            FieldForm gform(n, 0, 1);
            gform.add_term(0, Mask(1) << j, g);
            TestProduct psi(n);
            if (p > 1) psi.times(to_field_form(beta_power<double>(n, p - 1)));
            psi.times(exterior_d(gform));
            MeasureEstimate est = m.pair(psi, box);
            worst = std::max(worst, std::abs(est.value));
        }
    }
    return worst;
}

} // namespace supercal
