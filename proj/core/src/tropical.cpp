#include "supercal/tropical.hpp"

#include "supercal/errors.hpp"

#include "gauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace supercal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Chord {
    double a = 0.0, b = 0.0;
};

Chord ball_chord(const Eigen::Vector2d& center, double radius, const Eigen::Vector2d& p,
                 const Eigen::Vector2d& dir) {
    // |p + t dir - center|^2 <= r^2 with |dir| = 1
    const Eigen::Vector2d q = p - center;
    const double m = q.dot(dir);
    const double disc = m * m - (q.squaredNorm() - radius * radius);
    if (disc <= 0.0) return {1.0, 0.0}; // empty
    const double s = std::sqrt(disc);
    return {-m - s, -m + s};
}

// Parameter intervals where p + t dir lies in the region, clipped to [t0, t1].
// Exact for balls, shells and boxes; other kinds get the bounding-box chord and
// the caller applies the indicator pointwise.
std::vector<Chord> chord_intervals(const Region& region, const Eigen::Vector2d& p,
                                   const Eigen::Vector2d& dir, double t0, double t1,
                                   bool& needs_indicator) {
    needs_indicator = false;
    const BoundingBox box = region.bounding();
    double lo = t0, hi = t1;
    for (int i = 0; i < 2; ++i) {
        if (std::abs(dir[i]) > 1e-14) {
            const double ta = (box.lo[i] - p[i]) / dir[i];
            const double tb = (box.hi[i] - p[i]) / dir[i];
            lo = std::max(lo, std::min(ta, tb));
            hi = std::min(hi, std::max(ta, tb));
        } else if (p[i] < box.lo[i] || p[i] > box.hi[i]) {
            return {};
        }
    }
    if (!(lo < hi)) return {};

    switch (region.kind()) {
    case Region::Kind::Box:
        return {{lo, hi}};
    case Region::Kind::Ball: {
        const auto* c = region.center();
        const Chord ch = ball_chord(Eigen::Vector2d((*c)[0], (*c)[1]),
                                    region.outer_radius(), p, dir);
        lo = std::max(lo, ch.a);
        hi = std::min(hi, ch.b);
        if (!(lo < hi)) return {};
        return {{lo, hi}};
    }
    case Region::Kind::Shell: {
        const auto* c = region.center();
        const Eigen::Vector2d cv((*c)[0], (*c)[1]);
        const Chord outer = ball_chord(cv, region.outer_radius(), p, dir);
        lo = std::max(lo, outer.a);
        hi = std::min(hi, outer.b);
        if (!(lo < hi)) return {};
        const Chord inner = ball_chord(cv, region.inner_radius(), p, dir);
        if (inner.a >= inner.b) return {{lo, hi}};
        std::vector<Chord> out;
        if (lo < inner.a) out.push_back({lo, std::min(hi, inner.a)});
        if (inner.b < hi) out.push_back({std::max(lo, inner.b), hi});
        return out;
    }
    default:
        needs_indicator = true;
        return {{lo, hi}};
    }
}

} // namespace

TropicalCurrent tropical_ddsharp(const ScalarField& u) {
    const auto data = u.as_max_affine();
    if (!data) throw InvalidArgument("tropical_ddsharp needs a max-affine field");
    const int n = u.n_vars();
    if (n != 1 && n != 2)
        throw InvalidArgument("tropical currents are implemented in one and two variables");

    const Eigen::MatrixXd& a = data->a;
    const Eigen::VectorXd& b = data->b;

    double scale = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        scale = std::max({scale, a.row(i).cwiseAbs().maxCoeff(), std::abs(b[i])});
    const double tol = 1e-9 * (1.0 + scale);

    // drop duplicated pieces; they would produce spurious zero-weight facets
    std::vector<int> keep;
    for (int i = 0; i < int(a.rows()); ++i) {
        bool dup = false;
        for (int j : keep)
            if ((a.row(i) - a.row(j)).cwiseAbs().maxCoeff() <= tol &&
                std::abs(b[i] - b[j]) <= tol) {
                dup = true;
                break;
            }
        if (!dup) keep.push_back(i);
    }
    const int m = int(keep.size());

    TropicalCurrent t;
    t.n_ = n;
    if (m < 2) return t;

    if (n == 1) {
        std::vector<double> ties;
        for (int ii = 0; ii < m; ++ii)
            for (int jj = ii + 1; jj < m; ++jj) {
                const int i = keep[ii], j = keep[jj];
                const double g = a(i, 0) - a(j, 0);
                if (std::abs(g) <= tol) continue;
                ties.push_back((b[j] - b[i]) / g);
            }
        std::sort(ties.begin(), ties.end());
        for (std::size_t s = 0; s < ties.size(); ++s) {
            const double x = ties[s];
            if (s > 0 && x - ties[s - 1] <= 1e-9 * (1.0 + std::abs(x))) continue;
            double best = -kInf;
            for (int k : keep) best = std::max(best, a(k, 0) * x + b[k]);
            // the jump is between the shallowest and steepest active slopes
            double amin = kInf, amax = -kInf;
            for (int k : keep)
                if (a(k, 0) * x + b[k] >= best - tol * (1.0 + std::abs(best))) {
                    amin = std::min(amin, a(k, 0));
                    amax = std::max(amax, a(k, 0));
                }
            const double mass = amax - amin;
            if (mass > tol) t.points_.push_back({x, mass});
        }
        return t;
    }

    for (int ii = 0; ii < m; ++ii)
        for (int jj = ii + 1; jj < m; ++jj) {
            const int i = keep[ii], j = keep[jj];
            const Eigen::Vector2d g = (a.row(i) - a.row(j)).transpose();
            if (g.norm() <= tol) continue; // parallel pieces, no tie line

            TropicalCurrent::Facet f;
            f.piece_i = i;
            f.piece_j = j;
            f.g = g;
            f.point = g * (b[j] - b[i]) / g.squaredNorm();
            f.dir = Eigen::Vector2d(-g[1], g[0]).normalized();
            f.t_lo = -kInf;
            f.t_hi = kInf;
            f.w = g * g.transpose() / g.norm();

            bool dead = false;
            for (int k : keep) {
                if (k == i || k == j) continue;
                const Eigen::Vector2d h = (a.row(i) - a.row(k)).transpose();
                const double c = h.dot(f.point) + b[i] - b[k];
                const double s = h.dot(f.dir);
                if (std::abs(s) <= tol) {
                    if (c < -tol) {
                        dead = true; // piece k dominates the whole tie line
                        break;
                    }
                    if (std::abs(c) <= tol) {
                        std::ostringstream msg;
                        msg << "pieces " << i << ", " << j << ", " << k
                            << " tie along a common line; input is not in general position";
                        throw InvalidArgument(msg.str());
                    }
                    continue;
                }
                const double tstar = -c / s;
                if (s > 0.0)
                    f.t_lo = std::max(f.t_lo, tstar);
                else
                    f.t_hi = std::min(f.t_hi, tstar);
            }
            if (dead || !(f.t_lo < f.t_hi - 1e-12)) continue;
            t.facets_.push_back(std::move(f));
        }
    return t;
}

MeasureEstimate TropicalCurrent::pair(const TestProduct& psi, const Region& region,
                                      int resolution) const {
    if (n_ == 0) throw InvalidArgument("empty tropical current");
    if (region.dim() != n_ || psi.n() != n_)
        throw InvalidArgument("tropical pairing dimension mismatch");
    if (psi.total_p() != n_ - 1 || psi.total_q() != n_ - 1)
        throw InvalidArgument("test product must have bidegree (n-1, n-1)");
    if (resolution < 2) throw InvalidArgument("resolution must be at least 2");

    MeasureEstimate est;
    est.method = "tropical_facets";

    if (n_ == 1) {
        for (const auto& pm : points_) {
            const double x[1] = {pm.x};
            if (!region.contains(x)) continue;
            NumForm atom(1, 1, 1);
            atom.add_term(1u, 1u, pm.mass);
            est.value += density(wedge(atom, psi.form_at(x))) * psi.weight_at(x);
            ++est.evaluations;
        }
        return est; // atoms are evaluated exactly
    }

    auto facet_sum = [&](int points) {
        double acc = 0.0;
        const GaussRule& rule = gauss_legendre(points);
        for (const auto& f : facets_) {
            NumForm wform(2, 1, 1);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) wform.add_term(Mask(1) << r, Mask(1) << c, f.w(r, c));

            bool indicator = false;
            const auto chords =
                chord_intervals(region, f.point, f.dir, f.t_lo, f.t_hi, indicator);
            for (const Chord& ch : chords) {
                const double mid = 0.5 * (ch.a + ch.b);
                const double half = 0.5 * (ch.b - ch.a);
                for (int q = 0; q < points; ++q) {
                    const double tq = mid + half * rule.nodes[q];
                    const Eigen::Vector2d xq = f.point + tq * f.dir;
                    const double x[2] = {xq[0], xq[1]};
                    if (indicator && !region.contains(x)) continue;
                    acc += rule.weights[q] * half * psi.weight_at(x) *
                           density(wedge(wform, psi.form_at(x)));
                    ++est.evaluations;
                }
            }
        }
        return acc;
    };

    const double fine = facet_sum(resolution);
    const double coarse = facet_sum(std::max(2, resolution / 2));
    est.value = fine;
    est.error = std::abs(fine - coarse);
    return est;
}

} // namespace supercal
