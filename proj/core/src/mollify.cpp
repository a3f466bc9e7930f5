#include "field_nodes.hpp"
#include "gauss.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace supercal {

namespace {

DPoly kernel_profile(int n) {
    DPoly one_minus_r2(n, 1.0);
    for (int i = 0; i < n; ++i) {
        DPoly zi = DPoly::variable(n, i);
        one_minus_r2 -= zi * zi;
    }
    DPoly p(n, 1.0);
    for (int k = 0; k < 4; ++k) p *= one_minus_r2;
    return p;
}

double tensor_profile_mass(int n, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, double> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const GaussRule& rule = gauss_legendre(order);
    DPoly prof = kernel_profile(n);
    std::vector<double> z(n, 0.0);
    std::vector<int> idx(n, 0);
    double mass = 0.0;
    while (true) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            z[i] = rule.nodes[idx[i]];
            w *= rule.weights[idx[i]];
        }
        double r2 = 0.0;
        for (double v : z) r2 += v * v;
        if (r2 < 1.0) mass += w * prof.eval(z);
        int axis = n - 1;
        while (axis >= 0 && ++idx[axis] == order) idx[axis--] = 0;
        if (axis < 0) break;
    }
    cache[key] = mass;
    return mass;
}

// Kink loci of a field in y-space: affine ties g.y + c = 0, and axis-0 grid
// lines y0 = coord from sampled data or one-dimensional radial centers.
struct KinkSet {
    std::vector<std::pair<Eigen::VectorXd, double>> affine;
    std::vector<double> axis0;
};

void collect_kinks(const ScalarField& f, KinkSet& out) {
    const auto& nd = f.node();
    std::visit(
        [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, MaxAffineNode> || std::is_same_v<V, MaxAffineGradNode>) {
                for (Eigen::Index j = 0; j < v.a.rows(); ++j)
                    for (Eigen::Index k = j + 1; k < v.a.rows(); ++k) {
                        Eigen::VectorXd g = (v.a.row(j) - v.a.row(k)).transpose();
                        if (g.lpNorm<Eigen::Infinity>() > 0.0)
                            out.affine.emplace_back(std::move(g), v.b[j] - v.b[k]);
                    }
            } else if constexpr (std::is_same_v<V, SampledNode>) {
                const auto& d = v.data;
                for (int i = 0; i < d.dims[0]; ++i)
                    out.axis0.push_back(d.lo[0] +
                                        i * (d.hi[0] - d.lo[0]) / double(d.dims[0] - 1));
            } else if constexpr (std::is_same_v<V, RadialNode>) {
                if (nd.n == 1 && !v.terms.empty()) out.axis0.push_back(v.center[0]);
            } else if constexpr (std::is_same_v<V, SumNode> || std::is_same_v<V, ProdNode>) {
                collect_kinks(v.a, out);
                collect_kinks(v.b, out);
            } else if constexpr (std::is_same_v<V, PowNode> || std::is_same_v<V, LogNode> ||
                                 std::is_same_v<V, ExpNode> || std::is_same_v<V, SinNode> ||
                                 std::is_same_v<V, CosNode>) {
                collect_kinks(v.f, out);
            }
            // Poly and Mollified are smooth; nothing to record.
        },
        nd.v);
}

} // namespace

double MollifierKernel::normalization() const { return tensor_profile_mass(n, points_per_axis); }

DPoly MollifierKernel::profile() const { return kernel_profile(n); }

double MollifierKernel::closed_form_mass() const {
    return std::pow(M_PI, 0.5 * n) * 24.0 / std::tgamma(0.5 * n + 5.0);
}

double eval_mollified(const MollifiedNode& m, int n, std::span<const double> x) {
    const GaussRule& rule = gauss_legendre(m.order);
    DPoly kern = kernel_profile(n);
    for (int d : m.kernel_derivs) kern = kern.partial(d);
    double scale = 1.0 / tensor_profile_mass(n, m.order);
    for (std::size_t i = 0; i < m.kernel_derivs.size(); ++i) scale /= m.eps;

    KinkSet kinks;
    collect_kinks(m.base, kinks);

    std::vector<double> z(n, 0.0), y(n, 0.0);
    std::vector<int> idx(std::max(n - 1, 0), 0);
    std::vector<double> cuts;
    double acc = 0.0;
    while (true) {
        double w_outer = 1.0;
        for (int i = 1; i < n; ++i) {
            z[i] = rule.nodes[idx[i - 1]];
            w_outer *= rule.weights[idx[i - 1]];
        }
        // breakpoints of z0 on this line
        cuts.assign({-1.0, 1.0});
        for (const auto& [g, c] : kinks.affine) {
            if (std::abs(g[0]) < 1e-14 * g.lpNorm<Eigen::Infinity>()) continue;
            double a = c;
            for (int i = 0; i < n; ++i) a += g[i] * x[i];
            for (int i = 1; i < n; ++i) a -= m.eps * g[i] * z[i];
            double t = a / (m.eps * g[0]);
            if (t > -1.0 + 1e-13 && t < 1.0 - 1e-13) cuts.push_back(t);
        }
        for (double coord : kinks.axis0) {
            double t = (x[0] - coord) / m.eps;
            if (t > -1.0 + 1e-13 && t < 1.0 - 1e-13) cuts.push_back(t);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [](double a, double b) { return b - a < 1e-13; }),
                   cuts.end());
        if (cuts.size() > 66) throw InvalidArgument("mollified: too many kink panels on one line");

        for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
            double mid = 0.5 * (cuts[p] + cuts[p + 1]);
            double half = 0.5 * (cuts[p + 1] - cuts[p]);
            for (int q = 0; q < m.order; ++q) {
                z[0] = mid + half * rule.nodes[q];
                double r2 = 0.0;
                for (double v : z) r2 += v * v;
                if (r2 >= 1.0) continue;
                for (int i = 0; i < n; ++i) y[i] = x[i] - m.eps * z[i];
                acc += w_outer * half * rule.weights[q] * m.base.eval(y) * kern.eval(z);
            }
        }

        if (n <= 1) break;
        int axis = n - 2;
        while (axis >= 0 && ++idx[axis] == m.order) idx[axis--] = 0;
        if (axis < 0) break;
    }
    return scale * acc;
}

} // namespace supercal
