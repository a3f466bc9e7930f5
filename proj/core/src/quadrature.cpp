#include "supercal/quadrature.hpp"

#include "gauss.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace supercal {

const GaussRule& gauss_legendre(int count) {
    if (count < 2 || count > 256) throw InvalidArgument("gauss rule: point count out of range");
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(count);
    if (it != cache.end()) return it->second;
    GaussRule rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    for (int i = 0; i < count; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= count; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = count * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[count - 1 - i] = x;
        rule.weights[count - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(count, std::move(rule)).first->second;
}

double sphere_surface_area(int n, double radius) {
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n) * std::pow(radius, n - 1);
}

double ball_volume(int n, double radius) {
    return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0) * std::pow(radius, n);
}

namespace {

// Radial densities can blow up at isolated points; if a node lands exactly on
// one, nudge it off by a relative 1e-9 and evaluate there instead.
double eval_nudged(const Integrand& f, std::vector<double>& x) {
    try {
        return f(x);
    } catch (const SingularPointError&) {
        for (auto& v : x) v += 1e-9 * (1.0 + std::abs(v));
        return f(x);
    }
}

MeasureEstimate integrate_mc(const Region& region, const Integrand& f, const MonteCarloSpec& mc) {
    if (mc.samples < 1) throw InvalidArgument("integrate: sample count must be positive");
    const double w_box = region.sampling_weight();
    constexpr std::int64_t kChunk = 4096;
    long double sum = 0.0L, sumsq = 0.0L;
    std::vector<double> x;
    std::int64_t n_chunks = (mc.samples + kChunk - 1) / kChunk;
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        SplitMix64 rng(substream_seed(mc.seed, std::uint64_t(c)));
        std::int64_t count = std::min(kChunk, mc.samples - c * kChunk);
        for (std::int64_t i = 0; i < count; ++i) {
            double v = region.sample(rng, x) ? eval_nudged(f, x) : 0.0;
            sum += v;
            sumsq += static_cast<long double>(v) * v;
        }
    }
    double mean = double(sum / mc.samples);
    double var = std::max(0.0, double(sumsq / mc.samples) - mean * mean);
    MeasureEstimate est;
    est.value = w_box * mean;
    est.error = w_box * std::sqrt(var / double(mc.samples));
    est.evaluations = mc.samples;
    est.method = "monte_carlo";
    return est;
}

double run_grid(const Region& region, const Integrand& f, int per_axis, bool gauss) {
    const int n = region.dim();
    const double w_box = region.sampling_weight();
    const GaussRule* rule = gauss ? &gauss_legendre(per_axis) : nullptr;
    std::vector<int> idx(n, 0);
    std::vector<double> t(n), x;
    long double sum = 0.0L;
    while (true) {
        double w = 1.0;
        for (int a = 0; a < n; ++a) {
            if (gauss) {
                t[a] = 0.5 * (rule->nodes[idx[a]] + 1.0);
                w *= 0.5 * rule->weights[idx[a]];
            } else {
                t[a] = (idx[a] + 0.5) / per_axis;
                w *= 1.0 / per_axis;
            }
        }
        if (region.grid_point(t, x)) sum += w * eval_nudged(f, x);
        int axis = n - 1;
        while (axis >= 0 && ++idx[axis] == per_axis) idx[axis--] = 0;
        if (axis < 0) break;
    }
    return w_box * double(sum);
}

MeasureEstimate integrate_grid(const Region& region, const Integrand& f,
                               const TensorGridSpec& spec) {
    if (spec.points_per_axis < 2) throw InvalidArgument("integrate: grid needs >= 2 points");
    int fine_n = spec.points_per_axis;
    int coarse_n = std::max(2, fine_n / 2);
    double fine = run_grid(region, f, fine_n, spec.gauss);
    double coarse = run_grid(region, f, coarse_n, spec.gauss);
    MeasureEstimate est;
    est.value = fine;
    est.error = std::abs(fine - coarse);
    est.evaluations = 1;
    for (int i = 0; i < region.dim(); ++i) est.evaluations *= fine_n;
    std::int64_t coarse_evals = 1;
    for (int i = 0; i < region.dim(); ++i) coarse_evals *= coarse_n;
    est.evaluations += coarse_evals;
    est.method = spec.gauss ? "tensor_gauss" : "tensor_midpoint";
    return est;
}

} // namespace

MeasureEstimate integrate(const Region& region, const Integrand& f, const QuadratureSpec& spec) {
    if (const auto* mc = std::get_if<MonteCarloSpec>(&spec)) return integrate_mc(region, f, *mc);
    return integrate_grid(region, f, std::get<TensorGridSpec>(spec));
}

std::vector<SpherePoint> sphere_quadrature(const std::vector<double>& center, double radius,
                                           int resolution, std::uint64_t seed) {
    const int n = int(center.size());
    if (!(radius > 0.0)) throw InvalidArgument("sphere quadrature: radius must be positive");
    if (resolution < 1) throw InvalidArgument("sphere quadrature: resolution must be positive");
    std::vector<SpherePoint> pts;
    if (n == 1) {
        for (int s : {-1, 1}) {
            SpherePoint p;
            p.x = {center[0] + s * radius};
            p.normal = {double(s)};
            p.w = 1.0;
            pts.push_back(std::move(p));
        }
    } else if (n == 2) {
        for (int j = 0; j < resolution; ++j) {
            double th = 2.0 * M_PI * (j + 0.5) / resolution;
            SpherePoint p;
            p.normal = {std::cos(th), std::sin(th)};
            p.x = {center[0] + radius * p.normal[0], center[1] + radius * p.normal[1]};
            p.w = 2.0 * M_PI * radius / resolution;
            pts.push_back(std::move(p));
        }
    } else if (n == 3) {
        const GaussRule& rule = gauss_legendre(std::max(2, resolution));
        int n_phi = 2 * std::max(2, resolution);
        for (std::size_t iu = 0; iu < rule.nodes.size(); ++iu) {
            double u = rule.nodes[iu];
            double s = std::sqrt(std::max(0.0, 1.0 - u * u));
            for (int j = 0; j < n_phi; ++j) {
                double phi = 2.0 * M_PI * (j + 0.5) / n_phi;
                SpherePoint p;
                p.normal = {s * std::cos(phi), s * std::sin(phi), u};
                p.x.resize(3);
                for (int i = 0; i < 3; ++i) p.x[i] = center[i] + radius * p.normal[i];
                p.w = radius * radius * rule.weights[iu] * (2.0 * M_PI / n_phi);
                pts.push_back(std::move(p));
            }
        }
    } else {
        double area = sphere_surface_area(n, radius);
        SplitMix64 rng(seed);
        for (int j = 0; j < resolution; ++j) {
            SpherePoint p;
            p.normal.resize(std::size_t(n));
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (int i = 0; i < n; ++i) {
                    p.normal[i] = rng.next_gaussian();
                    norm2 += p.normal[i] * p.normal[i];
                }
            } while (norm2 < 1e-12);
            double norm = std::sqrt(norm2);
            p.x.resize(std::size_t(n));
            for (int i = 0; i < n; ++i) {
                p.normal[i] /= norm;
                p.x[i] = center[i] + radius * p.normal[i];
            }
            p.w = area / resolution;
            pts.push_back(std::move(p));
        }
    }
    return pts;
}

} // namespace supercal
