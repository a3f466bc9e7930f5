#include "field_nodes.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace supercal {

namespace {

constexpr double kSingularRadius = 1e-12;

template <class V>
ScalarField make_node(int n, V&& v) {
    auto node = std::make_shared<ScalarField::Node>();
    node->n = n;
    node->v = std::forward<V>(v);
    return ScalarField(std::move(node));
}

const PolyNode* as_poly_node(const ScalarField& f) {
    return std::get_if<PolyNode>(&f.node().v);
}
const RadialNode* as_radial_node(const ScalarField& f) {
    return std::get_if<RadialNode>(&f.node().v);
}

void prune_terms(std::vector<RadialTermData>& terms) {
    std::erase_if(terms, [](const RadialTermData& t) { return t.poly.is_zero(); });
    // merge terms sharing (rpow, logpow) so repeated sums stay compact
    std::vector<RadialTermData> merged;
    for (auto& t : terms) {
        bool found = false;
        for (auto& m : merged) {
            if (m.rpow == t.rpow && m.logpow == t.logpow) {
                m.poly += t.poly;
                found = true;
                break;
            }
        }
        if (!found) merged.push_back(std::move(t));
    }
    std::erase_if(merged, [](const RadialTermData& t) { return t.poly.is_zero(); });
    terms = std::move(merged);
}

double eval_radial_terms(const std::vector<RadialTermData>& terms, std::span<const double> y) {
    double r2 = 0.0;
    for (double v : y) r2 += v * v;
    double r = std::sqrt(r2);
    double acc = 0.0;
    for (const auto& t : terms) {
        if (r <= kSingularRadius && (t.rpow < 0.0 || t.logpow > 0))
            throw SingularPointError("radial field evaluated at its singular point");
        double m = t.poly.eval(y);
        if (t.rpow != 0.0) m *= std::pow(r, t.rpow);
        for (int i = 0; i < t.logpow; ++i) m *= std::log(r);
        acc += m;
    }
    return acc;
}

} // namespace

const ScalarField::Node& ScalarField::node() const {
    if (!node_) throw InvalidArgument("scalar field: empty handle");
    return *node_;
}

int ScalarField::n_vars() const { return node().n; }

ScalarField ScalarField::zero(int n) { return from_poly(n, DPoly(n)); }

ScalarField ScalarField::constant(int n, double v) { return from_poly(n, DPoly(n, v)); }

ScalarField ScalarField::from_poly(int n, DPoly p) {
    if (p.n_vars() > n) throw InvalidArgument("scalar field: polynomial has too many variables");
    return make_node(n, PolyNode{std::move(p)});
}

ScalarField ScalarField::from_poly(int n, const QPoly& p) { return from_poly(n, to_dpoly(p)); }

ScalarField ScalarField::coordinate(int n, int var) {
    if (var < 0 || var >= n) throw InvalidArgument("scalar field: coordinate out of range");
    return from_poly(n, DPoly::variable(n, var));
}

ScalarField ScalarField::radial(int n, std::vector<double> center,
                                std::vector<RadialTermData> terms) {
    if (int(center.size()) != n) throw InvalidArgument("radial field: center size != n");
    prune_terms(terms);
    if (terms.empty()) return zero(n);
    return make_node(n, RadialNode{std::move(center), std::move(terms)});
}

ScalarField ScalarField::max_affine(int n, Eigen::MatrixXd a, Eigen::VectorXd b) {
    if (a.cols() != n || a.rows() != b.size() || a.rows() == 0)
        throw InvalidArgument("max-affine field: shape mismatch or empty");
    return make_node(n, MaxAffineNode{std::move(a), std::move(b)});
}

ScalarField ScalarField::sampled(int n, SampledData data) {
    if (int(data.lo.size()) != n || int(data.hi.size()) != n || int(data.dims.size()) != n)
        throw InvalidArgument("sampled field: axis metadata size != n");
    std::size_t want = 1;
    for (int d : data.dims) {
        if (d < 2) throw InvalidArgument("sampled field: need >= 2 grid points per axis");
        want *= std::size_t(d);
    }
    if (data.values.size() != want) throw InvalidArgument("sampled field: value count mismatch");
    for (int i = 0; i < n; ++i)
        if (!(data.lo[i] < data.hi[i])) throw InvalidArgument("sampled field: empty axis range");
    return make_node(n, SampledNode{std::move(data)});
}

bool ScalarField::is_zero() const {
    if (const auto* p = std::get_if<PolyNode>(&node().v)) return p->p.is_zero();
    if (const auto* r = std::get_if<RadialNode>(&node().v)) return r->terms.empty();
    return false;
}

double ScalarField::eval(std::span<const double> x) const {
    const Node& nd = node();
    if (int(x.size()) != nd.n) throw InvalidArgument("scalar field: point dimension mismatch");
    return std::visit(
        [&](const auto& v) -> double {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, PolyNode>) {
                return v.p.eval(x);
            } else if constexpr (std::is_same_v<V, RadialNode>) {
                std::vector<double> y(x.begin(), x.end());
                for (int i = 0; i < nd.n; ++i) y[i] -= v.center[i];
                return eval_radial_terms(v.terms, y);
            } else if constexpr (std::is_same_v<V, MaxAffineNode>) {
                double best = -std::numeric_limits<double>::infinity();
                for (Eigen::Index j = 0; j < v.a.rows(); ++j) {
                    double val = v.b[j];
                    for (int i = 0; i < nd.n; ++i) val += v.a(j, i) * x[i];
                    best = std::max(best, val);
                }
                return best;
            } else if constexpr (std::is_same_v<V, MaxAffineGradNode>) {
                double best = -std::numeric_limits<double>::infinity(), second = best;
                Eigen::Index arg = 0;
                for (Eigen::Index j = 0; j < v.a.rows(); ++j) {
                    double val = v.b[j];
                    for (int i = 0; i < nd.n; ++i) val += v.a(j, i) * x[i];
                    if (val > best) {
                        second = best;
                        best = val;
                        arg = j;
                    } else {
                        second = std::max(second, val);
                    }
                }
                if (best - second <= kSingularRadius * std::max(1.0, std::abs(best)))
                    throw SingularPointError("max-affine gradient queried on a tie set");
                return v.a(arg, v.var);
            } else if constexpr (std::is_same_v<V, MollifiedNode>) {
                return eval_mollified(v, nd.n, x);
            } else if constexpr (std::is_same_v<V, SampledNode>) {
                const SampledData& d = v.data;
                std::vector<double> t(nd.n);
                std::vector<int> i0(nd.n);
                for (int i = 0; i < nd.n; ++i) {
                    double u = (x[i] - d.lo[i]) / (d.hi[i] - d.lo[i]) * (d.dims[i] - 1);
                    if (u < 0.0 || u > double(d.dims[i] - 1))
                        throw InvalidArgument("sampled field: point outside the grid");
                    int c = std::min(int(u), d.dims[i] - 2);
                    i0[i] = c;
                    t[i] = u - c;
                }
                double acc = 0.0;
                for (int corner = 0; corner < (1 << nd.n); ++corner) {
                    double w = 1.0;
                    std::size_t idx = 0;
                    for (int i = 0; i < nd.n; ++i) {
                        int bit = (corner >> i) & 1;
                        w *= bit ? t[i] : 1.0 - t[i];
                        idx = idx * std::size_t(d.dims[i]) + std::size_t(i0[i] + bit);
                    }
                    acc += w * d.values[idx];
                }
                return acc;
            } else if constexpr (std::is_same_v<V, SumNode>) {
                return v.a.eval(x) + v.b.eval(x);
            } else if constexpr (std::is_same_v<V, ProdNode>) {
                return v.a.eval(x) * v.b.eval(x);
            } else if constexpr (std::is_same_v<V, PowNode>) {
                double base = v.f.eval(x);
                if (base <= 0.0 && v.s != std::floor(v.s))
                    throw SingularPointError("fractional power of a non-positive value");
                if (base == 0.0 && v.s < 0.0)
                    throw SingularPointError("negative power of zero");
                return std::pow(base, v.s);
            } else if constexpr (std::is_same_v<V, LogNode>) {
                double base = v.f.eval(x);
                if (base <= 0.0) throw SingularPointError("log of a non-positive value");
                return std::log(base);
            } else if constexpr (std::is_same_v<V, ExpNode>) {
                return std::exp(v.f.eval(x));
            } else if constexpr (std::is_same_v<V, SinNode>) {
                return std::sin(v.f.eval(x));
            } else { // CosNode
                return std::cos(std::get<CosNode>(nd.v).f.eval(x));
            }
        },
        nd.v);
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    if (a.n_vars() != b.n_vars()) throw InvalidArgument("field sum: dimension mismatch");
    int n = a.n_vars();
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (const auto *pa = as_poly_node(a), *pb = as_poly_node(b); pa && pb)
        return ScalarField::from_poly(n, pa->p + pb->p);
    if (const auto *ra = as_radial_node(a), *rb = as_radial_node(b);
        ra && rb && ra->center == rb->center) {
        auto terms = ra->terms;
        terms.insert(terms.end(), rb->terms.begin(), rb->terms.end());
        return ScalarField::radial(n, ra->center, std::move(terms));
    }
    return make_node(n, SumNode{a, b});
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) { return a + (-b); }

ScalarField ScalarField::operator-() const { return -1.0 * *this; }

ScalarField operator*(double s, const ScalarField& a) {
    int n = a.n_vars();
    if (s == 0.0 || a.is_zero()) return ScalarField::zero(n);
    if (s == 1.0) return a;
    if (const auto* pa = as_poly_node(a)) return ScalarField::from_poly(n, pa->p.scaled(s));
    if (const auto* ra = as_radial_node(a)) {
        auto terms = ra->terms;
        for (auto& t : terms) t.poly = t.poly.scaled(s);
        return ScalarField::radial(n, ra->center, std::move(terms));
    }
    return ScalarField::constant(n, s) * a;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    if (a.n_vars() != b.n_vars()) throw InvalidArgument("field product: dimension mismatch");
    int n = a.n_vars();
    if (a.is_zero() || b.is_zero()) return ScalarField::zero(n);
    const auto *pa = as_poly_node(a), *pb = as_poly_node(b);
    if (pa && pb) return ScalarField::from_poly(n, pa->p * pb->p);
    const auto *ra = as_radial_node(a), *rb = as_radial_node(b);
    if (ra && rb && ra->center == rb->center) {
        std::vector<RadialTermData> terms;
        for (const auto& ta : ra->terms)
            for (const auto& tb : rb->terms)
                terms.push_back({ta.poly * tb.poly, ta.rpow + tb.rpow, ta.logpow + tb.logpow});
        return ScalarField::radial(n, ra->center, std::move(terms));
    }
    // polynomial times radial merges when the polynomial recenters exactly
    auto poly_radial = [&](const PolyNode* p, const RadialNode* r) -> std::optional<ScalarField> {
        if (!p || !r) return std::nullopt;
        DPoly shifted = p->p.translated(r->center);
        std::vector<RadialTermData> terms = r->terms;
        for (auto& t : terms) t.poly = t.poly * shifted;
        return ScalarField::radial(n, r->center, std::move(terms));
    };
    if (auto m = poly_radial(pa, rb)) return *m;
    if (auto m = poly_radial(pb, ra)) return *m;
    return make_node(n, ProdNode{a, b});
}

ScalarField pow_field(const ScalarField& f, double exponent) {
    int n = f.n_vars();
    if (exponent == 0.0) return ScalarField::constant(n, 1.0);
    if (exponent == 1.0) return f;
    if (exponent == std::floor(exponent) && exponent > 1.0 && exponent <= 8.0) {
        if (as_poly_node(f) || as_radial_node(f)) {
            ScalarField acc = f;
            for (int i = 1; i < int(exponent); ++i) acc = acc * f;
            return acc;
        }
    }
    if (const auto* r = as_radial_node(f);
        r && r->terms.size() == 1 && r->terms[0].logpow == 0 && r->terms[0].poly.degree() == 0) {
        double c = r->terms[0].poly.is_zero() ? 0.0 : r->terms[0].poly.terms().front().second;
        if (c > 0.0) {
            DPoly cp(n, std::pow(c, exponent));
            return ScalarField::radial(n, r->center, {{cp, r->terms[0].rpow * exponent, 0}});
        }
    }
    return make_node(n, PowNode{f, exponent});
}

ScalarField log_field(const ScalarField& f) { return make_node(f.n_vars(), LogNode{f}); }
ScalarField exp_field(const ScalarField& f) { return make_node(f.n_vars(), ExpNode{f}); }
ScalarField sin_field(const ScalarField& f) { return make_node(f.n_vars(), SinNode{f}); }
ScalarField cos_field(const ScalarField& f) { return make_node(f.n_vars(), CosNode{f}); }

ScalarField cosh_field(const ScalarField& f) {
    return 0.5 * (exp_field(f) + exp_field(-f));
}
ScalarField sinh_field(const ScalarField& f) {
    return 0.5 * (exp_field(f) - exp_field(-f));
}

ScalarField ScalarField::mollified(double eps, int points_per_axis) const {
    if (!(eps > 0.0)) throw InvalidArgument("mollified: width must be positive");
    if (points_per_axis < 2) throw InvalidArgument("mollified: need >= 2 quadrature points");
    return make_node(n_vars(), MollifiedNode{*this, eps, {}, points_per_axis});
}

// A derivative moves from the kernel onto the mollified base whenever the base
// is differentiable almost everywhere with no distributional part: gradients of
// max-affine pieces carry tie-set deltas and sampled data has no derivative at
// all, so those keep the derivative on the kernel at a 1/eps cost each.
static bool mollify_base_differentiable(const ScalarField& f) {
    return std::visit(
        [](const auto& v) -> bool {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, MaxAffineGradNode> || std::is_same_v<V, SampledNode>) {
                return false;
            } else if constexpr (std::is_same_v<V, SumNode> || std::is_same_v<V, ProdNode>) {
                return mollify_base_differentiable(v.a) && mollify_base_differentiable(v.b);
            } else if constexpr (std::is_same_v<V, PowNode> || std::is_same_v<V, LogNode> ||
                                 std::is_same_v<V, ExpNode> || std::is_same_v<V, SinNode> ||
                                 std::is_same_v<V, CosNode>) {
                return mollify_base_differentiable(v.f);
            } else {
                return true;
            }
        },
        f.node().v);
}

ScalarField ScalarField::partial(int var) const {
    const Node& nd = node();
    if (var < 0 || var >= nd.n) throw InvalidArgument("partial: variable out of range");
    int n = nd.n;
    return std::visit(
        [&](const auto& v) -> ScalarField {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, PolyNode>) {
                return from_poly(n, v.p.partial(var));
            } else if constexpr (std::is_same_v<V, RadialNode>) {
                std::vector<RadialTermData> out;
                DPoly yi = DPoly::variable(n, var);
                for (const auto& t : v.terms) {
                    out.push_back({t.poly.partial(var), t.rpow, t.logpow});
                    if (t.rpow != 0.0) out.push_back({(t.poly * yi).scaled(t.rpow), t.rpow - 2.0, t.logpow});
                    if (t.logpow > 0)
                        out.push_back({(t.poly * yi).scaled(double(t.logpow)), t.rpow - 2.0, t.logpow - 1});
                }
                return radial(n, v.center, std::move(out));
            } else if constexpr (std::is_same_v<V, MaxAffineNode>) {
                return make_node(n, MaxAffineGradNode{v.a, v.b, var});
            } else if constexpr (std::is_same_v<V, MaxAffineGradNode>) {
                return zero(n); // piecewise constant away from ties
            } else if constexpr (std::is_same_v<V, MollifiedNode>) {
                MollifiedNode m = v;
                if (mollify_base_differentiable(m.base))
                    m.base = m.base.partial(var);
                else
                    m.kernel_derivs.push_back(var);
                return make_node(n, std::move(m));
            } else if constexpr (std::is_same_v<V, SampledNode>) {
                throw InvalidArgument("sampled fields have no derivative; mollify first");
            } else if constexpr (std::is_same_v<V, SumNode>) {
                return v.a.partial(var) + v.b.partial(var);
            } else if constexpr (std::is_same_v<V, ProdNode>) {
                return v.a.partial(var) * v.b + v.a * v.b.partial(var);
            } else if constexpr (std::is_same_v<V, PowNode>) {
                return v.s * (pow_field(v.f, v.s - 1.0) * v.f.partial(var));
            } else if constexpr (std::is_same_v<V, LogNode>) {
                return v.f.partial(var) * pow_field(v.f, -1.0);
            } else if constexpr (std::is_same_v<V, ExpNode>) {
                return v.f.partial(var) * exp_field(v.f);
            } else if constexpr (std::is_same_v<V, SinNode>) {
                return v.f.partial(var) * cos_field(v.f);
            } else { // CosNode
                const auto& c = std::get<CosNode>(nd.v);
                return -1.0 * (c.f.partial(var) * sin_field(c.f));
            }
        },
        nd.v);
}

std::optional<RadialDensity> ScalarField::as_radial(std::span<const double> center) const {
    const Node& nd = node();
    int n = nd.n;
    if (int(center.size()) != n) throw InvalidArgument("as_radial: center size mismatch");
    std::vector<double> c(center.begin(), center.end());
    return std::visit(
        [&](const auto& v) -> std::optional<RadialDensity> {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, PolyNode>) {
                return RadialDensity{n, c, {{v.p.translated(c), 0.0, 0}}};
            } else if constexpr (std::is_same_v<V, RadialNode>) {
                if (v.center != c) return std::nullopt;
                return RadialDensity{n, c, v.terms};
            } else if constexpr (std::is_same_v<V, SumNode>) {
                auto ra = v.a.as_radial(center), rb = v.b.as_radial(center);
                if (!ra || !rb) return std::nullopt;
                ra->terms.insert(ra->terms.end(), rb->terms.begin(), rb->terms.end());
                prune_terms(ra->terms);
                return ra;
            } else if constexpr (std::is_same_v<V, ProdNode>) {
                auto ra = v.a.as_radial(center), rb = v.b.as_radial(center);
                if (!ra || !rb) return std::nullopt;
                RadialDensity out{n, c, {}};
                for (const auto& ta : ra->terms)
                    for (const auto& tb : rb->terms)
                        out.terms.push_back(
                            {ta.poly * tb.poly, ta.rpow + tb.rpow, ta.logpow + tb.logpow});
                prune_terms(out.terms);
                return out;
            } else if constexpr (std::is_same_v<V, PowNode>) {
                if (v.s == std::floor(v.s) && v.s >= 0.0 && v.s <= 16.0) {
                    auto rf = v.f.as_radial(center);
                    if (!rf) return std::nullopt;
                    RadialDensity acc{n, c, {{DPoly(n, 1.0), 0.0, 0}}};
                    for (int i = 0; i < int(v.s); ++i) {
                        RadialDensity next{n, c, {}};
                        for (const auto& ta : acc.terms)
                            for (const auto& tb : rf->terms)
                                next.terms.push_back(
                                    {ta.poly * tb.poly, ta.rpow + tb.rpow, ta.logpow + tb.logpow});
                        prune_terms(next.terms);
                        acc = std::move(next);
                    }
                    return acc;
                }
                auto rf = v.f.as_radial(center);
                if (rf && rf->terms.size() == 1 && rf->terms[0].logpow == 0 &&
                    rf->terms[0].poly.degree() == 0) {
                    double cc =
                        rf->terms[0].poly.is_zero() ? 0.0 : rf->terms[0].poly.terms().front().second;
                    if (cc > 0.0)
                        return RadialDensity{
                            n, c, {{DPoly(n, std::pow(cc, v.s)), rf->terms[0].rpow * v.s, 0}}};
                }
                return std::nullopt;
            } else {
                return std::nullopt;
            }
        },
        nd.v);
}

std::optional<MaxAffineData> ScalarField::as_max_affine() const {
    if (const auto* m = std::get_if<MaxAffineNode>(&node().v)) return MaxAffineData{m->a, m->b};
    return std::nullopt;
}

std::optional<DPoly> ScalarField::as_poly() const {
    const Node& nd = node();
    return std::visit(
        [&](const auto& v) -> std::optional<DPoly> {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, PolyNode>) {
                return v.p;
            } else if constexpr (std::is_same_v<V, SumNode>) {
                auto a = v.a.as_poly(), b = v.b.as_poly();
                if (!a || !b) return std::nullopt;
                return *a + *b;
            } else if constexpr (std::is_same_v<V, ProdNode>) {
                auto a = v.a.as_poly(), b = v.b.as_poly();
                if (!a || !b) return std::nullopt;
                return *a * *b;
            } else if constexpr (std::is_same_v<V, PowNode>) {
                if (v.s != std::floor(v.s) || v.s < 0.0 || v.s > 16.0) return std::nullopt;
                auto a = v.f.as_poly();
                if (!a) return std::nullopt;
                DPoly acc(nd.n, 1.0);
                for (int i = 0; i < int(v.s); ++i) acc *= *a;
                return acc;
            } else if constexpr (std::is_same_v<V, RadialNode>) {
                // rpow even and nonnegative, no log factor: |y|^rpow is a polynomial
                DPoly acc(nd.n);
                for (const auto& t : v.terms) {
                    if (t.logpow != 0 || t.rpow < 0.0 || t.rpow != std::floor(t.rpow) ||
                        int(t.rpow) % 2 != 0)
                        return std::nullopt;
                    DPoly r2(nd.n);
                    for (int i = 0; i < nd.n; ++i) {
                        DPoly yi = DPoly::variable(nd.n, i);
                        yi.add_term(0, -v.center[i]);
                        r2 += yi * yi;
                    }
                    DPoly pw(nd.n, 1.0);
                    for (int k = 0; k < int(t.rpow) / 2; ++k) pw *= r2;
                    // t.poly lives in y = x - center; shift back to x
                    std::vector<double> neg(v.center.size());
                    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -v.center[i];
                    acc += t.poly.translated(neg) * pw;
                }
                return acc;
            } else {
                return std::nullopt;
            }
        },
        nd.v);
}

std::string ScalarField::describe() const {
    const Node& nd = node();
    std::ostringstream os;
    std::visit(
        [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, PolyNode>)
                os << "poly(deg " << v.p.degree() << ", " << v.p.n_terms() << " terms)";
            else if constexpr (std::is_same_v<V, RadialNode>)
                os << "radial(" << v.terms.size() << " terms)";
            else if constexpr (std::is_same_v<V, MaxAffineNode>)
                os << "max_affine(" << v.a.rows() << " pieces)";
            else if constexpr (std::is_same_v<V, MaxAffineGradNode>)
                os << "max_affine_grad";
            else if constexpr (std::is_same_v<V, MollifiedNode>)
                os << "mollified(eps " << v.eps << ", " << v.kernel_derivs.size() << " derivs)";
            else if constexpr (std::is_same_v<V, SampledNode>)
                os << "sampled";
            else if constexpr (std::is_same_v<V, SumNode>)
                os << "sum";
            else if constexpr (std::is_same_v<V, ProdNode>)
                os << "product";
            else if constexpr (std::is_same_v<V, PowNode>)
                os << "pow(" << v.s << ")";
            else if constexpr (std::is_same_v<V, LogNode>)
                os << "log";
            else if constexpr (std::is_same_v<V, ExpNode>)
                os << "exp";
            else if constexpr (std::is_same_v<V, SinNode>)
                os << "sin";
            else
                os << "cos";
        },
        nd.v);
    return os.str();
}

NumForm evaluate(const FieldForm& a, std::span<const double> x) {
    NumForm r(a.n(), a.p(), a.q());
    for (const auto& [key, c] : a.terms()) r.add_term(key_k(key), key_l(key), c.eval(x));
    return r;
}

FieldForm to_field_form(const PolyForm& a) {
    FieldForm r(a.n(), a.p(), a.q());
    for (const auto& [key, c] : a.terms())
        r.add_term(key_k(key), key_l(key), ScalarField::from_poly(a.n(), c));
    return r;
}

FieldForm to_field_form(const NumForm& a) {
    FieldForm r(a.n(), a.p(), a.q());
    for (const auto& [key, c] : a.terms())
        r.add_term(key_k(key), key_l(key), ScalarField::constant(a.n(), c));
    return r;
}

ScalarField squared_distance(int n, std::span<const double> center) {
    if (int(center.size()) != n) throw InvalidArgument("squared_distance: center size mismatch");
    DPoly p(n);
    for (int i = 0; i < n; ++i) {
        DPoly yi = DPoly::variable(n, i);
        yi.add_term(0, -center[i]);
        p += yi * yi;
    }
    return ScalarField::from_poly(n, p);
}

} // namespace supercal
