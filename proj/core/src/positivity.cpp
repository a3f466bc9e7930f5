#include "supercal/positivity.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace supercal {

Eigen::MatrixXd coefficient_matrix(const NumForm& a) {
    if (a.p() != 1 || a.q() != 1) throw InvalidArgument("coefficient_matrix: form must be (1,1)");
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(a.n(), a.n());
    for (const auto& [key, c] : a.terms()) {
        int i = std::countr_zero(key_k(key));
        int j = std::countr_zero(key_l(key));
        w(i, j) = c;
    }
    return w;
}

NumForm from_matrix(const Eigen::MatrixXd& w) {
    if (w.rows() != w.cols()) throw InvalidArgument("from_matrix: matrix must be square");
    int n = int(w.rows());
    NumForm a(n, 1, 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a.add_term(Mask(1) << i, Mask(1) << j, w(i, j));
    return a;
}

NumForm rank_one_form(const Eigen::VectorXd& v) {
    int n = int(v.size());
    NumForm a(n, 1, 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a.add_term(Mask(1) << i, Mask(1) << j, v[i] * v[j]);
    return a;
}

NumForm random_positive_product(int n, int k, SplitMix64& rng) {
    if (k < 0 || k > n) throw InvalidArgument("random_positive_product: k out of range");
    NumForm acc(n, 0, 0);
    acc.add_term(0, 0, 1.0);
    for (int s = 0; s < k; ++s) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = rng.next_gaussian();
        acc = wedge(acc, rank_one_form(v));
    }
    return acc;
}

namespace {

PositivityVerdict eigen_verdict(const Eigen::MatrixXd& w, double tol, const char* what) {
    Eigen::MatrixXd sym = 0.5 * (w + w.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    PositivityVerdict v;
    v.margin = es.eigenvalues().minCoeff();
    if (v.margin >= -tol) {
        v.kind = VerdictKind::CertifiedTrue;
    } else {
        v.kind = VerdictKind::CertifiedFalse;
        int which = 0;
        es.eigenvalues().minCoeff(&which);
        std::ostringstream os;
        os << what << " eigenvector with eigenvalue " << v.margin << ": [";
        for (int i = 0; i < sym.rows(); ++i)
            os << (i ? ", " : "") << es.eigenvectors().col(which)[i];
        os << "]";
        v.witness = os.str();
    }
    return v;
}

} // namespace

PositivityVerdict weakly_positive(const NumForm& a, double tol, std::int64_t samples,
                                  std::uint64_t seed) {
    if (a.p() != a.q()) throw InvalidArgument("weakly_positive: bidegree must be (p,p)");
    const int n = a.n(), p = a.p();
    PositivityVerdict v;
    if (p == 0 || p == n) {
        double c = 0.0;
        if (p == 0) {
            if (!a.is_zero()) c = a.terms().front().second;
        } else {
            c = density(a);
        }
        v.margin = c;
        v.kind = c >= -tol ? VerdictKind::CertifiedTrue : VerdictKind::CertifiedFalse;
        if (v.kind == VerdictKind::CertifiedFalse) v.witness = "the density itself is negative";
        return v;
    }
    if (p == 1) return eigen_verdict(coefficient_matrix(a), tol, "direction");
    if (p == n - 1) {
        // pairing with rank-one gamma_v is v^T D v for D(i,j) = density(a ^ dx_i ^ dxi_j)
        Eigen::MatrixXd d(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                NumForm e(n, 1, 1);
                e.add_term(Mask(1) << i, Mask(1) << j, 1.0);
                d(i, j) = density(wedge(a, e));
            }
        return eigen_verdict(d, tol, "pairing direction");
    }
    SplitMix64 rng(seed);
    v.trials = samples;
    v.margin = std::numeric_limits<double>::infinity();
    for (std::int64_t t = 0; t < samples; ++t) {
        NumForm prod = random_positive_product(n, n - p, rng);
        double pairing = density(wedge(a, prod));
        if (pairing < v.margin) v.margin = pairing;
        if (pairing < -tol) {
            v.kind = VerdictKind::CertifiedFalse;
            std::ostringstream os;
            os << "positive product " << t << " from seed " << seed << " pairs to " << pairing;
            v.witness = os.str();
            return v;
        }
    }
    v.kind = VerdictKind::PlausiblyTrue;
    return v;
}

double elementary_symmetric(std::span<const double> lambda, int k) {
    if (k < 0 || k > int(lambda.size())) throw InvalidArgument("elementary_symmetric: bad order");
    std::vector<double> e(std::size_t(k) + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t i = 0; i < lambda.size(); ++i)
        for (int j = std::min<int>(k, int(i) + 1); j >= 1; --j)
            e[std::size_t(j)] += lambda[i] * e[std::size_t(j) - 1];
    return e[std::size_t(k)];
}

PositivityVerdict m_positive(const NumForm& a, int m, double tol) {
    if (a.p() != 1 || a.q() != 1) throw InvalidArgument("m_positive: form must be (1,1)");
    if (m < 1 || m > a.n()) throw InvalidArgument("m_positive: m out of range 1..n");
    Eigen::MatrixXd w = coefficient_matrix(a);
    Eigen::MatrixXd sym = 0.5 * (w + w.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    std::vector<double> lambda(es.eigenvalues().data(), es.eigenvalues().data() + a.n());
    PositivityVerdict v;
    v.margin = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= m; ++k) {
        double ek = elementary_symmetric(lambda, k);
        v.margin = std::min(v.margin, ek);
        if (ek < -tol) {
            v.kind = VerdictKind::CertifiedFalse;
            std::ostringstream os;
            os << "e_" << k << " of the eigenvalues is " << ek;
            v.witness = os.str();
            return v;
        }
    }
    v.kind = VerdictKind::CertifiedTrue;
    return v;
}

namespace {

QPoly qdet(const std::vector<std::vector<QPoly>>& h, std::vector<int> rows,
           const std::vector<int>& cols, int n) {
    if (rows.empty()) return QPoly(n, Rational(1));
    QPoly acc(n);
    int r0 = rows.front();
    std::vector<int> rest(rows.begin() + 1, rows.end());
    for (std::size_t ci = 0; ci < cols.size(); ++ci) {
        std::vector<int> sub;
        for (std::size_t cj = 0; cj < cols.size(); ++cj)
            if (cj != ci) sub.push_back(cols[cj]);
        QPoly minor = qdet(h, rest, sub, n);
        QPoly contrib = h[std::size_t(r0)][std::size_t(cols[ci])] * minor;
        if (ci % 2 == 0)
            acc += contrib;
        else
            acc -= contrib;
    }
    return acc;
}

} // namespace

QPoly hessian_minor_sum(const QPoly& u, int n, int k) {
    if (k < 0 || k > n) throw InvalidArgument("hessian_minor_sum: k out of range");
    std::vector<std::vector<QPoly>> h(std::size_t(n), std::vector<QPoly>{});
    for (int i = 0; i < n; ++i) {
        QPoly di = u.partial(i);
        for (int j = 0; j < n; ++j) h[std::size_t(i)].push_back(di.partial(j));
    }
    QPoly acc(n);
    for (Mask s = 0; s < (Mask(1) << n); ++s) {
        if (mask_size(s) != k) continue;
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (s & (Mask(1) << i)) idx.push_back(i);
        acc += qdet(h, idx, idx, n);
    }
    return acc;
}

HessianIdentity hessian_wedge_identity(const QPoly& u, int n, int k) {
    if (k < 1 || k > n) throw InvalidArgument("hessian_wedge_identity: k out of range 1..n");
    PolyForm w = dd_sharp(u, n);
    PolyForm acc = beta_power<QPoly>(n, n - k);
    for (int i = 0; i < k; ++i) acc = wedge(acc, w);
    HessianIdentity out;
    out.lhs = density(acc);
    Rational c = factorial(k) * factorial(n - k) / factorial(n);
    // density of beta^n is n!
    out.rhs = hessian_minor_sum(u, n, k).scaled(c * factorial(n));
    out.matches = out.lhs == out.rhs;
    return out;
}

ConvexityVerdict m_convex(const ScalarField& u, const Region& region, int m,
                          std::int64_t samples, std::uint64_t seed, double tol) {
    const int n = u.n_vars();
    if (m < 1 || m > n) throw InvalidArgument("m_convex: m out of range 1..n");
    if (region.dim() != n) throw InvalidArgument("m_convex: dimension mismatch");

    std::vector<std::vector<ScalarField>> h(std::size_t(n), std::vector<ScalarField>{});
    for (int i = 0; i < n; ++i) {
        ScalarField di = u.partial(i);
        for (int j = 0; j < n; ++j) h[std::size_t(i)].push_back(di.partial(j));
    }

    bool constant_hessian = true;
    if (auto p = u.as_poly(); !p || p->degree() > 2) constant_hessian = false;

    ConvexityVerdict v;
    v.margin = std::numeric_limits<double>::infinity();
    SplitMix64 rng(seed);
    std::vector<double> x;
    Eigen::MatrixXd mat(n, n);
    std::int64_t done = 0, attempts = 0;
    std::int64_t want = constant_hessian ? 1 : samples;
    while (done < want) {
        if (++attempts > 64 * samples + 64)
            throw NonConvergenceError("m_convex: region rejection rate too high");
        if (!region.sample(rng, x)) continue;
        bool singular = false;
        for (int i = 0; i < n && !singular; ++i)
            for (int j = 0; j < n && !singular; ++j) {
                try {
                    mat(i, j) = h[std::size_t(i)][std::size_t(j)].eval(x);
                } catch (const SingularPointError&) {
                    singular = true;
                }
            }
        if (singular) continue;
        Eigen::MatrixXd sym = 0.5 * (mat + mat.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
        std::vector<double> lambda(es.eigenvalues().data(), es.eigenvalues().data() + n);
        for (int k = 1; k <= m; ++k) {
            double ek = elementary_symmetric(lambda, k);
            v.margin = std::min(v.margin, ek);
            if (ek < -tol) {
                v.kind = VerdictKind::CertifiedFalse;
                v.witness_point = x;
                v.trials = done + 1;
                return v;
            }
        }
        ++done;
    }
    v.trials = done;
    v.kind = constant_hessian ? VerdictKind::CertifiedTrue : VerdictKind::PlausiblyTrue;
    return v;
}

ScalarField hessian_Fk(const ScalarField& u, int k) {
    if (!u.valid()) throw InvalidArgument("hessian_Fk: field is empty");
    const int n = u.n_vars();
    if (k < 1 || k > n) throw InvalidArgument("hessian_Fk: k must be in 1..n");
    std::vector<std::vector<ScalarField>> h;
    h.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        ScalarField di = u.partial(i);
        h[i].resize(std::size_t(n));
        for (int j = i; j < n; ++j) h[i][j] = di.partial(j);
    }
    auto entry = [&](int i, int j) -> const ScalarField& {
        return i <= j ? h[i][j] : h[j][i];
    };
    ScalarField acc = ScalarField::zero(n);
    std::vector<int> rows;
    for (int i = 0; i < k; ++i) rows.push_back(i);
    for (;;) {
        std::vector<int> perm;
        for (int i = 0; i < k; ++i) perm.push_back(i);
        do {
            int inversions = 0;
            for (int a = 0; a < k; ++a)
                for (int b = a + 1; b < k; ++b)
                    if (perm[a] > perm[b]) ++inversions;
            ScalarField term = entry(rows[0], rows[perm[0]]);
            for (int r = 1; r < k; ++r) term = term * entry(rows[r], rows[perm[r]]);
            acc = inversions % 2 == 0 ? acc + term : acc - term;
        } while (std::next_permutation(perm.begin(), perm.end()));
        // next k-combination of {0..n-1} in lexicographic order
        int pos = k - 1;
        while (pos >= 0 && rows[pos] == n - k + pos) --pos;
        if (pos < 0) break;
        ++rows[pos];
        for (int i = pos + 1; i < k; ++i) rows[i] = rows[i - 1] + 1;
    }
    return acc;
}

} // namespace supercal
