#pragma once

#include "supercal/exact.hpp"
#include "supercal/multi_index.hpp"
#include "supercal/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace supercal {

// Coefficient operations a Form<C> needs. Specializations exist for double, for
// Polynomial<T>, and (in scalar_field.hpp) for ScalarField.
template <class C>
struct CoefOps;

template <>
struct CoefOps<double> {
    static bool is_zero(double c) { return c == 0.0; }
    static double from_int(int /*n*/, long v) { return double(v); }
    static double add(double a, const double& b) { return a + b; }
    static double neg(double a) { return -a; }
    static double mul(const double& a, const double& b) { return a * b; }
};

template <class T>
struct CoefOps<Polynomial<T>> {
    static bool is_zero(const Polynomial<T>& c) { return c.is_zero(); }
    static Polynomial<T> from_int(int n, long v) { return Polynomial<T>(n, T(v)); }
    static Polynomial<T> add(Polynomial<T> a, const Polynomial<T>& b) { return a += b; }
    static Polynomial<T> neg(const Polynomial<T>& a) { return -a; }
    static Polynomial<T> mul(const Polynomial<T>& a, const Polynomial<T>& b) { return a * b; }
};

// Bigraded alternating form of bidegree (p, q) on R^n x R^n: a finite sum of terms
// c_KL dx_K ^ dxi_L over strictly increasing K (|K| = p) and L (|L| = q), in the
// canonical order "all dx factors, then all dxi factors". Terms are stored sorted by
// basis key and zero coefficients are pruned, so representations are canonical.
template <class C>
class Form {
public:
    Form() = default;
    Form(int n, int p, int q) : n_(n), p_(p), q_(q) {
        if (n < 0 || n > 31) throw InvalidArgument("form: ambient dimension out of range");
        if (p < 0 || q < 0 || p > n || q > n) throw InvalidArgument("form: bidegree out of range");
    }

    int n() const { return n_; }
    int p() const { return p_; }
    int q() const { return q_; }
    bool is_zero() const { return terms_.empty(); }
    const std::vector<std::pair<BasisKey, C>>& terms() const { return terms_; }

    void add_term(Mask k, Mask l, C coef) {
        if (mask_size(k) != p_ || mask_size(l) != q_)
            throw InvalidArgument("form: term does not match bidegree");
        if ((k | l) >> n_) throw InvalidArgument("form: index exceeds ambient dimension");
        add_term_unchecked(basis_key(k, l), std::move(coef));
    }

    const C* coefficient(Mask k, Mask l) const {
        BasisKey key = basis_key(k, l);
        auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                                   [](const auto& t, BasisKey kk) { return t.first < kk; });
        if (it == terms_.end() || it->first != key) return nullptr;
        return &it->second;
    }

    Form& operator+=(const Form& o) {
        require_same_shape(o);
        for (const auto& [k, c] : o.terms_) add_term_unchecked(k, c);
        return *this;
    }
    Form& operator-=(const Form& o) {
        require_same_shape(o);
        for (const auto& [k, c] : o.terms_) add_term_unchecked(k, CoefOps<C>::neg(c));
        return *this;
    }
    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator-(Form a, const Form& b) { return a -= b; }
    Form operator-() const {
        Form r = *this;
        for (auto& [k, c] : r.terms_) c = CoefOps<C>::neg(c);
        return r;
    }

    Form scaled(const C& s) const {
        Form r(n_, p_, q_);
        for (const auto& [k, c] : terms_) r.add_term_unchecked(k, CoefOps<C>::mul(c, s));
        return r;
    }

    bool operator==(const Form& o) const
        requires std::equality_comparable<C>
    {
        return n_ == o.n_ && p_ == o.p_ && q_ == o.q_ && terms_ == o.terms_;
    }

private:
    void require_same_shape(const Form& o) const {
        if (n_ != o.n_ || p_ != o.p_ || q_ != o.q_)
            throw InvalidArgument("form: bidegree/dimension mismatch");
    }

    void add_term_unchecked(BasisKey key, C coef) {
        if (CoefOps<C>::is_zero(coef)) return;
        auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                                   [](const auto& t, BasisKey k) { return t.first < k; });
        if (it != terms_.end() && it->first == key) {
            it->second = CoefOps<C>::add(std::move(it->second), coef);
            if (CoefOps<C>::is_zero(it->second)) terms_.erase(it);
        } else {
            terms_.insert(it, {key, std::move(coef)});
        }
    }

    template <class D>
    friend Form<D> wedge(const Form<D>&, const Form<D>&);
    template <class D>
    friend Form<D> apply_J(const Form<D>&);

    int n_ = 0, p_ = 0, q_ = 0;
    std::vector<std::pair<BasisKey, C>> terms_;
};

template <class C>
Form<C> wedge(const Form<C>& a, const Form<C>& b) {
    if (a.n() != b.n()) throw InvalidArgument("wedge: ambient dimension mismatch");
    if (a.p() + b.p() > a.n() || a.q() + b.q() > a.n())
        return Form<C>(a.n(), std::min(a.p() + b.p(), a.n()), std::min(a.q() + b.q(), a.n()));
    Form<C> r(a.n(), a.p() + b.p(), a.q() + b.q());
    for (const auto& [ka, ca] : a.terms()) {
        Mask k1 = key_k(ka), l1 = key_l(ka);
        for (const auto& [kb, cb] : b.terms()) {
            Mask k2 = key_k(kb), l2 = key_l(kb);
            if ((k1 & k2) || (l1 & l2)) continue;
            int s = wedge_sign(k1, l1, k2, l2);
            C prod = CoefOps<C>::mul(ca, cb);
            if (s < 0) prod = CoefOps<C>::neg(std::move(prod));
            r.add_term_unchecked(basis_key(k1 | k2, l1 | l2), std::move(prod));
        }
    }
    return r;
}

// J maps dx_K ^ dxi_L of bidegree (p,q) to (-1)^q dxi_K ^ dx_L; reordering the image
// into canonical form contributes (-1)^{pq}. J is an involution up to (-1)^{p+q} and
// fixes exactly the symmetric (p,p) forms.
template <class C>
Form<C> apply_J(const Form<C>& a) {
    Form<C> r(a.n(), a.q(), a.p());
    long sign = ((a.q() + a.p() * a.q()) % 2 == 0) ? 1 : -1;
    for (const auto& [key, c] : a.terms()) {
        C v = (sign < 0) ? CoefOps<C>::neg(c) : c;
        r.add_term_unchecked(basis_key(key_l(key), key_k(key)), std::move(v));
    }
    return r;
}

// Symmetry c_KL == c_LK of a (p,p) form, which is equivalent to J(a) == a. The
// comparator decides coefficient equality (exact for polynomials, tolerance for
// numeric coefficients).
template <class C, class Eq>
bool is_symmetric(const Form<C>& a, Eq&& equal) {
    if (a.p() != a.q()) return false;
    for (const auto& [key, c] : a.terms()) {
        Mask k = key_k(key), l = key_l(key);
        const C* mirror = a.coefficient(l, k);
        if (mirror == nullptr) {
            if (!CoefOps<C>::is_zero(c)) return false;
        } else if (!equal(c, *mirror)) {
            return false;
        }
    }
    return true;
}

inline bool is_symmetric(const Form<double>& a, double tol = 0.0) {
    return is_symmetric(a, [tol](double x, double y) { return std::abs(x - y) <= tol; });
}

template <class T>
bool is_symmetric(const Form<Polynomial<T>>& a) {
    return is_symmetric(a, [](const Polynomial<T>& x, const Polynomial<T>& y) { return x == y; });
}

// beta = sum_i dx_i ^ dxi_i, the standard symmetric (1,1) form.
template <class C>
Form<C> beta_form(int n) {
    Form<C> b(n, 1, 1);
    for (int i = 0; i < n; ++i) b.add_term(Mask(1) << i, Mask(1) << i, CoefOps<C>::from_int(n, 1));
    return b;
}

// beta^k by repeated wedge; k = 0 gives the constant 1 in bidegree (0,0).
template <class C>
Form<C> beta_power(int n, int k) {
    if (k < 0 || k > n) throw InvalidArgument("beta_power: k out of range 0..n");
    Form<C> acc(n, 0, 0);
    acc.add_term(0, 0, CoefOps<C>::from_int(n, 1));
    Form<C> b = beta_form<C>(n);
    for (int i = 0; i < k; ++i) acc = wedge(acc, b);
    return acc;
}

using NumForm = Form<double>;
using PolyForm = Form<QPoly>;

// Orientation sign relating the canonical basis monomial dx_1..dx_n ^ dxi_1..dxi_n
// to the volume form beta^n / n! = dx_1 ^ dxi_1 ^ ... ^ dx_n ^ dxi_n.
inline int orientation_sign(int n) { return (n * (n - 1) / 2) % 2 == 0 ? +1 : -1; }

// Density g of an (n,n) form relative to vol = beta^n / n!; integration of the form
// over a region means the Lebesgue integral of g.
inline double density(const NumForm& a) {
    if (a.p() != a.n() || a.q() != a.n()) throw InvalidArgument("density: form must be (n,n)");
    if (a.is_zero()) return 0.0;
    return orientation_sign(a.n()) * a.terms().front().second;
}

inline QPoly density(const PolyForm& a) {
    if (a.p() != a.n() || a.q() != a.n()) throw InvalidArgument("density: form must be (n,n)");
    if (a.is_zero()) return QPoly(a.n());
    const QPoly& c = a.terms().front().second;
    return orientation_sign(a.n()) > 0 ? c : -c;
}

} // namespace supercal
