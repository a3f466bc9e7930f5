#pragma once

#include "supercal/errors.hpp"
#include "supercal/exact.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace supercal {

// Monomial exponents packed one byte per variable; supports up to kMaxVars variables
// of individual degree < 256. Keys sort deterministically as integers.
inline constexpr int kMaxVars = 8;
using MonoKey = std::uint64_t;

inline int mono_exp(MonoKey key, int var) { return int((key >> (8 * var)) & 0xff); }

inline MonoKey mono_with_exp(MonoKey key, int var, int e) {
    key &= ~(MonoKey(0xff) << (8 * var));
    return key | (MonoKey(std::uint64_t(e)) << (8 * var));
}

inline int mono_total_degree(MonoKey key) {
    int d = 0;
    for (int v = 0; v < kMaxVars; ++v) d += mono_exp(key, v);
    return d;
}

// Sparse multivariate polynomial with coefficients T (Rational for the exact layer,
// double for numeric densities). Terms are kept sorted by monomial key; zero
// coefficients are pruned eagerly so is_zero() is structural.
template <class T>
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int n_vars) : n_(n_vars) { check_vars(n_vars); }
    Polynomial(int n_vars, T constant) : n_(n_vars) {
        check_vars(n_vars);
        add_term(0, std::move(constant));
    }

    static Polynomial variable(int n_vars, int var) {
        Polynomial p(n_vars);
        p.add_term(mono_with_exp(0, var, 1), T(1));
        return p;
    }

    int n_vars() const { return n_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t n_terms() const { return terms_.size(); }
    const std::vector<std::pair<MonoKey, T>>& terms() const { return terms_; }

    int degree() const {
        int d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, mono_total_degree(k));
        return d;
    }

    void add_term(MonoKey key, T coef) {
        if (coef == T(0)) return;
        auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                                   [](const auto& t, MonoKey k) { return t.first < k; });
        if (it != terms_.end() && it->first == key) {
            it->second += coef;
            if (it->second == T(0)) terms_.erase(it);
        } else {
            terms_.insert(it, {key, std::move(coef)});
        }
    }

    Polynomial& operator+=(const Polynomial& o) {
        merge_vars(o);
        for (const auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        merge_vars(o);
        for (const auto& [k, c] : o.terms_) add_term(k, -c);
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    Polynomial operator-() const {
        Polynomial r(n_);
        r.terms_ = terms_;
        for (auto& [k, c] : r.terms_) c = -c;
        return r;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r(std::max(a.n_, b.n_));
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) r.add_term(mul_keys(ka, kb), ca * cb);
        return r;
    }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    Polynomial scaled(const T& s) const {
        Polynomial r(n_);
        if (s == T(0)) return r;
        r.terms_ = terms_;
        for (auto& [k, c] : r.terms_) c = c * s;
        return r;
    }

    bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

    Polynomial partial(int var) const {
        Polynomial r(n_);
        for (const auto& [k, c] : terms_) {
            int e = mono_exp(k, var);
            if (e == 0) continue;
            r.add_term(mono_with_exp(k, var, e - 1), c * T(e));
        }
        return r;
    }

    double eval(std::span<const double> x) const {
        double acc = 0.0;
        for (const auto& [k, c] : terms_) {
            double m = coef_to_double(c);
            for (int v = 0; v < n_; ++v)
                for (int e = mono_exp(k, v); e > 0; --e) m *= x[v];
            acc += m;
        }
        return acc;
    }

    T eval_exact(std::span<const T> x) const {
        T acc(0);
        for (const auto& [k, c] : terms_) {
            T m = c;
            for (int v = 0; v < n_; ++v)
                for (int e = mono_exp(k, v); e > 0; --e) m = m * x[v];
            acc += m;
        }
        return acc;
    }

    // Substitutes x -> x + shift; used to recenter densities onto a ball's center.
    Polynomial translated(std::span<const double> shift) const
        requires std::is_same_v<T, double>
    {
        Polynomial r(n_);
        for (const auto& [k, c] : terms_) {
            Polynomial term(n_, c);
            for (int v = 0; v < n_; ++v) {
                int e = mono_exp(k, v);
                if (e == 0) continue;
                Polynomial lin(n_, shift[v]);
                lin.add_term(mono_with_exp(0, v, 1), 1.0);
                for (int i = 0; i < e; ++i) term *= lin;
            }
            r += term;
        }
        return r;
    }

private:
    static void check_vars(int n) {
        if (n < 0 || n > kMaxVars) throw InvalidArgument("polynomial: variable count out of range");
    }
    void merge_vars(const Polynomial& o) { n_ = std::max(n_, o.n_); }

    static MonoKey mul_keys(MonoKey a, MonoKey b) {
        MonoKey r = 0;
        for (int v = 0; v < kMaxVars; ++v) {
            int e = mono_exp(a, v) + mono_exp(b, v);
            if (e > 255) throw InvalidArgument("polynomial: degree overflow in product");
            r = mono_with_exp(r, v, e);
        }
        return r;
    }

    static double coef_to_double(const T& c) {
        if constexpr (std::is_same_v<T, double>)
            return c;
        else
            return to_double(c);
    }

    int n_ = 0;
    std::vector<std::pair<MonoKey, T>> terms_;
};

using QPoly = Polynomial<Rational>;
using DPoly = Polynomial<double>;

DPoly to_dpoly(const QPoly& p);

} // namespace supercal
