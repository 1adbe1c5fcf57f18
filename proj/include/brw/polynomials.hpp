#pragma once

#include <cstddef>
#include <vector>

#include "brw/errors.hpp"

namespace brw {

/// Dense polynomial in the monomial basis; T is double or mpq_class.
template <typename T>
struct Polynomial {
    std::vector<T> c;  // c[i] multiplies x^i

    Polynomial() = default;
    explicit Polynomial(std::vector<T> coeffs) : c(std::move(coeffs)) { trim(); }

    static Polynomial zero() { return Polynomial{}; }
    static Polynomial constant(const T& v) {
        Polynomial p;
        if (!(v == T(0))) p.c = {v};
        return p;
    }

    int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero

    void trim() {
        while (!c.empty() && c.back() == T(0)) c.pop_back();
    }

    const T coeff(std::size_t i) const { return i < c.size() ? c[i] : T(0); }

    T eval(const T& x) const {
        T acc(0);
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.c.size() > c.size()) c.resize(o.c.size(), T(0));
        for (std::size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
        trim();
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.c.empty() || b.c.empty()) return zero();
        Polynomial r;
        r.c.assign(a.c.size() + b.c.size() - 1, T(0));
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
        r.trim();
        return r;
    }

    Polynomial scaled(const T& s) const {
        Polynomial r = *this;
        for (auto& v : r.c) v *= s;
        r.trim();
        return r;
    }

    /// Multiplication by x^m.
    Polynomial shifted(int m) const {
        if (c.empty()) return zero();
        Polynomial r;
        r.c.assign(c.size() + static_cast<std::size_t>(m), T(0));
        for (std::size_t i = 0; i < c.size(); ++i) r.c[i + static_cast<std::size_t>(m)] = c[i];
        return r;
    }
};

/// Probabilist Hermite polynomial He_n via He_{n+1} = x He_n - n He_{n-1}.
template <typename T>
Polynomial<T> hermite_poly(int n) {
    Polynomial<T> prev = Polynomial<T>::constant(T(1));
    if (n == 0) return prev;
    Polynomial<T> cur(std::vector<T>{T(0), T(1)});
    for (int m = 1; m < n; ++m) {
        Polynomial<T> next = cur.shifted(1) + prev.scaled(T(-m));
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// Polynomial in the probabilist-Hermite basis: value(x) = sum c[l] He_l(x).
template <typename T>
struct HermiteSeries {
    std::vector<T> c;  // c[l] multiplies He_l

    int degree() const { return static_cast<int>(c.size()) - 1; }

    void trim() {
        while (!c.empty() && c.back() == T(0)) c.pop_back();
    }

    const T coeff(std::size_t l) const { return l < c.size() ? c[l] : T(0); }

    T value(const T& x) const {
        // Scalar three-term recursion for He_l(x).
        T acc(0), hprev(1), hcur = x;
        if (!c.empty()) acc += c[0] * hprev;
        for (std::size_t l = 1; l < c.size(); ++l) {
            acc += c[l] * hcur;
            T hnext = x * hcur - T(static_cast<int>(l)) * hprev;
            hprev = hcur;
            hcur = hnext;
        }
        return acc;
    }

    Polynomial<T> to_monomial() const {
        Polynomial<T> r;
        for (std::size_t l = 0; l < c.size(); ++l) {
            if (c[l] == T(0)) continue;
            r += hermite_poly<T>(static_cast<int>(l)).scaled(c[l]);
        }
        return r;
    }

    HermiteSeries& add_scaled(const HermiteSeries& o, const T& s) {
        if (o.c.size() > c.size()) c.resize(o.c.size(), T(0));
        for (std::size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i] * s;
        trim();
        return *this;
    }
};

}  // namespace brw
