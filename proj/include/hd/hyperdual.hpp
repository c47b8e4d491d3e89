#pragma once

#include "hd/scalar.hpp"

#include <compare>
#include <ostream>
#include <vector>

namespace hd {

// A hyper-dual scalar: the primal value, two independent first-order
// perturbations and the mixed second-order perturbation,
// <v, d1, d2, d12>. Every primitive maps
//
//   y   = g(x)
//   dy1 = g'(x) * dx1
//   dy2 = g'(x) * dx2
//   ddy = g''(x) * dx1 * dx2 + g'(x) * ddx
//
// (and its two-argument analogue), which makes the whole composition carry
// exact directional first and second derivatives. All values are plain
// immutable data; every operation is a pure function.
//
// Two exactness properties are kept on purpose by the evaluation order
// below: swapping d1 and d2 in every input swaps them in the output and
// leaves v and d12 bitwise unchanged, and zero seeds stay exactly zero.
template <field F>
struct HyperDual {
    F v{};    // primal
    F d1{};   // first-order part along seed 1
    F d2{};   // first-order part along seed 2
    F d12{};  // mixed second-order part

    constexpr HyperDual() = default;
    constexpr HyperDual(const F& value) : v(value) {}
    constexpr HyperDual(const F& value, const F& s1, const F& s2, const F& s12)
        : v(value), d1(s1), d2(s2), d12(s12) {}
    constexpr HyperDual(double value)
        requires is_complex_field<F>
        : v(value) {}

    friend HyperDual operator+(const HyperDual& a, const HyperDual& b) {
        return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12};
    }

    friend HyperDual operator-(const HyperDual& a, const HyperDual& b) {
        return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12};
    }

    friend HyperDual operator-(const HyperDual& a) { return {-a.v, -a.d1, -a.d2, -a.d12}; }
    friend HyperDual operator+(const HyperDual& a) { return a; }

    friend HyperDual operator*(const HyperDual& a, const HyperDual& b) {
        return {a.v * b.v,
                a.v * b.d1 + b.v * a.d1,
                a.v * b.d2 + b.v * a.d2,
                a.d1 * b.d2 + b.d1 * a.d2 + a.v * b.d12 + b.v * a.d12};
    }

    // Quotient a/b through the gradient [1/b, -a/b^2] and Hessian
    // [0, -1/b^2; -1/b^2, 2a/b^3] of (a,b) -> a/b.
    friend HyperDual operator/(const HyperDual& a, const HyperDual& b) {
        detail::check_nonzero_divisor(b.v);
        const F ga = F(1) / b.v;
        const F ib2 = ga * ga;
        const F gb = -(a.v * ib2);
        const F gab = -ib2;
        const F gbb = F(2) * a.v * (ib2 * ga);
        return {a.v / b.v,
                ga * a.d1 + gb * b.d1,
                ga * a.d2 + gb * b.d2,
                gab * (a.d1 * b.d2 + b.d1 * a.d2) + gbb * (b.d1 * b.d2) + ga * a.d12 + gb * b.d12};
    }

    // Ordering and equality look at the primal part only (branching
    // convention for forward AD); the complex field is unordered.
    friend bool operator==(const HyperDual& a, const HyperDual& b)
        requires(!is_complex_field<F>)
    {
        return a.v == b.v;
    }
    friend auto operator<=>(const HyperDual& a, const HyperDual& b)
        requires(!is_complex_field<F>)
    {
        return a.v <=> b.v;
    }

    friend std::ostream& operator<<(std::ostream& os, const HyperDual& x) {
        return os << "<" << x.v << ", " << x.d1 << ", " << x.d2 << ", " << x.d12 << ">";
    }
};

using HyperDualR = HyperDual<double>;
using HyperDualC = HyperDual<std::complex<double>>;

// A point with n hyper-dual coordinates.
template <field F>
using HDPoint = std::vector<HyperDual<F>>;

template <field F>
std::partial_ordering compare(const HyperDual<F>& a, const HyperDual<F>& b) {
    if constexpr (is_complex_field<F>) {
        throw DomainError("ordering is undefined over the complex field");
    } else {
        return a.v <=> b.v;
    }
}

namespace detail {

template <field F>
HyperDual<F> hyper_unary(const F& y, const F& g1, const F& g2, const HyperDual<F>& x) {
    return {y, g1 * x.d1, g1 * x.d2, g2 * (x.d1 * x.d2) + g1 * x.d12};
}

}  // namespace detail

template <field F>
HyperDual<F> sqrt(const HyperDual<F>& x) {
    detail::check_sqrt(x.v);
    const F y = std::sqrt(x.v);
    const F g1 = F(0.5) / y;            // x^(-1/2) / 2
    const F g2 = F(-0.25) / (x.v * y);  // -x^(-3/2) / 4
    return detail::hyper_unary(y, g1, g2, x);
}

template <field F>
HyperDual<F> exp(const HyperDual<F>& x) {
    const F y = std::exp(x.v);
    return detail::hyper_unary(y, y, y, x);
}

template <field F>
HyperDual<F> log(const HyperDual<F>& x) {
    detail::check_log(x.v);
    const F y = std::log(x.v);
    const F g1 = F(1) / x.v;
    const F g2 = -(g1 * g1);
    return detail::hyper_unary(y, g1, g2, x);
}

template <field F>
HyperDual<F> sin(const HyperDual<F>& x) {
    const F y = detail::sin_kernel(x.v);
    const F g1 = detail::cos_kernel(x.v);
    return detail::hyper_unary(y, g1, -y, x);
}

template <field F>
HyperDual<F> cos(const HyperDual<F>& x) {
    const F y = detail::cos_kernel(x.v);
    const F g1 = -detail::sin_kernel(x.v);
    return detail::hyper_unary(y, g1, -y, x);
}

template <field F>
HyperDual<F> tan(const HyperDual<F>& x) {
    const F c = std::cos(x.v);
    detail::check_pole(c, "tan");
    const F y = std::tan(x.v);
    const F g1 = F(1) + y * y;     // sec^2
    const F g2 = F(2) * y * g1;
    return detail::hyper_unary(y, g1, g2, x);
}

template <field F>
HyperDual<F> sinh(const HyperDual<F>& x) {
    const F y = std::sinh(x.v);
    const F g1 = std::cosh(x.v);
    return detail::hyper_unary(y, g1, y, x);
}

template <field F>
HyperDual<F> cosh(const HyperDual<F>& x) {
    const F y = std::cosh(x.v);
    const F g1 = std::sinh(x.v);
    return detail::hyper_unary(y, g1, y, x);
}

template <field F>
HyperDual<F> tanh(const HyperDual<F>& x) {
    const F c = std::cosh(x.v);
    detail::check_pole(c, "tanh");
    const F y = std::tanh(x.v);
    const F g1 = F(1) - y * y;     // sech^2
    const F g2 = F(-2) * y * g1;
    return detail::hyper_unary(y, g1, g2, x);
}

template <field F>
HyperDual<F> asin(const HyperDual<F>& x) {
    detail::check_asin_acos(x.v, "asin");
    const F y = std::asin(x.v);
    const F w = F(1) - x.v * x.v;
    const F r = std::sqrt(w);
    const F g1 = F(1) / r;
    const F g2 = x.v / (w * r);
    return detail::hyper_unary(y, g1, g2, x);
}

template <field F>
HyperDual<F> acos(const HyperDual<F>& x) {
    detail::check_asin_acos(x.v, "acos");
    const F y = std::acos(x.v);
    const F w = F(1) - x.v * x.v;
    const F r = std::sqrt(w);
    const F g1 = F(-1) / r;
    const F g2 = -(x.v / (w * r));
    return detail::hyper_unary(y, g1, g2, x);
}

template <field F>
HyperDual<F> atan(const HyperDual<F>& x) {
    const F w = F(1) + x.v * x.v;
    detail::check_atan(w);
    const F y = std::atan(x.v);
    const F g1 = F(1) / w;
    const F g2 = F(-2) * x.v / (w * w);
    return detail::hyper_unary(y, g1, g2, x);
}

namespace detail {

// The integer-power fast path is the binary-exponentiation chain run on the
// hyper-dual type itself: the same loop as ipow, with every product and the
// final reciprocal going through the overloaded rules. Derivatives come out
// of the product/quotient rules instead of v*u^(v-1) log-based coefficients,
// which keeps negative (real) and branch-cut (complex) bases differentiable
// and makes pow(a, 2) bitwise identical to a*a.
template <field F>
HyperDual<F> hd_ipow(HyperDual<F> base, long long m) {
    if (m == 0) return HyperDual<F>{F(1)};
    const bool invert = m < 0;
    auto e = invert ? 0ull - static_cast<unsigned long long>(m)
                    : static_cast<unsigned long long>(m);
    HyperDual<F> acc;
    bool have = false;
    while (e != 0) {
        if (e & 1ull) {
            acc = have ? acc * base : base;
            have = true;
        }
        e >>= 1;
        if (e != 0) base = base * base;
    }
    return invert ? HyperDual<F>{F(1)} / acc : acc;
}

}  // namespace detail

// u^v. A perturbation-free integral exponent takes the multiplication-chain
// fast path, which never touches log(u). The general path uses
//   g_u = v u^(v-1),      g_v = u^v ln u,
//   g_uu = v(v-1) u^(v-2), g_uv = u^(v-1)(1 + v ln u), g_vv = u^v (ln u)^2.
template <field F>
HyperDual<F> pow(const HyperDual<F>& u, const HyperDual<F>& v) {
    long long m = 0;
    if (v.d1 == F{} && v.d2 == F{} && v.d12 == F{} && detail::integral_value(v.v, m)) {
        if (strict_domain() && m < 0 && u.v == F{})
            detail::domain_fail("negative integer power of a zero primal");
        return detail::hd_ipow(u, m);
    }
    detail::check_pow_general(u.v);
    const F y = std::pow(u.v, v.v);
    const F lnu = std::log(u.v);
    const F um1 = std::pow(u.v, v.v - F(1));
    const F gu = v.v * um1;
    const F gv = y * lnu;
    const F guu = v.v * (v.v - F(1)) * std::pow(u.v, v.v - F(2));
    const F guv = um1 * (F(1) + v.v * lnu);
    const F gvv = gv * lnu;
    return {y,
            gu * u.d1 + gv * v.d1,
            gu * u.d2 + gv * v.d2,
            guu * (u.d1 * u.d2) + guv * (u.d1 * v.d2 + v.d1 * u.d2) + gvv * (v.d1 * v.d2) +
                gu * u.d12 + gv * v.d12};
}

}  // namespace hd
