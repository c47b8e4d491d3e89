#pragma once

#include "hd/scalar.hpp"

#include <compare>
#include <ostream>

namespace hd {

// A dual scalar: primal value plus one first-order perturbation. The
// perturbation formulas are the first-order slice of the hyper-dual ones,
// computed with the same expressions in the same order, so a Dual run and
// the d1 part of a HyperDual run agree to the last bit.
template <field F>
struct Dual {
    F v{};  // primal
    F d{};  // first-order part

    constexpr Dual() = default;
    constexpr Dual(const F& value) : v(value) {}
    constexpr Dual(const F& value, const F& seed) : v(value), d(seed) {}
    constexpr Dual(double value)
        requires is_complex_field<F>
        : v(value) {}

    friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
    friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
    friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
    friend Dual operator+(const Dual& a) { return a; }

    friend Dual operator*(const Dual& a, const Dual& b) {
        return {a.v * b.v, a.v * b.d + b.v * a.d};
    }

    friend Dual operator/(const Dual& a, const Dual& b) {
        detail::check_nonzero_divisor(b.v);
        const F ga = F(1) / b.v;      // d(a/b)/da = 1/b
        const F ib2 = ga * ga;
        const F gb = -(a.v * ib2);    // d(a/b)/db = -a/b^2
        return {a.v / b.v, ga * a.d + gb * b.d};
    }

    // Ordering and equality look at the primal part only (branching
    // convention for forward AD); the complex field is unordered.
    friend bool operator==(const Dual& a, const Dual& b)
        requires(!is_complex_field<F>)
    {
        return a.v == b.v;
    }
    friend auto operator<=>(const Dual& a, const Dual& b)
        requires(!is_complex_field<F>)
    {
        return a.v <=> b.v;
    }

    friend std::ostream& operator<<(std::ostream& os, const Dual& x) {
        return os << "<" << x.v << ", " << x.d << ">";
    }
};

using DualR = Dual<double>;
using DualC = Dual<std::complex<double>>;

template <field F>
std::partial_ordering compare(const Dual<F>& a, const Dual<F>& b) {
    if constexpr (is_complex_field<F>) {
        throw DomainError("ordering is undefined over the complex field");
    } else {
        return a.v <=> b.v;
    }
}

namespace detail {
template <field F>
Dual<F> dual_unary(const F& y, const F& g1, const Dual<F>& x) {
    return {y, g1 * x.d};
}
}  // namespace detail

template <field F>
Dual<F> sqrt(const Dual<F>& x) {
    detail::check_sqrt(x.v);
    const F y = std::sqrt(x.v);
    const F g1 = F(0.5) / y;
    return detail::dual_unary(y, g1, x);
}

template <field F>
Dual<F> exp(const Dual<F>& x) {
    const F y = std::exp(x.v);
    return detail::dual_unary(y, y, x);
}

template <field F>
Dual<F> log(const Dual<F>& x) {
    detail::check_log(x.v);
    const F y = std::log(x.v);
    const F g1 = F(1) / x.v;
    return detail::dual_unary(y, g1, x);
}

template <field F>
Dual<F> sin(const Dual<F>& x) {
    const F y = detail::sin_kernel(x.v);
    const F g1 = detail::cos_kernel(x.v);
    return detail::dual_unary(y, g1, x);
}

template <field F>
Dual<F> cos(const Dual<F>& x) {
    const F y = detail::cos_kernel(x.v);
    const F g1 = -detail::sin_kernel(x.v);
    return detail::dual_unary(y, g1, x);
}

template <field F>
Dual<F> tan(const Dual<F>& x) {
    const F c = std::cos(x.v);
    detail::check_pole(c, "tan");
    const F y = std::tan(x.v);
    const F g1 = F(1) + y * y;
    return detail::dual_unary(y, g1, x);
}

template <field F>
Dual<F> sinh(const Dual<F>& x) {
    const F y = std::sinh(x.v);
    const F g1 = std::cosh(x.v);
    return detail::dual_unary(y, g1, x);
}

template <field F>
Dual<F> cosh(const Dual<F>& x) {
    const F y = std::cosh(x.v);
    const F g1 = std::sinh(x.v);
    return detail::dual_unary(y, g1, x);
}

template <field F>
Dual<F> tanh(const Dual<F>& x) {
    const F c = std::cosh(x.v);
    detail::check_pole(c, "tanh");
    const F y = std::tanh(x.v);
    const F g1 = F(1) - y * y;
    return detail::dual_unary(y, g1, x);
}

template <field F>
Dual<F> asin(const Dual<F>& x) {
    detail::check_asin_acos(x.v, "asin");
    const F y = std::asin(x.v);
    const F r = std::sqrt(F(1) - x.v * x.v);
    const F g1 = F(1) / r;
    return detail::dual_unary(y, g1, x);
}

template <field F>
Dual<F> acos(const Dual<F>& x) {
    detail::check_asin_acos(x.v, "acos");
    const F y = std::acos(x.v);
    const F r = std::sqrt(F(1) - x.v * x.v);
    const F g1 = F(-1) / r;
    return detail::dual_unary(y, g1, x);
}

template <field F>
Dual<F> atan(const Dual<F>& x) {
    const F w = F(1) + x.v * x.v;
    detail::check_atan(w);
    const F y = std::atan(x.v);
    const F g1 = F(1) / w;
    return detail::dual_unary(y, g1, x);
}

namespace detail {

// same multiplication chain as the hyper-dual integer fast path
template <field F>
Dual<F> dual_ipow(Dual<F> base, long long m) {
    if (m == 0) return Dual<F>{F(1)};
    const bool invert = m < 0;
    auto e = invert ? 0ull - static_cast<unsigned long long>(m)
                    : static_cast<unsigned long long>(m);
    Dual<F> acc;
    bool have = false;
    while (e != 0) {
        if (e & 1ull) {
            acc = have ? acc * base : base;
            have = true;
        }
        e >>= 1;
        if (e != 0) base = base * base;
    }
    return invert ? Dual<F>{F(1)} / acc : acc;
}

}  // namespace detail

template <field F>
Dual<F> pow(const Dual<F>& u, const Dual<F>& v) {
    long long m = 0;
    if (v.d == F{} && detail::integral_value(v.v, m)) {
        if (strict_domain() && m < 0 && u.v == F{})
            detail::domain_fail("negative integer power of a zero primal");
        return detail::dual_ipow(u, m);
    }
    detail::check_pow_general(u.v);
    const F y = std::pow(u.v, v.v);
    const F lnu = std::log(u.v);
    const F um1 = std::pow(u.v, v.v - F(1));
    const F gu = v.v * um1;
    const F gv = y * lnu;
    return {y, gu * u.d + gv * v.d};
}

}  // namespace hd
