#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hd {

// Thrown in strict mode when a primal value leaves the open domain of a
// primitive. Boundary points are excluded on purpose: the derivative
// formulas contain negative powers that are singular there.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Thrown when the length of a point does not match the declared arity.
class ArityMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

template <class T> inline constexpr bool is_complex_field = false;
template <class T> inline constexpr bool is_complex_field<std::complex<T>> = true;

// The base field: real or complex double precision.
template <class F>
concept field = std::same_as<F, double> || std::same_as<F, std::complex<double>>;

// Strict mode (the default) raises DomainError at singular primals;
// permissive mode lets IEEE NaN/Inf propagate instead. The flag is
// thread-local so concurrent evaluations can run under different modes.
enum class DomainMode { strict, permissive };

namespace detail {
inline thread_local DomainMode domain_mode_flag = DomainMode::strict;
}

inline DomainMode domain_mode() noexcept { return detail::domain_mode_flag; }
inline void set_domain_mode(DomainMode m) noexcept { detail::domain_mode_flag = m; }
inline bool strict_domain() noexcept { return domain_mode() == DomainMode::strict; }

class DomainModeScope {
public:
    explicit DomainModeScope(DomainMode m) : saved_(domain_mode()) { set_domain_mode(m); }
    ~DomainModeScope() { set_domain_mode(saved_); }
    DomainModeScope(const DomainModeScope&) = delete;
    DomainModeScope& operator=(const DomainModeScope&) = delete;

private:
    DomainMode saved_;
};

inline double re_part(double x) noexcept { return x; }
inline double im_part(double) noexcept { return 0.0; }
inline double re_part(const std::complex<double>& x) noexcept { return x.real(); }
inline double im_part(const std::complex<double>& x) noexcept { return x.imag(); }

inline double abs_of(double x) noexcept { return std::abs(x); }
inline double abs_of(const std::complex<double>& x) noexcept { return std::abs(x); }

inline bool finite_value(double x) noexcept { return std::isfinite(x); }
inline bool finite_value(const std::complex<double>& x) noexcept {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
}

inline bool bits_equal(double a, double b) noexcept {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}
inline bool bits_equal(const std::complex<double>& a, const std::complex<double>& b) noexcept {
    return bits_equal(a.real(), b.real()) && bits_equal(a.imag(), b.imag());
}

// Narrowing a complex literal into a field element; the real field rejects
// literals that carry an imaginary part.
template <field F>
F from_complex_literal(const std::complex<double>& c) {
    if constexpr (is_complex_field<F>) {
        return c;
    } else {
        if (c.imag() != 0.0) throw DomainError("complex literal in a real-field evaluation");
        return c.real();
    }
}

namespace detail {

[[noreturn]] inline void domain_fail(const std::string& what) { throw DomainError(what); }

// Perturbation-free integral exponents take a dedicated power path; the
// general u^v rule needs log(u), which does not exist for u <= 0 real even
// when the exponent is an exact integer constant.
inline bool integral_value(double x, long long& out) noexcept {
    if (!std::isfinite(x) || x != std::trunc(x) || std::abs(x) > 9.0e15) return false;
    out = static_cast<long long>(x);
    return true;
}
inline bool integral_value(const std::complex<double>& x, long long& out) noexcept {
    return x.imag() == 0.0 && integral_value(x.real(), out);
}

// u^m by binary exponentiation. A multiplication chain handles bases the
// exp(v*log(u)) route cannot (negative reals, the complex branch cut) and
// is what the AD types use for integral exponents, so plain and AD primals
// agree bitwise. The first set bit is assigned, not multiplied into 1, so
// u^2 is bitwise u*u.
template <field F>
F ipow(F base, long long m) {
    if (m == 0) return F(1);
    const bool invert = m < 0;
    auto e = invert ? 0ull - static_cast<unsigned long long>(m)
                    : static_cast<unsigned long long>(m);
    F acc{};
    bool have = false;
    while (e != 0) {
        if (e & 1ull) {
            acc = have ? acc * base : base;
            have = true;
        }
        e >>= 1;
        if (e != 0) base = base * base;
    }
    return invert ? F(1) / acc : acc;
}

template <field F>
F field_pow_int(const F& u, long long m) {
    return ipow<F>(u, m);
}

template <field F>
void check_nonzero_divisor(const F& x) {
    if (strict_domain() && x == F{}) domain_fail("division by a zero primal");
}

template <field F>
void check_sqrt(const F& x) {
    if (!strict_domain()) return;
    if constexpr (is_complex_field<F>) {
        if (x == F{}) domain_fail("sqrt of a zero primal");
    } else {
        if (!(x > 0.0)) domain_fail("sqrt requires a positive primal over the real field");
    }
}

template <field F>
void check_log(const F& x) {
    if (!strict_domain()) return;
    if constexpr (is_complex_field<F>) {
        if (x == F{}) domain_fail("log of a zero primal");
    } else {
        if (!(x > 0.0)) domain_fail("log requires a positive primal over the real field");
    }
}

template <field F>
void check_asin_acos(const F& x, const char* name) {
    if (!strict_domain()) return;
    if constexpr (is_complex_field<F>) {
        if (x == F(1.0) || x == F(-1.0))
            domain_fail(std::string(name) + " derivative is singular at a primal of +/-1");
    } else {
        if (!(std::abs(x) < 1.0))
            domain_fail(std::string(name) + " requires |primal| < 1 over the real field");
    }
}

// c is cos(x) (resp. cosh(x)); a pole of tan/tanh shows up as c == 0.
template <field F>
void check_pole(const F& c, const char* name) {
    if (strict_domain() && c == F{}) domain_fail(std::string(name) + " at a pole");
}

template <field F>
void check_atan(const F& w) {  // w = 1 + x^2
    if (strict_domain() && w == F{}) domain_fail("atan derivative is singular at a primal of +/-i");
}

template <field F>
void check_pow_general(const F& u) {
    if (!strict_domain()) return;
    if constexpr (is_complex_field<F>) {
        if (u == F{}) domain_fail("pow requires a nonzero base for non-integer or perturbed exponents");
    } else {
        if (!(u > 0.0)) domain_fail("pow requires a positive base for non-integer or perturbed exponents");
    }
}

// GCC fuses paired sin/cos calls on one argument into a single sincos call,
// whose results can differ from the standalone functions by an ulp. The
// derivative rules always evaluate such pairs, so sin/cos go through these
// non-inlined kernels everywhere (including plain evaluation); that keeps
// the primal parts of all scalar instantiations bitwise identical.
template <field F>
[[gnu::noinline]] F sin_kernel(const F& x) {
    return std::sin(x);
}
template <field F>
[[gnu::noinline]] F cos_kernel(const F& x) {
    return std::cos(x);
}

}  // namespace detail

// Power over the plain field. Integral perturbation-free exponents route
// through the same chain the AD fast path uses, so plain and AD evaluations
// of one expression agree bitwise in the primal part.
template <field F>
F field_pow(const F& u, const F& v) {
    long long m = 0;
    if (detail::integral_value(v, m)) return detail::field_pow_int<F>(u, m);
    return std::pow(u, v);
}

}  // namespace hd
