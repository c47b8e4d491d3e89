#pragma once

#include "hd/drivers.hpp"
#include "hd/dual.hpp"
#include "hd/expr.hpp"
#include "hd/hyperdual.hpp"
#include "hd/oracle.hpp"

#include <atomic>
#include <bit>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace support {

using Complex = std::complex<double>;

// --- bit-level comparisons ---------------------------------------------

// Monotone mapping of doubles onto unsigned integers; adjacent doubles map
// to adjacent keys, +0 and -0 to the same key.
inline std::uint64_t ulp_key(double x) {
    const auto u = std::bit_cast<std::uint64_t>(x);
    return (u >> 63) ? (0ull - u) : (u | 0x8000000000000000ull);
}

inline std::uint64_t ulp_distance(double a, double b) {
    const std::uint64_t ka = ulp_key(a), kb = ulp_key(b);
    return ka > kb ? ka - kb : kb - ka;
}

inline std::uint64_t ulp_distance(const Complex& a, const Complex& b) {
    return std::max(ulp_distance(a.real(), b.real()), ulp_distance(a.imag(), b.imag()));
}

template <hd::field F>
bool hd_bits_equal(const hd::HyperDual<F>& a, const hd::HyperDual<F>& b) {
    return hd::bits_equal(a.v, b.v) && hd::bits_equal(a.d1, b.d1) &&
           hd::bits_equal(a.d2, b.d2) && hd::bits_equal(a.d12, b.d12);
}

// --- guarded relative deviation ----------------------------------------

// |a-b| / max(|a|, |b|, floor). With floor = 0 this is the plain relative
// deviation; a positive floor turns the check into an absolute one for
// entries that are smaller than the reference noise.
inline double rel_dev(double a, double b, double floor = 0.0) {
    const double m = std::max({std::abs(a), std::abs(b), floor});
    return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

inline double rel_dev(const Complex& a, const Complex& b, double floor = 0.0) {
    const double m = std::max({std::abs(a), std::abs(b), floor});
    return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

// --- randomness ----------------------------------------------------------

struct Rng {
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    Complex uniform_complex(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen);
    }
    bool chance(double p) { return std::bernoulli_distribution(p)(gen); }

    std::mt19937_64 gen;
};

template <hd::field F>
F random_scalar(Rng& rng, double lo, double hi) {
    if constexpr (hd::is_complex_field<F>) {
        return rng.uniform_complex(lo, hi);
    } else {
        return rng.uniform(lo, hi);
    }
}

template <hd::field F>
hd::HyperDual<F> random_hyperdual(Rng& rng, double primal_lo, double primal_hi) {
    return {random_scalar<F>(rng, primal_lo, primal_hi), random_scalar<F>(rng, -2.0, 2.0),
            random_scalar<F>(rng, -2.0, 2.0), random_scalar<F>(rng, -2.0, 2.0)};
}

// --- instrumentation -----------------------------------------------------

template <hd::field F>
hd::DiffFunction<F> counted(hd::DiffFunction<F> f, std::shared_ptr<std::atomic<std::size_t>> n) {
    auto inner = std::move(f.fn);
    return {[inner, n](std::span<const hd::HyperDual<F>> p) {
                n->fetch_add(1, std::memory_order_relaxed);
                return inner(p);
            },
            f.arity};
}

// --- shared expression corpus -------------------------------------------

struct CorpusEntry {
    const char* expression;
    std::vector<double> point;  // real evaluation point with margin inside the domain
};

// Polynomials, rationals and transcendental compositions; all real-valued
// on real inputs, all with finite-difference margin around the points.
inline const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> entries = {
        {"x1*x2", {2.0, 3.0}},
        {"x1 + x2^2*x3 - x1/x3 + x2^x1", {1.5, 2.3, 3.1}},
        {"(x1+sqrt(x1))/sqrt(x1)", {4.0}},
        {"sin(x1)*cos(x2) + exp(x1*x2)", {0.7, 0.4}},
        {"log(x1+x2)*tanh(x1)", {1.2, 0.8}},
        {"x1^3 - 2*x1*x2 + x2^2", {1.1, 0.9}},
        {"atan(x1/x2)", {0.9, 1.3}},
        {"sqrt(x1^2 + x2^2 + x3^2)", {0.6, 0.8, 1.1}},
        {"exp(sin(x1) + cos(x2))", {1.0, 0.5}},
        {"asin(x1/2)*acos(x2/3)", {0.8, 1.2}},
        {"sinh(x1)*cosh(x2)/(1 + x1^2)", {0.4, 0.7}},
        {"tan(x1)/x2 + x2*pi", {0.5, 1.7}},
    };
    return entries;
}

inline hd::expr::ExprAst parse_or_die(const char* text) {
    auto result = hd::expr::parse(text);
    if (!result) throw std::logic_error(std::string("corpus expression failed to parse: ") + text);
    return *result.ast;
}

// --- random expression generator ----------------------------------------

// Random expression text over the primitive set, depth-bounded. Domain
// hazards (sqrt/log of negatives, poles, ...) are intentional: callers
// reject samples whose evaluation or finite-difference stencil leaves the
// domain.
inline std::string random_expression(Rng& rng, std::size_t arity, std::size_t depth) {
    if (depth == 0 || rng.chance(0.22)) {
        if (rng.chance(0.65)) return "x" + std::to_string(1 + rng.index(arity));
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", rng.uniform(0.3, 2.5));
        return buf;
    }
    switch (rng.index(10)) {
        case 0: return "(" + random_expression(rng, arity, depth - 1) + " + " +
                       random_expression(rng, arity, depth - 1) + ")";
        case 1: return "(" + random_expression(rng, arity, depth - 1) + " - " +
                       random_expression(rng, arity, depth - 1) + ")";
        case 2: return random_expression(rng, arity, depth - 1) + "*" +
                       "(" + random_expression(rng, arity, depth - 1) + ")";
        case 3: return "(" + random_expression(rng, arity, depth - 1) + ")/(" +
                       random_expression(rng, arity, depth - 1) + ")";
        case 4: return "-(" + random_expression(rng, arity, depth - 1) + ")";
        case 5: return "(" + random_expression(rng, arity, depth - 1) + ")^" +
                       (rng.chance(0.5) ? "2" : "3");
        case 6: {
            static const char* safe[] = {"sin", "cos", "exp", "tanh", "atan", "sinh"};
            return std::string(safe[rng.index(6)]) + "(" +
                   random_expression(rng, arity, depth - 1) + ")";
        }
        case 7: {
            static const char* risky[] = {"sqrt", "log", "asin", "acos", "tan", "cosh"};
            return std::string(risky[rng.index(6)]) + "(" +
                   random_expression(rng, arity, depth - 1) + ")";
        }
        case 8: return "(" + random_expression(rng, arity, depth - 1) + " + " +
                       random_expression(rng, arity, depth - 1) + ")";
        default: return "(" + random_expression(rng, arity, depth - 1) + ")*(" +
                        random_expression(rng, arity, depth - 1) + ")";
    }
}

}  // namespace support
