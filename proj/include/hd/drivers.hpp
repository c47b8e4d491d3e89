#pragma once

#include "hd/hyperdual.hpp"

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

// drivers: extract the full Jacobian row and the symmetric Hessian of a
// user function by repeated hyper-dual calls with Cartesian unit-vector
// seeds. A call with seeds <x, e_j, e_k, 0> returns d1 = df/dx_j and
// d12 = d2f/dx_j dx_k, so n calls cover the Jacobian and n(n+1)/2 calls
// (j = 1..n, k = 1..j, diagonal included) cover the Hessian.

namespace hd {

// A differentiable user function: a pure mapping from a hyper-dual point to
// a hyper-dual value, with declared arity. Purity matters: the drivers
// cross-check the primal part of every call and reject functions whose
// value depends on anything but the point.
template <field F>
struct DiffFunction {
    std::function<HyperDual<F>(std::span<const HyperDual<F>>)> fn;
    std::size_t arity = 0;
};

template <field F>
struct DerivativeReport {
    F value{};
    std::vector<F> jacobian;              // row vector, length n
    std::vector<std::vector<F>> hessian;  // n x n, bitwise symmetric; empty on jacobian-only runs
    std::size_t invocations = 0;
};

struct DriverOptions {
    bool parallel = false;  // evaluate seed points concurrently (f must be pure anyway)
    unsigned threads = 0;   // 0 = hardware concurrency
};

namespace detail {

inline constexpr std::size_t no_seed = static_cast<std::size_t>(-1);

struct SeedPair {
    std::size_t j;
    std::size_t k;  // no_seed leaves the second perturbation zero
};

template <field F>
HDPoint<F> seeded_point(std::span<const F> x, const SeedPair& s) {
    HDPoint<F> p;
    p.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        p.emplace_back(x[i], i == s.j ? F(1) : F(0), (s.k != no_seed && i == s.k) ? F(1) : F(0),
                       F(0));
    return p;
}

template <field F>
std::vector<HyperDual<F>> run_seed_calls(const DiffFunction<F>& f, std::span<const F> x,
                                         std::span<const SeedPair> seeds,
                                         const DriverOptions& opts) {
    const std::size_t m = seeds.size();
    std::vector<HyperDual<F>> out(m);

    if (!opts.parallel || m < 2) {
        for (std::size_t i = 0; i < m; ++i) out[i] = f.fn(seeded_point(x, seeds[i]));
    } else {
        const DomainMode mode = domain_mode();  // workers inherit the caller's mode
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(m);
        unsigned nt = opts.threads != 0 ? opts.threads : std::thread::hardware_concurrency();
        if (nt == 0) nt = 1;
        if (nt > m) nt = static_cast<unsigned>(m);
        {
            std::vector<std::jthread> pool;
            pool.reserve(nt);
            for (unsigned t = 0; t < nt; ++t) {
                pool.emplace_back([&] {
                    set_domain_mode(mode);
                    for (;;) {
                        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                        if (i >= m) return;
                        try {
                            out[i] = f.fn(seeded_point(x, seeds[i]));
                        } catch (...) {
                            errors[i] = std::current_exception();
                        }
                    }
                });
            }
        }
        // rethrow the error of the lowest seed index, independent of schedule
        for (std::size_t i = 0; i < m; ++i)
            if (errors[i]) std::rethrow_exception(errors[i]);
    }

    for (std::size_t i = 1; i < m; ++i)
        if (!bits_equal(out[i].v, out[0].v))
            throw std::logic_error(
                "DiffFunction is not pure: primal parts differ across seed calls");
    return out;
}

template <field F>
void check_arity(const DiffFunction<F>& f, std::span<const F> x) {
    if (f.arity == 0) throw ArityMismatch("DiffFunction arity must be at least 1");
    if (x.size() != f.arity)
        throw ArityMismatch("point length " + std::to_string(x.size()) +
                            " does not match arity " + std::to_string(f.arity));
}

}  // namespace detail

// Jacobian row in exactly n calls, seeds <x, e_j, 0, 0>.
template <field F>
DerivativeReport<F> jacobian(const DiffFunction<F>& f, std::span<const F> x,
                             const DriverOptions& opts = {}) {
    detail::check_arity(f, x);
    const std::size_t n = f.arity;
    std::vector<detail::SeedPair> seeds(n);
    for (std::size_t j = 0; j < n; ++j) seeds[j] = {j, detail::no_seed};
    const auto calls = detail::run_seed_calls(f, x, seeds, opts);

    DerivativeReport<F> report;
    report.value = calls[0].v;
    report.jacobian.resize(n);
    for (std::size_t j = 0; j < n; ++j) report.jacobian[j] = calls[j].d1;
    report.invocations = n;
    return report;
}

// Value, Jacobian and Hessian in exactly n(n+1)/2 calls, seeds
// <x, e_j, e_k, 0> for j = 1..n, k = 1..j. Entry (j,k) is read from d12 of
// call (j,k) and mirrored, never recomputed, so the matrix is bitwise
// symmetric. The Jacobian entry j is read from the first call whose first
// seed is e_j.
template <field F>
DerivativeReport<F> hessian(const DiffFunction<F>& f, std::span<const F> x,
                            const DriverOptions& opts = {}) {
    detail::check_arity(f, x);
    const std::size_t n = f.arity;
    std::vector<detail::SeedPair> seeds;
    seeds.reserve(n * (n + 1) / 2);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k <= j; ++k) seeds.push_back({j, k});
    const auto calls = detail::run_seed_calls(f, x, seeds, opts);

    DerivativeReport<F> report;
    report.value = calls[0].v;
    report.jacobian.resize(n);
    report.hessian.assign(n, std::vector<F>(n));
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k <= j; ++k, ++idx) {
            if (k == 0) report.jacobian[j] = calls[idx].d1;
            report.hessian[j][k] = calls[idx].d12;
            report.hessian[k][j] = calls[idx].d12;
        }
    }
    report.invocations = seeds.size();
    return report;
}

// Single pass producing both outputs; same seeding and cost as hessian().
template <field F>
DerivativeReport<F> jacobian_and_hessian(const DiffFunction<F>& f, std::span<const F> x,
                                         const DriverOptions& opts = {}) {
    return hessian(f, x, opts);
}

// vector overloads (template deduction does not see vector -> span)
template <field F>
DerivativeReport<F> jacobian(const DiffFunction<F>& f, const std::vector<F>& x,
                             const DriverOptions& opts = {}) {
    return jacobian(f, std::span<const F>(x), opts);
}
template <field F>
DerivativeReport<F> hessian(const DiffFunction<F>& f, const std::vector<F>& x,
                            const DriverOptions& opts = {}) {
    return hessian(f, std::span<const F>(x), opts);
}
template <field F>
DerivativeReport<F> jacobian_and_hessian(const DiffFunction<F>& f, const std::vector<F>& x,
                                         const DriverOptions& opts = {}) {
    return hessian(f, std::span<const F>(x), opts);
}

}  // namespace hd
