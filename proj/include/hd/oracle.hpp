#pragma once

#include "hd/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

// Independent derivative references used to cross-check the hyper-dual
// arithmetic and the drivers. Finite differences are deliberately not a
// product feature: they trade truncation against roundoff and lose digits
// either way, which is exactly what the exact propagation avoids.

namespace hd {

// Raised when the complex-step estimate is requested for a function that is
// not real-valued on real inputs.
class NotApplicable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Central-difference step sizes. Defaults balance truncation against
// roundoff: eps^(1/3) for first differences, eps^(1/4) for second ones.
struct FDConfig {
    double h1 = std::cbrt(std::numeric_limits<double>::epsilon());
    double h2 = std::sqrt(std::sqrt(std::numeric_limits<double>::epsilon()));
    bool relative_step = true;  // scale the step by max(1, |x_j|)
};

template <field F>
using PlainFunction = std::function<F(std::span<const F>)>;

namespace detail {

template <field F>
double fd_step(double h, const F& xj, bool relative) {
    return relative ? h * std::max(1.0, abs_of(xj)) : h;
}

inline void check_fd_step(double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
}

}  // namespace detail

// Central first differences, (f(x+h e_j) - f(x-h e_j)) / (2h). Over the
// complex field each coordinate is perturbed along the real and the
// imaginary axis separately and the two estimates are averaged; for the
// holomorphic primitive set both estimate the same complex derivative.
template <field F>
std::vector<F> fd_jacobian(const PlainFunction<F>& f, std::span<const F> x,
                           const FDConfig& cfg = {}) {
    detail::check_fd_step(cfg.h1);
    const std::size_t n = x.size();
    std::vector<F> xs(x.begin(), x.end());
    std::vector<F> jac(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double h = detail::fd_step(cfg.h1, x[j], cfg.relative_step);
        xs[j] = x[j] + F(h);
        const F fp = f(xs);
        xs[j] = x[j] - F(h);
        const F fm = f(xs);
        F est = (fp - fm) / F(2.0 * h);
        if constexpr (is_complex_field<F>) {
            const F ih(0.0, h);
            xs[j] = x[j] + ih;
            const F fpi = f(xs);
            xs[j] = x[j] - ih;
            const F fmi = f(xs);
            const F est_im = (fpi - fmi) / (F(2.0) * ih);
            est = (est + est_im) * F(0.5);
        }
        xs[j] = x[j];
        jac[j] = est;
    }
    return jac;
}

namespace detail {

// Four-point cross stencil for one off-diagonal entry.
template <field F>
F fd_cross(const PlainFunction<F>& f, std::vector<F>& xs, std::span<const F> x, std::size_t j,
           std::size_t k, const F& hj, const F& hk) {
    xs[j] = x[j] + hj;
    xs[k] = x[k] + hk;
    const F fpp = f(xs);
    xs[k] = x[k] - hk;
    const F fpm = f(xs);
    xs[j] = x[j] - hj;
    const F fmm = f(xs);
    xs[k] = x[k] + hk;
    const F fmp = f(xs);
    xs[j] = x[j];
    xs[k] = x[k];
    return (fpp - fpm - fmp + fmm) / (F(4) * hj * hk);
}

template <field F>
F fd_diag(const PlainFunction<F>& f, std::vector<F>& xs, std::span<const F> x, const F& f0,
          std::size_t j, const F& hj) {
    xs[j] = x[j] + hj;
    const F fp = f(xs);
    xs[j] = x[j] - hj;
    const F fm = f(xs);
    xs[j] = x[j];
    return (fp - F(2) * f0 + fm) / (hj * hj);
}

}  // namespace detail

// Second differences: (f(x+h)-2f(x)+f(x-h))/h^2 on the diagonal, the
// four-point cross stencil off it. The matrix is symmetric by construction
// (one stencil per unordered pair, mirrored).
template <field F>
std::vector<std::vector<F>> fd_hessian(const PlainFunction<F>& f, std::span<const F> x,
                                       const FDConfig& cfg = {}) {
    detail::check_fd_step(cfg.h2);
    const std::size_t n = x.size();
    std::vector<F> xs(x.begin(), x.end());
    std::vector<std::vector<F>> hess(n, std::vector<F>(n));
    const F f0 = f(xs);
    std::vector<double> steps(n);
    for (std::size_t j = 0; j < n; ++j) steps[j] = detail::fd_step(cfg.h2, x[j], cfg.relative_step);

    for (std::size_t j = 0; j < n; ++j) {
        F est = detail::fd_diag(f, xs, x, f0, j, F(steps[j]));
        if constexpr (is_complex_field<F>) {
            // the imaginary-axis stencil divides by (i h)^2 itself, so the
            // two estimates average directly
            est = (est + detail::fd_diag(f, xs, x, f0, j, F(0.0, steps[j]))) * F(0.5);
        }
        hess[j][j] = est;
        for (std::size_t k = 0; k < j; ++k) {
            F cross = detail::fd_cross(f, xs, x, j, k, F(steps[j]), F(steps[k]));
            if constexpr (is_complex_field<F>) {
                cross = (cross + detail::fd_cross(f, xs, x, j, k, F(0.0, steps[j]),
                                                  F(0.0, steps[k]))) *
                        F(0.5);
            }
            hess[j][k] = cross;
            hess[k][j] = cross;
        }
    }
    return hess;
}

// Complex-step first derivatives, Im f(x + ih e_j) / h. Cancellation-free,
// but only meaningful for functions that are real-analytic and real-valued
// on real inputs.
inline std::vector<double> complex_step_jacobian(
    const PlainFunction<std::complex<double>>& f, std::span<const double> x, double h = 1e-20) {
    if (!(h > 0.0)) throw std::invalid_argument("complex-step h must be positive");
    std::vector<std::complex<double>> z(x.begin(), x.end());
    if (im_part(f(z)) != 0.0)
        throw NotApplicable("function is not real-valued on real inputs");
    std::vector<double> jac(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        z[j] = {x[j], h};
        jac[j] = f(z).imag() / h;
        z[j] = x[j];
    }
    return jac;
}

}  // namespace hd
