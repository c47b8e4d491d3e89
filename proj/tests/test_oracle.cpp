#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <cmath>

using namespace hd;
using support::Complex;
using support::rel_dev;

namespace {

// (x + sqrt x)/sqrt x, which simplifies to sqrt(x) + 1
double foo_plain(double x) { return (x + std::sqrt(x)) / std::sqrt(x); }

const PlainFunction<double> foo_fn = [](std::span<const double> p) { return foo_plain(p[0]); };

}  // namespace

TEST_CASE("fd_jacobian: pinned derivatives") {
    FDConfig cfg;
    cfg.h1 = 1e-6;
    cfg.relative_step = false;

    const PlainFunction<double> square = [](std::span<const double> p) { return p[0] * p[0]; };
    const std::vector<double> three = {3.0};
    CHECK(std::abs(fd_jacobian<double>(square, three, cfg)[0] - 6.0) < 1e-8);

    const PlainFunction<double> constant = [](std::span<const double>) { return 4.25; };
    const std::vector<double> pt = {1.0, -2.0};
    for (double g : fd_jacobian<double>(constant, pt, cfg)) CHECK(g == 0.0);

    const std::vector<double> four = {4.0};
    CHECK(std::abs(fd_jacobian<double>(foo_fn, four, cfg)[0] - 0.25) < 1e-8);
}

TEST_CASE("fd_hessian: pinned second derivatives") {
    const PlainFunction<double> prod = [](std::span<const double> p) { return p[0] * p[1]; };
    const std::vector<double> ones = {1.0, 1.0};
    const auto h = fd_hessian<double>(prod, ones);
    CHECK(std::abs(h[0][0]) < 1e-4);
    CHECK(std::abs(h[0][1] - 1.0) < 1e-4);
    CHECK(std::abs(h[1][0] - 1.0) < 1e-4);
    CHECK(std::abs(h[1][1]) < 1e-4);

    const PlainFunction<double> linear = [](std::span<const double> p) {
        return 2.0 * p[0] - 3.0 * p[1] + 0.5;
    };
    for (const auto& row : fd_hessian<double>(linear, ones))
        for (double e : row) CHECK(std::abs(e) < 1e-4);

    const std::vector<double> four = {4.0};
    CHECK(std::abs(fd_hessian<double>(foo_fn, four)[0][0] + 0.03125) < 1e-4);
}

TEST_CASE("complex_step_jacobian: cancellation-free first derivatives") {
    const PlainFunction<Complex> cexp = [](std::span<const Complex> p) { return std::exp(p[0]); };
    const std::vector<double> zero = {0.0};
    CHECK(std::abs(complex_step_jacobian(cexp, zero, 1e-20)[0] - 1.0) < 1e-15);

    const PlainFunction<Complex> ident = [](std::span<const Complex> p) { return p[0]; };
    const std::vector<double> anywhere = {17.25};
    CHECK(complex_step_jacobian(ident, anywhere)[0] == 1.0);

    const PlainFunction<Complex> cfoo = [](std::span<const Complex> p) {
        return (p[0] + std::sqrt(p[0])) / std::sqrt(p[0]);
    };
    const std::vector<double> four = {4.0};
    CHECK(std::abs(complex_step_jacobian(cfoo, four, 1e-20)[0] - 0.25) < 1e-15);

    SUBCASE("rejects functions that are complex-valued on real inputs") {
        const PlainFunction<Complex> shifted = [](std::span<const Complex> p) {
            return p[0] + Complex(0.0, 1.0);
        };
        CHECK_THROWS_AS(complex_step_jacobian(shifted, four), NotApplicable);
    }
    SUBCASE("rejects a non-positive step") {
        CHECK_THROWS_AS(complex_step_jacobian(cexp, zero, 0.0), std::invalid_argument);
        FDConfig bad;
        bad.h1 = 0.0;
        bad.h2 = -1.0;
        const std::vector<double> pt = {1.0};
        const PlainFunction<double> id = [](std::span<const double> p) { return p[0]; };
        CHECK_THROWS_AS(fd_jacobian<double>(id, pt, bad), std::invalid_argument);
        CHECK_THROWS_AS(fd_hessian<double>(id, pt, bad), std::invalid_argument);
    }
}

TEST_CASE("oracle self-consistency on the real-analytic corpus") {
    for (const auto& entry : support::corpus()) {
        const auto ast = support::parse_or_die(entry.expression);
        const auto real_fn = hd::expr::to_plain_function<double>(ast);
        const auto cplx_fn = hd::expr::to_plain_function<Complex>(ast);
        const auto fd = fd_jacobian<double>(real_fn, entry.point);
        const auto cs = complex_step_jacobian(cplx_fn, entry.point);
        REQUIRE(fd.size() == cs.size());
        for (std::size_t j = 0; j < fd.size(); ++j) {
            INFO(entry.expression << ", coordinate " << j);
            CHECK(rel_dev(fd[j], cs[j], 1e-3) < 1e-6);
        }
    }
}

TEST_CASE("complex-field finite differences recover holomorphic derivatives") {
    // f(z) = z^2 + exp(z): f' = 2z + exp(z), f'' = 2 + exp(z)
    const PlainFunction<Complex> f = [](std::span<const Complex> p) {
        return p[0] * p[0] + std::exp(p[0]);
    };
    const Complex z(1.0, 0.7);
    const std::vector<Complex> pt = {z};
    const Complex df = 2.0 * z + std::exp(z);
    const Complex ddf = 2.0 + std::exp(z);
    CHECK(rel_dev(fd_jacobian<Complex>(f, pt)[0], df) < 1e-7);
    CHECK(rel_dev(fd_hessian<Complex>(f, pt)[0][0], ddf) < 1e-5);
}

TEST_CASE("step-size sensitivity: exact propagation vs differencing") {
    // hyper-dual: no step parameter exists, the derivative is exact
    const HyperDual<double> x{4.0, 1.0, 1.0, 0.0};
    const HyperDual<double> y = (x + hd::sqrt(x)) / hd::sqrt(x);
    CHECK(rel_dev(y.d1, 0.25) < 1e-14);

    // central differences at h = 1e-12 lose most digits to cancellation
    FDConfig tiny;
    tiny.h1 = 1e-12;
    tiny.relative_step = false;
    const std::vector<double> four = {4.0};
    const double fd = fd_jacobian<double>(foo_fn, four, tiny)[0];
    CHECK(rel_dev(fd, 0.25) > 1e-10);
}

TEST_CASE("relative steps scale with the coordinate") {
    // f(x) = x^2 at a large coordinate still differentiates cleanly with the
    // relative step, while the absolute step collapses into cancellation
    const PlainFunction<double> square = [](std::span<const double> p) { return p[0] * p[0]; };
    const std::vector<double> big = {1.0e8};
    FDConfig rel;  // defaults: relative
    CHECK(rel_dev(fd_jacobian<double>(square, big, rel)[0], 2.0e8) < 1e-8);
}
