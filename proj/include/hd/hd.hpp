#pragma once

// Umbrella header for the hyperdual library.
//
//   #include <hd/hd.hpp>
//
//   // derivative seeds: <value, d1, d2, d12>
//   hd::HyperDual<double> x{3.0, 1.0, 1.0, 0.0};
//   auto y = x * x;            // y.d1 == 6, y.d12 == 2
//
//   // whole Jacobian/Hessian of an n-ary function
//   hd::DiffFunction<double> f{
//       [](std::span<const hd::HyperDual<double>> p) { return p[0] * p[1]; }, 2};
//   auto report = hd::jacobian_and_hessian(f, std::vector<double>{2.0, 3.0});
//
//   // parse and differentiate an expression
//   auto ast = hd::expr::parse("x1 + x2^2*x3");
//   auto g = hd::expr::to_diff_function<double>(*ast.ast);

#include "hd/cli.hpp"
#include "hd/drivers.hpp"
#include "hd/dual.hpp"
#include "hd/expr.hpp"
#include "hd/hyperdual.hpp"
#include "hd/oracle.hpp"
#include "hd/scalar.hpp"
