#pragma once

#include "hd/drivers.hpp"
#include "hd/expr.hpp"

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// cli: one-shot evaluation requests. The expression and point arrive as
// text, the derivatives leave as JSON or CSV on stdout. Kept out of main()
// so the whole pipeline is testable in-process.

namespace hd::cli {

enum class Format { json, csv };

struct CliRequest {
    std::string expression;
    std::vector<std::complex<double>> point;
    bool jacobian = false;
    bool hessian = false;
    bool verify = false;
    Format format = Format::json;
    bool strict = true;
    bool parallel = false;
    double verify_threshold = 1e-4;
};

// Field-erased report ready for serialization; real-field runs carry zero
// imaginary parts so the schema never changes shape.
struct VerifyInfo {
    std::optional<double> max_rel_dev_jacobian;
    std::optional<double> max_rel_dev_hessian;
};

struct Report {
    std::complex<double> value;
    std::optional<std::vector<std::complex<double>>> jacobian;
    std::optional<std::vector<std::vector<std::complex<double>>>> hessian;
    std::size_t invocations = 0;
    std::optional<VerifyInfo> verify;
};

struct RunResult {
    int exit_code = 0;       // 0 ok, 1 parse error, 2 arity mismatch, 3 domain error,
                             // 4 verify deviation above threshold
    std::string output;      // serialized report (stdout)
    std::string diagnostic;  // human-readable error (stderr)
};

RunResult run(const CliRequest& request);

// Comma-separated complex literals: "a", "ai", "a+bi", "a-bi"; whitespace
// ignored. Returns nullopt and fills `error` on bad syntax.
std::optional<std::vector<std::complex<double>>> parse_point_list(std::string_view text,
                                                                  std::string& error);

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

std::string serialize(const Report& report, Format format);

}  // namespace hd::cli
