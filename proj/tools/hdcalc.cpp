#include "hd/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{
        "hdcalc: exact first and second derivatives of an expression, evaluated with "
        "hyper-dual arithmetic"};

    std::string expression;
    std::string point_text;
    std::string format = "json";
    bool want_jacobian = false;
    bool want_hessian = false;
    bool verify = false;
    bool strict = true;
    bool parallel = false;

    app.add_option("--expr", expression, "expression over x1..xN, e.g. \"x1 + x2^2*x3\"")
        ->required();
    app.add_option("--point", point_text,
                   "comma-separated coordinates, complex literals allowed: \"1+1i, 2.3, 3.14\"")
        ->required();
    app.add_flag("--jacobian", want_jacobian, "compute the Jacobian row");
    app.add_flag("--hessian", want_hessian, "compute the full Hessian (implies the Jacobian)");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_flag("--verify", verify,
                 "cross-check against central finite differences and report the deviation");
    app.add_flag("--strict,!--no-strict", strict,
                 "strict: domain violations fail with exit code 3; no-strict: NaN/Inf propagate");
    app.add_flag("--parallel", parallel, "evaluate independent seed points concurrently");

    CLI11_PARSE(app, argc, argv);

    hd::cli::CliRequest request;
    request.expression = expression;
    request.jacobian = want_jacobian;
    request.hessian = want_hessian;
    request.verify = verify;
    request.format = format == "csv" ? hd::cli::Format::csv : hd::cli::Format::json;
    request.strict = strict;
    request.parallel = parallel;

    std::string point_error;
    if (auto point = hd::cli::parse_point_list(point_text, point_error)) {
        request.point = std::move(*point);
    } else {
        std::fprintf(stderr, "invalid --point: %s\n", point_error.c_str());
        return 2;
    }

    const hd::cli::RunResult result = hd::cli::run(request);
    if (!result.output.empty()) std::fputs(result.output.c_str(), stdout);
    if (!result.diagnostic.empty()) std::fprintf(stderr, "%s\n", result.diagnostic.c_str());
    return result.exit_code;
}
