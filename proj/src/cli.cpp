#include "hd/cli.hpp"

#include "hd/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace hd::cli {

namespace {

using Complex = std::complex<double>;

// Deviation used by --verify: |a-b| / (1 + max(|a|,|b|)). Behaves like a
// relative error for entries of order one and larger and like an absolute
// error near zero, where the finite-difference reference is pure noise.
double verify_dev(const Complex& a, const Complex& b) {
    return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b)));
}

void append_number(std::string& out, double x) {
    if (!std::isfinite(x)) {
        out += "null";  // JSON has no literal for non-finite values
        return;
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    out.append(buf, res.ptr);
}

void append_complex_json(std::string& out, const Complex& z) {
    out += "{\"re\":";
    append_number(out, z.real());
    out += ",\"im\":";
    append_number(out, z.imag());
    out += '}';
}

std::string serialize_json(const Report& r) {
    std::string out = "{\"value\":";
    append_complex_json(out, r.value);
    out += ",\"jacobian\":";
    if (r.jacobian) {
        out += '[';
        for (std::size_t j = 0; j < r.jacobian->size(); ++j) {
            if (j != 0) out += ',';
            append_complex_json(out, (*r.jacobian)[j]);
        }
        out += ']';
    } else {
        out += "null";
    }
    out += ",\"hessian\":";
    if (r.hessian) {
        out += '[';
        for (std::size_t j = 0; j < r.hessian->size(); ++j) {
            if (j != 0) out += ',';
            out += '[';
            const auto& row = (*r.hessian)[j];
            for (std::size_t k = 0; k < row.size(); ++k) {
                if (k != 0) out += ',';
                append_complex_json(out, row[k]);
            }
            out += ']';
        }
        out += ']';
    } else {
        out += "null";
    }
    out += ",\"invocations\":";
    out += std::to_string(r.invocations);
    out += ",\"verify\":";
    if (r.verify) {
        out += "{\"max_rel_dev_jacobian\":";
        if (r.verify->max_rel_dev_jacobian)
            append_number(out, *r.verify->max_rel_dev_jacobian);
        else
            out += "null";
        out += ",\"max_rel_dev_hessian\":";
        if (r.verify->max_rel_dev_hessian)
            append_number(out, *r.verify->max_rel_dev_hessian);
        else
            out += "null";
        out += '}';
    } else {
        out += "null";
    }
    out += "}\n";
    return out;
}

std::string serialize_csv(const Report& r) {
    std::string out = "kind,j,k,re,im\n";
    out += "value,,,";
    append_number(out, r.value.real());
    out += ',';
    append_number(out, r.value.imag());
    out += '\n';
    if (r.jacobian) {
        for (std::size_t j = 0; j < r.jacobian->size(); ++j) {
            out += "jacobian," + std::to_string(j + 1) + ",,";
            append_number(out, (*r.jacobian)[j].real());
            out += ',';
            append_number(out, (*r.jacobian)[j].imag());
            out += '\n';
        }
    }
    if (r.hessian) {
        for (std::size_t j = 0; j < r.hessian->size(); ++j) {
            for (std::size_t k = 0; k < (*r.hessian)[j].size(); ++k) {
                out += "hessian," + std::to_string(j + 1) + ',' + std::to_string(k + 1) + ',';
                append_number(out, (*r.hessian)[j][k].real());
                out += ',';
                append_number(out, (*r.hessian)[j][k].imag());
                out += '\n';
            }
        }
    }
    out += "invocations,,," + std::to_string(r.invocations) + ",\n";
    if (r.verify) {
        if (r.verify->max_rel_dev_jacobian) {
            out += "verify_jacobian,,,";
            append_number(out, *r.verify->max_rel_dev_jacobian);
            out += ",\n";
        }
        if (r.verify->max_rel_dev_hessian) {
            out += "verify_hessian,,,";
            append_number(out, *r.verify->max_rel_dev_hessian);
            out += ",\n";
        }
    }
    return out;
}

template <field F>
Report compute_report(const expr::ExprAst& ast, const CliRequest& req) {
    std::vector<F> x;
    x.reserve(req.point.size());
    for (const auto& c : req.point) x.push_back(from_complex_literal<F>(c));

    DriverOptions opts;
    opts.parallel = req.parallel;

    const DiffFunction<F> f = expr::to_diff_function<F>(ast);
    Report report;

    DerivativeReport<F> der;
    if (req.hessian) {
        der = jacobian_and_hessian(f, std::span<const F>(x), opts);
    } else if (req.jacobian) {
        der = jacobian(f, std::span<const F>(x), opts);
    } else {
        HDPoint<F> p(x.begin(), x.end());  // zero seeds: plain evaluation
        der.value = f.fn(p).v;
        der.invocations = 1;
    }

    report.value = {re_part(der.value), im_part(der.value)};
    report.invocations = der.invocations;
    if (req.jacobian || req.hessian) {
        std::vector<Complex> jac(der.jacobian.size());
        for (std::size_t j = 0; j < jac.size(); ++j)
            jac[j] = {re_part(der.jacobian[j]), im_part(der.jacobian[j])};
        report.jacobian = std::move(jac);
    }
    if (req.hessian) {
        std::vector<std::vector<Complex>> hess(der.hessian.size());
        for (std::size_t j = 0; j < hess.size(); ++j) {
            hess[j].resize(der.hessian[j].size());
            for (std::size_t k = 0; k < hess[j].size(); ++k)
                hess[j][k] = {re_part(der.hessian[j][k]), im_part(der.hessian[j][k])};
        }
        report.hessian = std::move(hess);
    }

    if (req.verify) {
        const auto plain = expr::to_plain_function<F>(ast);
        VerifyInfo info;
        if (report.jacobian) {
            const auto fd = fd_jacobian<F>(plain, x);
            double dev = 0.0;
            for (std::size_t j = 0; j < fd.size(); ++j)
                dev = std::max(dev, verify_dev((*report.jacobian)[j],
                                               {re_part(fd[j]), im_part(fd[j])}));
            info.max_rel_dev_jacobian = dev;
        }
        if (report.hessian) {
            const auto fd = fd_hessian<F>(plain, x);
            double dev = 0.0;
            for (std::size_t j = 0; j < fd.size(); ++j)
                for (std::size_t k = 0; k < fd[j].size(); ++k)
                    dev = std::max(dev, verify_dev((*report.hessian)[j][k],
                                                   {re_part(fd[j][k]), im_part(fd[j][k])}));
            info.max_rel_dev_hessian = dev;
        }
        report.verify = info;
    }
    return report;
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string serialize(const Report& report, Format format) {
    return format == Format::json ? serialize_json(report) : serialize_csv(report);
}

std::optional<std::vector<std::complex<double>>> parse_point_list(std::string_view text,
                                                                  std::string& error) {
    std::string compact;
    compact.reserve(text.size());
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
    if (compact.empty()) {
        error = "empty point";
        return std::nullopt;
    }

    std::vector<Complex> out;
    std::size_t pos = 0;
    const auto parse_signed = [&](double& value, bool& imaginary) -> bool {
        std::size_t start = pos;
        if (pos < compact.size() && (compact[pos] == '+' || compact[pos] == '-')) ++pos;
        const char* begin = compact.data() + pos;
        const char* end = compact.data() + compact.size();
        double mag = 0.0;
        const auto res = std::from_chars(begin, end, mag);
        if (res.ec != std::errc() || res.ptr == begin) {
            error = "malformed coordinate at '" + compact.substr(start) + "'";
            return false;
        }
        pos += static_cast<std::size_t>(res.ptr - begin);
        imaginary = pos < compact.size() && compact[pos] == 'i';
        if (imaginary) ++pos;
        value = compact[start] == '-' ? -mag : mag;
        return true;
    };

    while (true) {
        double first = 0.0;
        bool first_imag = false;
        if (!parse_signed(first, first_imag)) return std::nullopt;
        Complex coord = first_imag ? Complex(0.0, first) : Complex(first, 0.0);
        if (!first_imag && pos < compact.size() && (compact[pos] == '+' || compact[pos] == '-')) {
            double second = 0.0;
            bool second_imag = false;
            if (!parse_signed(second, second_imag)) return std::nullopt;
            if (!second_imag) {
                error = "expected an imaginary part, e.g. \"1+2i\"";
                return std::nullopt;
            }
            coord.imag(second);
        }
        out.push_back(coord);
        if (pos == compact.size()) break;
        if (compact[pos] != ',') {
            error = "unexpected character '" + std::string(1, compact[pos]) + "' in point";
            return std::nullopt;
        }
        ++pos;
    }
    return out;
}

RunResult run(const CliRequest& request) {
    auto parsed = expr::parse(request.expression);
    if (!parsed) {
        const auto& d = parsed.diagnostic;
        std::string msg = "parse error at offset " + std::to_string(d.offset) + ": " + d.message;
        if (!d.token.empty()) msg += " (near '" + d.token + "')";
        return {1, "", msg};
    }
    const expr::ExprAst& ast = *parsed.ast;

    if (request.point.size() != ast.arity())
        return {2, "",
                "point has " + std::to_string(request.point.size()) + " coordinate(s) but the " +
                    "expression has arity " + std::to_string(ast.arity())};

    const bool complex_field =
        ast.has_complex_literal() ||
        std::any_of(request.point.begin(), request.point.end(),
                    [](const Complex& c) { return c.imag() != 0.0; });

    DomainModeScope mode(request.strict ? DomainMode::strict : DomainMode::permissive);

    Report report;
    try {
        report = complex_field ? compute_report<std::complex<double>>(ast, request)
                               : compute_report<double>(ast, request);
    } catch (const DomainError& e) {
        return {3, "", std::string("domain error: ") + e.what()};
    } catch (const ArityMismatch& e) {
        return {2, "", std::string("arity mismatch: ") + e.what()};
    }

    int code = 0;
    std::string diagnostic;
    if (report.verify) {
        const auto above = [&](const std::optional<double>& dev) {
            return dev && !(*dev <= request.verify_threshold);
        };
        if (above(report.verify->max_rel_dev_jacobian) ||
            above(report.verify->max_rel_dev_hessian)) {
            code = 4;
            diagnostic = "verification deviation above threshold " +
                         format_double(request.verify_threshold);
        }
    }
    return {code, serialize(report, request.format), diagnostic};
}

}  // namespace hd::cli
