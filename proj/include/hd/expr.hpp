#pragma once

#include "hd/drivers.hpp"
#include "hd/dual.hpp"
#include "hd/hyperdual.hpp"
#include "hd/oracle.hpp"

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

// expr: infix expressions over variables x1..xN, numeric literals (with an
// `i` suffix for imaginary values), the constants pi and e, and the
// elementary function set. Parsing builds an immutable AST; evaluation is a
// plain recursive walk that works uniformly for plain scalars, Dual and
// HyperDual, visiting nodes in the same order for each instantiation.
// No constant folding happens anywhere: derivatives must flow through
// exactly the primitive calls that were written.

namespace hd::expr {

enum class BinaryOp { add, sub, mul, div, pow };
enum class UnaryOp { neg };
enum class Func { sqrt, exp, log, sin, cos, tan, sinh, cosh, tanh, asin, acos, atan };

const char* func_name(Func f);
std::optional<Func> func_from_name(std::string_view name);

struct ExprNode;
using NodePtr = std::unique_ptr<ExprNode>;

struct Literal {
    std::complex<double> value;
};
struct Variable {
    std::size_t index;  // zero-based; surface syntax is x1..xN
};
struct Unary {
    UnaryOp op;
    NodePtr child;
};
struct Binary {
    BinaryOp op;
    NodePtr lhs;
    NodePtr rhs;
};
struct Call {
    Func fn;
    NodePtr arg;
};

using NodeVariant = std::variant<Literal, Variable, Unary, Binary, Call>;

struct ExprNode {
    NodeVariant node;
    std::size_t height = 1;  // 1 + tallest child; bounded at parse time so
                             // recursive walks over the tree stay shallow

    explicit ExprNode(NodeVariant&& n) : node(std::move(n)) {}
    ~ExprNode();  // iterative: long operator chains must not unwind the stack
    ExprNode(ExprNode&&) = default;
    ExprNode& operator=(ExprNode&&) = default;
};

// Parsed expression; immutable and cheap to copy (copies share the tree).
class ExprAst {
public:
    ExprAst(NodePtr root, std::size_t arity) : root_(std::move(root)), arity_(arity) {}

    const ExprNode& root() const { return *root_; }
    std::size_t arity() const { return arity_; }
    bool has_complex_literal() const;
    std::string to_string() const;

private:
    std::shared_ptr<const ExprNode> root_;
    std::size_t arity_;
};

bool structurally_equal(const ExprAst& a, const ExprAst& b);

struct ParseDiagnostic {
    std::size_t offset = 0;  // byte offset into the input, in [0, input.size()]
    std::string message;
    std::string token;  // offending token text; empty at end of input
};

struct ParseResult {
    std::optional<ExprAst> ast;
    ParseDiagnostic diagnostic;  // meaningful iff !ast
    explicit operator bool() const { return ast.has_value(); }
};

// Grammar (precedence ^ > unary minus > *,/ > +,-; ^ right-associative):
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := "-" factor | power
//   power  := atom ("^" factor)?
//   atom   := NUMBER ("i")? | "pi" | "e" | VAR | FUNC "(" expr ")" | "(" expr ")"
// Never throws; every failure is a ParseDiagnostic with an in-bounds offset.
ParseResult parse(std::string_view input);

namespace detail {

template <class S>
struct scalar_field {
    using type = S;
};
template <hd::field F>
struct scalar_field<Dual<F>> {
    using type = F;
};
template <hd::field F>
struct scalar_field<HyperDual<F>> {
    using type = F;
};
template <class S>
using scalar_field_t = typename scalar_field<S>::type;

template <class S>
S apply_pow(const S& a, const S& b) {
    if constexpr (hd::field<S>) {
        return field_pow(a, b);
    } else {
        return pow(a, b);
    }
}

template <class S>
S apply_func(Func fn, const S& a) {
    using std::acos, std::asin, std::atan, std::cos, std::cosh, std::exp, std::log, std::sin,
        std::sinh, std::sqrt, std::tan, std::tanh;
    switch (fn) {
        case Func::sqrt: return sqrt(a);
        case Func::exp: return exp(a);
        case Func::log: return log(a);
        case Func::sin:
            // plain evaluation shares the AD primitives' sin/cos kernels, so
            // every scalar instantiation sees the same primal bits
            if constexpr (hd::field<S>) {
                return hd::detail::sin_kernel(a);
            } else {
                return sin(a);
            }
        case Func::cos:
            if constexpr (hd::field<S>) {
                return hd::detail::cos_kernel(a);
            } else {
                return cos(a);
            }
        case Func::tan: return tan(a);
        case Func::sinh: return sinh(a);
        case Func::cosh: return cosh(a);
        case Func::tanh: return tanh(a);
        case Func::asin: return asin(a);
        case Func::acos: return acos(a);
        case Func::atan: return atan(a);
    }
    throw std::logic_error("unreachable function tag");
}

template <class S>
S eval_node(const ExprNode& nd, std::span<const S> point) {
    using FF = scalar_field_t<S>;
    if (const auto* lit = std::get_if<Literal>(&nd.node))
        return S(from_complex_literal<FF>(lit->value));
    if (const auto* var = std::get_if<Variable>(&nd.node)) return point[var->index];
    if (const auto* un = std::get_if<Unary>(&nd.node)) return -eval_node(*un->child, point);
    if (const auto* bin = std::get_if<Binary>(&nd.node)) {
        const S lhs = eval_node(*bin->lhs, point);
        const S rhs = eval_node(*bin->rhs, point);
        switch (bin->op) {
            case BinaryOp::add: return lhs + rhs;
            case BinaryOp::sub: return lhs - rhs;
            case BinaryOp::mul: return lhs * rhs;
            case BinaryOp::div: return lhs / rhs;
            case BinaryOp::pow: return apply_pow(lhs, rhs);
        }
    }
    const auto& call = std::get<Call>(nd.node);
    return apply_func(call.fn, eval_node(*call.arg, point));
}

}  // namespace detail

// Evaluate over any scalar instantiation: double, std::complex<double>,
// Dual<F> or HyperDual<F>.
template <class S>
S eval(const ExprAst& ast, std::span<const S> point) {
    if (point.size() != ast.arity())
        throw ArityMismatch("point length " + std::to_string(point.size()) +
                            " does not match expression arity " + std::to_string(ast.arity()));
    return detail::eval_node<S>(ast.root(), point);
}

template <hd::field F>
DiffFunction<F> to_diff_function(const ExprAst& ast) {
    return DiffFunction<F>{
        [ast](std::span<const HyperDual<F>> p) { return eval<HyperDual<F>>(ast, p); },
        ast.arity()};
}

template <hd::field F>
PlainFunction<F> to_plain_function(const ExprAst& ast) {
    return [ast](std::span<const F> p) { return eval<F>(ast, p); };
}

}  // namespace hd::expr
