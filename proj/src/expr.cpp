#include "hd/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <numbers>

namespace hd::expr {

namespace {

// Guards against pathological inputs (the parser is exercised with fuzzed
// strings up to 64 KiB): grammar recursion, tree height and variable
// indices are capped with a diagnostic instead of exhausting the stack or
// memory. max_depth bounds the parser's own call chain (it ticks per
// grammar rule, so the deepest chain is a small multiple that fits
// instrumented stacks). max_height bounds the constructed tree including
// left-associative chains like "x1+x1+...", which grow no parse recursion
// but would otherwise make evaluation and printing arbitrarily deep.
constexpr std::size_t max_depth = 256;
constexpr std::size_t max_height = 4096;
constexpr std::size_t max_var_index = 1'000'000;

constexpr std::array<const char*, 12> func_names = {
    "sqrt", "exp", "log", "sin", "cos", "tan", "sinh", "cosh", "tanh", "asin", "acos", "atan"};

enum class TokKind { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
    TokKind kind = TokKind::end;
    std::size_t offset = 0;
    std::string_view text;
    double value = 0.0;    // number tokens
    bool imaginary = false;  // number had an `i` suffix
};

// Internal unwinding for diagnostics; never escapes parse().
struct Bail {
    ParseDiagnostic diagnostic;
};

[[noreturn]] void fail(std::size_t offset, std::string message, std::string_view token = {}) {
    throw Bail{ParseDiagnostic{offset, std::move(message), std::string(token)}};
}

class Lexer {
public:
    explicit Lexer(std::string_view input) : input_(input) { advance(); }

    const Token& current() const { return tok_; }

    void advance() {
        while (pos_ < input_.size() && std::isspace(static_cast<unsigned char>(input_[pos_])))
            ++pos_;
        tok_ = Token{};
        tok_.offset = pos_;
        if (pos_ >= input_.size()) {
            tok_.kind = TokKind::end;
            return;
        }
        const char c = input_[pos_];
        switch (c) {
            case '+': single(TokKind::plus); return;
            case '-': single(TokKind::minus); return;
            case '*': single(TokKind::star); return;
            case '/': single(TokKind::slash); return;
            case '^': single(TokKind::caret); return;
            case '(': single(TokKind::lparen); return;
            case ')': single(TokKind::rparen); return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            lex_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < input_.size() &&
                   (std::isalnum(static_cast<unsigned char>(input_[end])) || input_[end] == '_'))
                ++end;
            tok_.kind = TokKind::ident;
            tok_.text = input_.substr(pos_, end - pos_);
            pos_ = end;
            return;
        }
        fail(pos_, "unexpected character", input_.substr(pos_, 1));
    }

private:
    void single(TokKind k) {
        tok_.kind = k;
        tok_.text = input_.substr(pos_, 1);
        ++pos_;
    }

    void lex_number() {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        bool any_digit = false;
        while (end < input_.size() && std::isdigit(static_cast<unsigned char>(input_[end]))) {
            ++end;
            any_digit = true;
        }
        if (end < input_.size() && input_[end] == '.') {
            ++end;
            while (end < input_.size() && std::isdigit(static_cast<unsigned char>(input_[end]))) {
                ++end;
                any_digit = true;
            }
        }
        if (!any_digit) fail(start, "malformed number", input_.substr(start, end - start + 1));
        if (end < input_.size() && (input_[end] == 'e' || input_[end] == 'E')) {
            std::size_t exp_end = end + 1;
            if (exp_end < input_.size() && (input_[exp_end] == '+' || input_[exp_end] == '-'))
                ++exp_end;
            if (exp_end >= input_.size() ||
                !std::isdigit(static_cast<unsigned char>(input_[exp_end])))
                fail(start, "malformed number: exponent has no digits",
                     input_.substr(start, exp_end - start));
            while (exp_end < input_.size() &&
                   std::isdigit(static_cast<unsigned char>(input_[exp_end])))
                ++exp_end;
            end = exp_end;
        }

        const std::string_view text = input_.substr(start, end - start);
        double value = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec == std::errc::result_out_of_range)
            fail(start, "number out of range", text);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size())
            fail(start, "malformed number", text);

        tok_.kind = TokKind::number;
        tok_.value = value;
        if (end < input_.size() && input_[end] == 'i') {
            tok_.imaginary = true;
            ++end;
        }
        tok_.text = input_.substr(start, end - start);
        pos_ = end;
    }

    std::string_view input_;
    std::size_t pos_ = 0;
    Token tok_;
};

class Parser {
public:
    explicit Parser(std::string_view input) : lex_(input) {}

    ExprAst run() {
        NodePtr root = parse_expr(0);
        const Token& t = lex_.current();
        if (t.kind != TokKind::end) fail(t.offset, "unexpected token after expression", t.text);
        return ExprAst(std::move(root), max_index_);
    }

private:
    NodePtr make(NodeVariant&& n) {
        auto node = std::make_unique<ExprNode>(std::move(n));
        std::size_t tallest = 0;
        if (const auto* un = std::get_if<Unary>(&node->node)) {
            tallest = un->child->height;
        } else if (const auto* bin = std::get_if<Binary>(&node->node)) {
            tallest = std::max(bin->lhs->height, bin->rhs->height);
        } else if (const auto* call = std::get_if<Call>(&node->node)) {
            tallest = call->arg->height;
        }
        node->height = tallest + 1;
        if (node->height > max_height)
            fail(lex_.current().offset, "expression nests too deeply");
        return node;
    }

    void check_depth(std::size_t depth) {
        if (depth > max_depth) fail(lex_.current().offset, "expression nests too deeply");
    }

    bool accept(TokKind k) {
        if (lex_.current().kind != k) return false;
        lex_.advance();
        return true;
    }

    // Subtrees travel through function parameters instead of straight into
    // aggregate elements: when a later aggregate element initializer throws,
    // GCC 11 fails to destroy the members already constructed (PR c++/66139)
    // and the left subtree would leak on a diagnostic. Parameters already
    // initialized are reliably destroyed during unwinding.
    NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
        return make({Binary{op, std::move(lhs), std::move(rhs)}});
    }

    NodePtr parse_expr(std::size_t depth) {
        check_depth(depth);
        NodePtr lhs = parse_term(depth + 1);
        for (;;) {
            if (accept(TokKind::plus))
                lhs = binary(BinaryOp::add, std::move(lhs), parse_term(depth + 1));
            else if (accept(TokKind::minus))
                lhs = binary(BinaryOp::sub, std::move(lhs), parse_term(depth + 1));
            else
                return lhs;
        }
    }

    NodePtr parse_term(std::size_t depth) {
        check_depth(depth);
        NodePtr lhs = parse_factor(depth + 1);
        for (;;) {
            if (accept(TokKind::star))
                lhs = binary(BinaryOp::mul, std::move(lhs), parse_factor(depth + 1));
            else if (accept(TokKind::slash))
                lhs = binary(BinaryOp::div, std::move(lhs), parse_factor(depth + 1));
            else
                return lhs;
        }
    }

    NodePtr parse_factor(std::size_t depth) {
        check_depth(depth);
        if (accept(TokKind::minus)) {
            NodePtr child = parse_factor(depth + 1);
            return make({Unary{UnaryOp::neg, std::move(child)}});
        }
        return parse_power(depth + 1);
    }

    NodePtr parse_power(std::size_t depth) {
        check_depth(depth);
        NodePtr base = parse_atom(depth + 1);
        if (accept(TokKind::caret))
            return binary(BinaryOp::pow, std::move(base), parse_factor(depth + 1));
        return base;
    }

    NodePtr parse_atom(std::size_t depth) {
        check_depth(depth);
        const Token t = lex_.current();
        switch (t.kind) {
            case TokKind::number: {
                lex_.advance();
                const std::complex<double> value =
                    t.imaginary ? std::complex<double>(0.0, t.value)
                                : std::complex<double>(t.value, 0.0);
                return make({Literal{value}});
            }
            case TokKind::lparen: {
                lex_.advance();
                NodePtr inner = parse_expr(depth + 1);
                if (!accept(TokKind::rparen))
                    fail(lex_.current().offset, "expected ')'", lex_.current().text);
                return inner;
            }
            case TokKind::ident: return parse_ident(depth);
            case TokKind::end: fail(t.offset, "unexpected end of input");
            default: fail(t.offset, "expected a number, variable, function or '('", t.text);
        }
    }

    NodePtr parse_ident(std::size_t depth) {
        const Token t = lex_.current();
        if (t.text == "pi") {
            lex_.advance();
            return make({Literal{{std::numbers::pi, 0.0}}});
        }
        if (t.text == "e") {
            lex_.advance();
            return make({Literal{{std::numbers::e, 0.0}}});
        }
        if (auto fn = func_from_name(t.text)) {
            lex_.advance();
            if (!accept(TokKind::lparen))
                fail(lex_.current().offset, "expected '(' after function name", t.text);
            NodePtr arg = parse_expr(depth + 1);
            if (!accept(TokKind::rparen))
                fail(lex_.current().offset, "expected ')'", lex_.current().text);
            return make({Call{*fn, std::move(arg)}});
        }
        if (auto idx = variable_index(t.text)) {
            lex_.advance();
            if (*idx > max_var_index) fail(t.offset, "variable index too large", t.text);
            if (*idx > max_index_) max_index_ = *idx;
            return make({Variable{*idx - 1}});
        }
        fail(t.offset, "unknown identifier", t.text);
    }

    // x followed by [1-9][0-9]*; saturates above the index cap, caller rejects
    static std::optional<std::size_t> variable_index(std::string_view name) {
        if (name.size() < 2 || name[0] != 'x') return std::nullopt;
        if (name[1] < '1' || name[1] > '9') return std::nullopt;
        std::size_t idx = 0;
        for (std::size_t i = 1; i < name.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
            if (idx <= max_var_index) idx = idx * 10 + static_cast<std::size_t>(name[i] - '0');
        }
        return idx;
    }

    Lexer lex_;
    std::size_t max_index_ = 0;
};

// --- printing ---------------------------------------------------------

std::string format_number(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void print_literal(std::string& out, const Literal& lit) {
    if (lit.value.imag() == 0.0) {
        out += format_number(lit.value.real());
    } else if (lit.value.real() == 0.0) {
        out += format_number(lit.value.imag());
        out += 'i';
    } else {
        out += '(';
        out += format_number(lit.value.real());
        out += '+';
        out += format_number(lit.value.imag());
        out += "i)";
    }
}

// binding strength: + - (1), * / (2), unary - (3), ^ (4), atoms (5)
int node_prec(const ExprNode& n) {
    if (std::holds_alternative<Binary>(n.node)) {
        switch (std::get<Binary>(n.node).op) {
            case BinaryOp::add:
            case BinaryOp::sub: return 1;
            case BinaryOp::mul:
            case BinaryOp::div: return 2;
            case BinaryOp::pow: return 4;
        }
    }
    if (std::holds_alternative<Unary>(n.node)) return 3;
    return 5;
}

void print_node(std::string& out, const ExprNode& n, int min_prec) {
    const int prec = node_prec(n);
    const bool parens = prec < min_prec;
    if (parens) out += '(';

    if (const auto* lit = std::get_if<Literal>(&n.node)) {
        print_literal(out, *lit);
    } else if (const auto* var = std::get_if<Variable>(&n.node)) {
        out += 'x';
        out += std::to_string(var->index + 1);
    } else if (const auto* un = std::get_if<Unary>(&n.node)) {
        out += '-';
        print_node(out, *un->child, 3);
    } else if (const auto* bin = std::get_if<Binary>(&n.node)) {
        switch (bin->op) {
            case BinaryOp::add:
                print_node(out, *bin->lhs, 1);
                out += " + ";
                print_node(out, *bin->rhs, 2);
                break;
            case BinaryOp::sub:
                print_node(out, *bin->lhs, 1);
                out += " - ";
                print_node(out, *bin->rhs, 2);
                break;
            case BinaryOp::mul:
                print_node(out, *bin->lhs, 2);
                out += "*";
                print_node(out, *bin->rhs, 3);
                break;
            case BinaryOp::div:
                print_node(out, *bin->lhs, 2);
                out += "/";
                print_node(out, *bin->rhs, 3);
                break;
            case BinaryOp::pow:
                // lhs must be an atom, rhs may be a factor (unary minus or power)
                print_node(out, *bin->lhs, 5);
                out += "^";
                print_node(out, *bin->rhs, 3);
                break;
        }
    } else {
        const auto& call = std::get<Call>(n.node);
        out += func_name(call.fn);
        out += '(';
        print_node(out, *call.arg, 0);
        out += ')';
    }

    if (parens) out += ')';
}

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
    if (a.node.index() != b.node.index()) return false;
    if (const auto* la = std::get_if<Literal>(&a.node)) {
        const auto& lb = std::get<Literal>(b.node);
        return bits_equal(la->value, lb.value);
    }
    if (const auto* va = std::get_if<Variable>(&a.node))
        return va->index == std::get<Variable>(b.node).index;
    if (const auto* ua = std::get_if<Unary>(&a.node)) {
        const auto& ub = std::get<Unary>(b.node);
        return ua->op == ub.op && nodes_equal(*ua->child, *ub.child);
    }
    if (const auto* ba = std::get_if<Binary>(&a.node)) {
        const auto& bb = std::get<Binary>(b.node);
        return ba->op == bb.op && nodes_equal(*ba->lhs, *bb.lhs) && nodes_equal(*ba->rhs, *bb.rhs);
    }
    const auto& ca = std::get<Call>(a.node);
    const auto& cb = std::get<Call>(b.node);
    return ca.fn == cb.fn && nodes_equal(*ca.arg, *cb.arg);
}

bool node_has_complex_literal(const ExprNode& n) {
    if (const auto* lit = std::get_if<Literal>(&n.node)) return lit->value.imag() != 0.0;
    if (const auto* un = std::get_if<Unary>(&n.node)) return node_has_complex_literal(*un->child);
    if (const auto* bin = std::get_if<Binary>(&n.node))
        return node_has_complex_literal(*bin->lhs) || node_has_complex_literal(*bin->rhs);
    if (const auto* call = std::get_if<Call>(&n.node)) return node_has_complex_literal(*call->arg);
    return false;
}

}  // namespace

// Children are detached onto an explicit worklist before each node dies, so
// destroying a chain of n nodes never recurses deeper than one level.
ExprNode::~ExprNode() {
    std::vector<NodePtr> pending;
    const auto detach = [&pending](ExprNode& n) {
        if (auto* un = std::get_if<Unary>(&n.node)) {
            if (un->child) pending.push_back(std::move(un->child));
        } else if (auto* bin = std::get_if<Binary>(&n.node)) {
            if (bin->lhs) pending.push_back(std::move(bin->lhs));
            if (bin->rhs) pending.push_back(std::move(bin->rhs));
        } else if (auto* call = std::get_if<Call>(&n.node)) {
            if (call->arg) pending.push_back(std::move(call->arg));
        }
    };
    detach(*this);
    while (!pending.empty()) {
        NodePtr next = std::move(pending.back());
        pending.pop_back();
        detach(*next);
    }
}

const char* func_name(Func f) { return func_names[static_cast<std::size_t>(f)]; }

std::optional<Func> func_from_name(std::string_view name) {
    for (std::size_t i = 0; i < func_names.size(); ++i)
        if (name == func_names[i]) return static_cast<Func>(i);
    return std::nullopt;
}

bool ExprAst::has_complex_literal() const { return node_has_complex_literal(root()); }

std::string ExprAst::to_string() const {
    std::string out;
    print_node(out, root(), 0);
    return out;
}

bool structurally_equal(const ExprAst& a, const ExprAst& b) {
    return a.arity() == b.arity() && nodes_equal(a.root(), b.root());
}

ParseResult parse(std::string_view input) {
    try {
        Parser parser(input);
        return ParseResult{parser.run(), {}};
    } catch (const Bail& bail) {
        return ParseResult{std::nullopt, bail.diagnostic};
    }
}

}  // namespace hd::expr
