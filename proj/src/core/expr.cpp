#include "expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>
#include <vector>

namespace riemoc {

namespace {

enum class Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Fn { Sin, Cos, Exp, Log, Sqrt, Abs, Sgn };

constexpr std::array<std::pair<std::string_view, Fn>, 7> kFunctions{{
    {"sin", Fn::Sin}, {"cos", Fn::Cos}, {"exp", Fn::Exp}, {"log", Fn::Log},
    {"sqrt", Fn::Sqrt}, {"abs", Fn::Abs}, {"sgn", Fn::Sgn},
}};

std::string_view fn_name(Fn f) {
    for (const auto& [name, fn] : kFunctions)
        if (fn == f) return name;
    return "?";
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

} // namespace

struct Expr::Node {
    Kind kind;
    double value = 0.0; // Const
    int var = 0;        // Var, 1-based
    Fn fn = Fn::Sin;    // Call
    NodePtr a, b;
};

namespace {

using Node = Expr::Node;

// ---------------------------------------------------------------------------
// Tokenizer. Offsets are 1-based character positions, as reported in errors.

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::size_t offset; // 1-based
    double number = 0.0;
    std::string_view text;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, pos_ + 1, 0.0, {}});
                return out;
            }
            char c = src_[pos_];
            std::size_t start = pos_;
            switch (c) {
            case '+': out.push_back(simple(Tok::Plus)); break;
            case '-': out.push_back(simple(Tok::Minus)); break;
            case '*': out.push_back(simple(Tok::Star)); break;
            case '/': out.push_back(simple(Tok::Slash)); break;
            case '^': out.push_back(simple(Tok::Caret)); break;
            case '(': out.push_back(simple(Tok::LParen)); break;
            case ')': out.push_back(simple(Tok::RParen)); break;
            default:
                if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                    out.push_back(number(start));
                } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                    out.push_back(ident(start));
                } else {
                    throw ParseError(start + 1,
                                     std::string("unexpected character '") + c + "'");
                }
            }
        }
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() &&
               std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    Token simple(Tok k) {
        Token t{k, pos_ + 1, 0.0, src_.substr(pos_, 1)};
        ++pos_;
        return t;
    }

    Token number(std::size_t start) {
        std::size_t end = start;
        while (end < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[end])) || src_[end] == '.'))
            ++end;
        // optional exponent
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
            if (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) {
                ++e;
                while (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e])))
                    ++e;
                end = e;
            }
        }
        double v = 0.0;
        auto res = std::from_chars(src_.data() + start, src_.data() + end, v);
        if (res.ec != std::errc() || res.ptr != src_.data() + end)
            throw ParseError(start + 1, "malformed number literal");
        pos_ = end;
        return {Tok::Number, start + 1, v, src_.substr(start, end - start)};
    }

    Token ident(std::size_t start) {
        std::size_t end = start;
        while (end < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
            ++end;
        pos_ = end;
        return {Tok::Ident, start + 1, 0.0, src_.substr(start, end - start)};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Node construction with constant folding.

Expr::NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Const;
    n->value = v;
    return n;
}

bool is_const(const Expr::NodePtr& n, double v) {
    return n->kind == Kind::Const && n->value == v;
}

Expr::NodePtr make_neg(Expr::NodePtr a);

Expr::NodePtr make_binary(Kind kind, Expr::NodePtr a, Expr::NodePtr b) {
    if (a->kind == Kind::Const && b->kind == Kind::Const) {
        double v = 0.0;
        bool ok = true;
        switch (kind) {
        case Kind::Add: v = a->value + b->value; break;
        case Kind::Sub: v = a->value - b->value; break;
        case Kind::Mul: v = a->value * b->value; break;
        case Kind::Div:
            if (b->value == 0.0) ok = false; else v = a->value / b->value;
            break;
        case Kind::Pow: v = std::pow(a->value, b->value); break;
        default: ok = false; break;
        }
        if (ok && std::isfinite(v)) return make_const(v);
    }
    switch (kind) {
    case Kind::Add:
        if (is_const(a, 0.0)) return b;
        if (is_const(b, 0.0)) return a;
        break;
    case Kind::Sub:
        if (is_const(b, 0.0)) return a;
        if (is_const(a, 0.0)) return make_neg(std::move(b));
        break;
    case Kind::Mul:
        if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
        if (is_const(a, 1.0)) return b;
        if (is_const(b, 1.0)) return a;
        if (is_const(a, -1.0)) return make_neg(std::move(b));
        if (is_const(b, -1.0)) return make_neg(std::move(a));
        break;
    case Kind::Div:
        if (is_const(a, 0.0)) return make_const(0.0);
        if (is_const(b, 1.0)) return a;
        break;
    case Kind::Pow:
        if (is_const(b, 1.0)) return a;
        if (is_const(b, 0.0)) return make_const(1.0);
        break;
    default:
        break;
    }
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

Expr::NodePtr make_neg(Expr::NodePtr a) {
    if (a->kind == Kind::Const) return make_const(-a->value);
    if (a->kind == Kind::Neg) return a->a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::Neg;
    n->a = std::move(a);
    return n;
}

Expr::NodePtr make_call(Fn fn, Expr::NodePtr a) {
    if (a->kind == Kind::Const) {
        double u = a->value, v = 0.0;
        bool ok = true;
        switch (fn) {
        case Fn::Sin: v = std::sin(u); break;
        case Fn::Cos: v = std::cos(u); break;
        case Fn::Exp: v = std::exp(u); break;
        case Fn::Log: ok = u > 0.0; if (ok) v = std::log(u); break;
        case Fn::Sqrt: ok = u >= 0.0; if (ok) v = std::sqrt(u); break;
        case Fn::Abs: v = std::fabs(u); break;
        case Fn::Sgn: v = (u > 0.0) ? 1.0 : (u < 0.0 ? -1.0 : 0.0); break;
        }
        if (ok && std::isfinite(v)) return make_const(v);
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Call;
    n->fn = fn;
    n->a = std::move(a);
    return n;
}

Expr::NodePtr make_var(int axis) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->var = axis;
    return n;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser.

class Parser {
public:
    Parser(std::vector<Token> toks, int n) : toks_(std::move(toks)), n_(n) {}

    Expr::NodePtr run() {
        auto e = sum();
        if (peek().kind != Tok::End)
            throw ParseError(peek().offset, "dangling token after expression");
        return e;
    }

private:
    const Token& peek() const { return toks_[cur_]; }
    const Token& advance() { return toks_[cur_++]; }

    Expr::NodePtr sum() {
        auto lhs = product();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            bool plus = advance().kind == Tok::Plus;
            lhs = make_binary(plus ? Kind::Add : Kind::Sub, std::move(lhs), product());
        }
        return lhs;
    }

    Expr::NodePtr product() {
        auto lhs = unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            bool mul = advance().kind == Tok::Star;
            lhs = make_binary(mul ? Kind::Mul : Kind::Div, std::move(lhs), unary());
        }
        return lhs;
    }

    Expr::NodePtr unary() {
        if (peek().kind == Tok::Minus) {
            advance();
            return make_neg(unary());
        }
        return power();
    }

    Expr::NodePtr power() {
        auto base = atom();
        if (peek().kind == Tok::Caret) {
            advance();
            return make_binary(Kind::Pow, std::move(base), unary());
        }
        return base;
    }

    Expr::NodePtr atom() {
        const Token& t = advance();
        switch (t.kind) {
        case Tok::Number:
            return make_const(t.number);
        case Tok::LParen: {
            auto e = sum();
            expect_rparen();
            return e;
        }
        case Tok::Ident: {
            if (t.text.size() >= 2 && t.text[0] == 'x' && all_digits(t.text.substr(1))) {
                int idx = 0;
                std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), idx);
                if (idx < 1 || idx > n_)
                    throw ParseError(t.offset, "variable " + std::string(t.text) +
                                                   " out of range for dimension " +
                                                   std::to_string(n_));
                return make_var(idx);
            }
            for (const auto& [name, fn] : kFunctions) {
                if (t.text == name) {
                    if (peek().kind != Tok::LParen)
                        throw ParseError(peek().offset, "expected '(' after '" +
                                                            std::string(name) + "'");
                    advance();
                    auto arg = sum();
                    expect_rparen();
                    return make_call(fn, std::move(arg));
                }
            }
            throw ParseError(t.offset, "unknown identifier '" + std::string(t.text) + "'");
        }
        default:
            throw ParseError(t.offset, "expected a value");
        }
    }

    void expect_rparen() {
        if (peek().kind != Tok::RParen)
            throw ParseError(peek().offset, "expected ')'");
        advance();
    }

    static bool all_digits(std::string_view s) {
        if (s.empty()) return false;
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    }

    std::vector<Token> toks_;
    std::size_t cur_ = 0;
    int n_;
};

// ---------------------------------------------------------------------------
// Evaluation.

double eval_node(const Node& n, std::span<const double> x) {
    switch (n.kind) {
    case Kind::Const: return n.value;
    case Kind::Var: return x[static_cast<std::size_t>(n.var - 1)];
    case Kind::Neg: return -eval_node(*n.a, x);
    case Kind::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Kind::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Kind::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Kind::Div: {
        double a = eval_node(*n.a, x), b = eval_node(*n.b, x);
        if (b == 0.0) throw EvalError("division by zero");
        double v = a / b;
        if (!std::isfinite(v)) throw EvalError("non-finite result in division");
        return v;
    }
    case Kind::Pow: {
        double a = eval_node(*n.a, x), b = eval_node(*n.b, x);
        double v = std::pow(a, b);
        if (!std::isfinite(v)) throw EvalError("non-finite result in power");
        return v;
    }
    case Kind::Call: {
        double u = eval_node(*n.a, x);
        double v = 0.0;
        switch (n.fn) {
        case Fn::Sin: v = std::sin(u); break;
        case Fn::Cos: v = std::cos(u); break;
        case Fn::Exp: v = std::exp(u); break;
        case Fn::Log:
            if (u <= 0.0) throw EvalError("log of non-positive value");
            v = std::log(u);
            break;
        case Fn::Sqrt:
            if (u < 0.0) throw EvalError("sqrt of negative value");
            v = std::sqrt(u);
            break;
        case Fn::Abs: v = std::fabs(u); break;
        case Fn::Sgn: return (u > 0.0) ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
        }
        if (!std::isfinite(v)) throw EvalError("non-finite result in function call");
        return v;
    }
    }
    throw EvalError("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Symbolic differentiation.

Expr::NodePtr diff_node(const Expr::NodePtr& n, int axis) {
    switch (n->kind) {
    case Kind::Const: return make_const(0.0);
    case Kind::Var: return make_const(n->var == axis ? 1.0 : 0.0);
    case Kind::Neg: return make_neg(diff_node(n->a, axis));
    case Kind::Add: return make_binary(Kind::Add, diff_node(n->a, axis), diff_node(n->b, axis));
    case Kind::Sub: return make_binary(Kind::Sub, diff_node(n->a, axis), diff_node(n->b, axis));
    case Kind::Mul:
        return make_binary(Kind::Add,
                           make_binary(Kind::Mul, diff_node(n->a, axis), n->b),
                           make_binary(Kind::Mul, n->a, diff_node(n->b, axis)));
    case Kind::Div:
        // (u'v - uv') / v^2
        return make_binary(
            Kind::Div,
            make_binary(Kind::Sub,
                        make_binary(Kind::Mul, diff_node(n->a, axis), n->b),
                        make_binary(Kind::Mul, n->a, diff_node(n->b, axis))),
            make_binary(Kind::Pow, n->b, make_const(2.0)));
    case Kind::Pow:
        if (n->b->kind == Kind::Const) {
            // c * u^(c-1) * u'
            double c = n->b->value;
            return make_binary(
                Kind::Mul,
                make_binary(Kind::Mul, make_const(c),
                            make_binary(Kind::Pow, n->a, make_const(c - 1.0))),
                diff_node(n->a, axis));
        }
        // u^v * (v' log u + v u' / u)
        return make_binary(
            Kind::Mul, make_binary(Kind::Pow, n->a, n->b),
            make_binary(Kind::Add,
                        make_binary(Kind::Mul, diff_node(n->b, axis),
                                    make_call(Fn::Log, n->a)),
                        make_binary(Kind::Div,
                                    make_binary(Kind::Mul, n->b, diff_node(n->a, axis)),
                                    n->a)));
    case Kind::Call: {
        auto u = n->a;
        auto du = diff_node(u, axis);
        switch (n->fn) {
        case Fn::Sin: return make_binary(Kind::Mul, make_call(Fn::Cos, u), du);
        case Fn::Cos: return make_neg(make_binary(Kind::Mul, make_call(Fn::Sin, u), du));
        case Fn::Exp: return make_binary(Kind::Mul, make_call(Fn::Exp, u), du);
        case Fn::Log: return make_binary(Kind::Div, du, u);
        case Fn::Sqrt:
            return make_binary(Kind::Div, du,
                               make_binary(Kind::Mul, make_const(2.0),
                                           make_call(Fn::Sqrt, u)));
        case Fn::Abs: return make_binary(Kind::Mul, make_call(Fn::Sgn, u), du);
        case Fn::Sgn: return make_const(0.0); // zero away from the kink
        }
        break;
    }
    }
    return make_const(0.0);
}

// ---------------------------------------------------------------------------
// Canonical printing. Precedence: sum 1, product 2, unary 3, power 4, atom 5.

int precedence(const Node& n) {
    switch (n.kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
    }
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, std::string& out, bool parens) {
    if (parens) out.push_back('(');
    print_node(child, out);
    if (parens) out.push_back(')');
}

void print_node(const Node& n, std::string& out) {
    int p = precedence(n);
    switch (n.kind) {
    case Kind::Const: out += format_double(n.value); return;
    case Kind::Var: out += "x" + std::to_string(n.var); return;
    case Kind::Neg:
        out.push_back('-');
        print_child(*n.a, out, precedence(*n.a) < p);
        return;
    case Kind::Add:
    case Kind::Sub:
        print_child(*n.a, out, precedence(*n.a) < p);
        out += (n.kind == Kind::Add) ? " + " : " - ";
        print_child(*n.b, out, precedence(*n.b) <= p);
        return;
    case Kind::Mul:
    case Kind::Div:
        print_child(*n.a, out, precedence(*n.a) < p);
        out.push_back(n.kind == Kind::Mul ? '*' : '/');
        print_child(*n.b, out, precedence(*n.b) <= p);
        return;
    case Kind::Pow:
        print_child(*n.a, out, precedence(*n.a) <= p);
        out.push_back('^');
        print_child(*n.b, out, precedence(*n.b) < 3);
        return;
    case Kind::Call:
        out += fn_name(n.fn);
        out.push_back('(');
        print_node(*n.a, out);
        out.push_back(')');
        return;
    }
}

int dim_node(const Node& n) {
    switch (n.kind) {
    case Kind::Const: return 0;
    case Kind::Var: return n.var;
    case Kind::Neg:
    case Kind::Call: return dim_node(*n.a);
    default: return std::max(dim_node(*n.a), dim_node(*n.b));
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Expr public surface.

Expr Expr::parse(std::string_view src, int n) {
    require(n >= 1, ErrorCode::InvalidArgument, "dimension must be >= 1");
    Lexer lex(src);
    Parser parser(lex.run(), n);
    return Expr(parser.run());
}

Expr Expr::constant(double v) { return Expr(make_const(v)); }

Expr Expr::variable(int axis, int n) {
    require(axis >= 1 && axis <= n, ErrorCode::InvalidArgument,
            "variable axis out of range");
    return Expr(make_var(axis));
}

Expr Expr::add(const Expr& a, const Expr& b) { return Expr(make_binary(Kind::Add, a.node_, b.node_)); }
Expr Expr::sub(const Expr& a, const Expr& b) { return Expr(make_binary(Kind::Sub, a.node_, b.node_)); }
Expr Expr::mul(const Expr& a, const Expr& b) { return Expr(make_binary(Kind::Mul, a.node_, b.node_)); }
Expr Expr::div(const Expr& a, const Expr& b) { return Expr(make_binary(Kind::Div, a.node_, b.node_)); }
Expr Expr::pow(const Expr& a, const Expr& b) { return Expr(make_binary(Kind::Pow, a.node_, b.node_)); }
Expr Expr::neg(const Expr& a) { return Expr(make_neg(a.node_)); }
Expr Expr::sin(const Expr& a) { return Expr(make_call(Fn::Sin, a.node_)); }
Expr Expr::cos(const Expr& a) { return Expr(make_call(Fn::Cos, a.node_)); }
Expr Expr::exp(const Expr& a) { return Expr(make_call(Fn::Exp, a.node_)); }
Expr Expr::log(const Expr& a) { return Expr(make_call(Fn::Log, a.node_)); }
Expr Expr::sqrt(const Expr& a) { return Expr(make_call(Fn::Sqrt, a.node_)); }
Expr Expr::abs(const Expr& a) { return Expr(make_call(Fn::Abs, a.node_)); }
Expr Expr::sgn(const Expr& a) { return Expr(make_call(Fn::Sgn, a.node_)); }

double Expr::eval(std::span<const double> x) const {
    require(node_ != nullptr, ErrorCode::InvalidArgument, "empty expression");
    require(static_cast<int>(x.size()) >= dim(), ErrorCode::Dimension,
            "evaluation point has too few coordinates");
    return eval_node(*node_, x);
}

Expr Expr::derivative(int axis) const {
    require(node_ != nullptr, ErrorCode::InvalidArgument, "empty expression");
    require(axis >= 1, ErrorCode::InvalidArgument, "derivative axis must be >= 1");
    return Expr(diff_node(node_, axis));
}

std::string Expr::str() const {
    require(node_ != nullptr, ErrorCode::InvalidArgument, "empty expression");
    std::string out;
    print_node(*node_, out);
    return out;
}

int Expr::dim() const {
    require(node_ != nullptr, ErrorCode::InvalidArgument, "empty expression");
    return dim_node(*node_);
}

bool Expr::is_constant() const { return node_ && node_->kind == Kind::Const; }

double Expr::constant_value() const {
    require(is_constant(), ErrorCode::InvalidArgument, "expression is not constant");
    return node_->value;
}

} // namespace riemoc
