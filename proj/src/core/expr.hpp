#ifndef RIEMOC_CORE_EXPR_HPP
#define RIEMOC_CORE_EXPR_HPP

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace riemoc {

/// Arithmetic expressions over the grid coordinates x1..xn.
///
/// Grammar (loosest to tightest binding):
///     sum     :=  product (('+' | '-') product)*
///     product :=  unary (('*' | '/') unary)*
///     unary   :=  '-' unary | power
///     power   :=  atom ('^' unary)?          -- right associative
///     atom    :=  number | 'x'<digits> | name '(' sum ')' | '(' sum ')'
/// Recognized functions: sin, cos, exp, log, sqrt, abs, sgn.
/// No implicit multiplication; `2x1` is a parse error.
///
/// Expressions are immutable; Expr is a cheap value handle (shared AST).
class Expr {
public:
    Expr() = default;

    /// Parse `src` with variables restricted to x1..xn.
    /// Throws ParseError (with byte offset) on malformed input.
    static Expr parse(std::string_view src, int n);

    // Builders, used to assemble derived expressions (determinants,
    // integrands) without going through text.
    static Expr constant(double v);
    static Expr variable(int axis, int n); // 1-based axis
    static Expr add(const Expr& a, const Expr& b);
    static Expr sub(const Expr& a, const Expr& b);
    static Expr mul(const Expr& a, const Expr& b);
    static Expr div(const Expr& a, const Expr& b);
    static Expr pow(const Expr& a, const Expr& b);
    static Expr neg(const Expr& a);
    static Expr sin(const Expr& a);
    static Expr cos(const Expr& a);
    static Expr exp(const Expr& a);
    static Expr log(const Expr& a);
    static Expr sqrt(const Expr& a);
    static Expr abs(const Expr& a);
    static Expr sgn(const Expr& a);

    /// IEEE double evaluation at x (size must be >= dim()).
    /// Division by zero, log(v<=0) and sqrt(v<0) throw EvalError; a NaN is
    /// never returned silently. sgn(0) evaluates to 0.
    double eval(std::span<const double> x) const;

    /// Exact symbolic partial derivative along `axis` (1-based), with
    /// constant folding. d(sgn u) = 0 and d|u| = sgn(u) u' away from u = 0.
    /// Never throws; domain errors surface at evaluation time.
    Expr derivative(int axis) const;

    /// Canonical rendering; parse(str()) round-trips to the same string.
    std::string str() const;

    /// Smallest n such that the expression is valid over x1..xn.
    int dim() const;

    bool is_constant() const;
    double constant_value() const; // requires is_constant()

    bool valid() const { return node_ != nullptr; }

    // AST node; defined in expr.cpp only.
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

private:
    explicit Expr(NodePtr node) : node_(std::move(node)) {}

    NodePtr node_;
};

} // namespace riemoc

#endif
