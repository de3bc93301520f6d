#pragma once

// Expression trees over the variables u, v, s. Immutable after construction;
// subtrees are shared freely.

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "s1deform/jet.hpp"

namespace s1d {

enum class Op { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Sqrt };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    Op op = Op::Num;
    double value = 0.0;  // Num
    std::string text;    // Num: literal as written ("0.25", "1/4")
    int var = 0;         // Var: 0=u, 1=v, 2=s
    int exponent = 0;    // Pow
    Expr lhs;            // unary operand / left operand
    Expr rhs;
};

Expr make_num(double value);
Expr make_num(double value, std::string text);
Expr make_var(int var);
Expr make_neg(Expr a);
Expr make_binary(Op op, Expr a, Expr b);
Expr make_pow(Expr base, int exponent);
Expr make_sqrt(Expr a);

/// Parses one expression (no separators).
Expr parse_expression(std::string_view text);

/// Expressions separated by ';' or by newlines outside parentheses; '#'
/// starts a comment. Errors carry line and column.
std::vector<Expr> parse_expression_list(std::string_view text);

/// Fully parenthesized form; parse_expression(to_string(e)) is structurally
/// equal to e.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

bool mentions_var(const Expr& e, int var);

/// Replaces u, v, s by the given expressions.
Expr substitute(const Expr& e, const std::array<Expr, 3>& by);

/// Throws DomainError on division by zero, sqrt of a negative number, or a
/// negative power of zero.
double evaluate(const Expr& e, const std::array<double, 3>& point);

/// Taylor jet of `e` about `point` in the local coordinates (u-u0, v-v0, s-s0).
Jet evaluate_jet(const Expr& e, const std::array<double, 3>& point, int order);

const char* var_name(int var);

}  // namespace s1d
