#include "s1deform/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "s1deform/errors.hpp"

namespace s1d {

namespace {

std::string shortest(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Sep, End };

struct Token {
    Tok kind;
    std::string text;
    double value = 0.0;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        int depth = 0;
        while (true) {
            skip_blanks_and_comments();
            Token t{Tok::End, "", 0.0, line_, col_};
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (c == '\n') {
                advance();
                if (depth == 0) {
                    t.kind = Tok::Sep;
                    out.push_back(t);
                }
                continue;
            }
            if (c == ';') {
                if (depth != 0) throw ParseError("';' inside parentheses", line_, col_);
                advance();
                t.kind = Tok::Sep;
                out.push_back(t);
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                // Right after '^' a number is an exponent, so "v^2/2" is v^2 halved.
                out.push_back(number(!in_exponent(out)));
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    advance();
                }
                t.kind = Tok::Ident;
                t.text = std::string(src_.substr(start, pos_ - start));
                out.push_back(t);
                continue;
            }
            switch (c) {
                case '+': t.kind = Tok::Plus; break;
                case '-': t.kind = Tok::Minus; break;
                case '*': t.kind = Tok::Star; break;
                case '/': t.kind = Tok::Slash; break;
                case '^': t.kind = Tok::Caret; break;
                case '(': t.kind = Tok::LParen; ++depth; break;
                case ')':
                    t.kind = Tok::RParen;
                    if (--depth < 0) throw ParseError("unbalanced ')'", line_, col_);
                    break;
                default:
                    throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
            }
            t.text = std::string(1, c);
            advance();
            out.push_back(t);
        }
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_blanks_and_comments() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    bool digit_at(std::size_t p) const {
        return p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]));
    }

    static bool in_exponent(const std::vector<Token>& out) {
        std::size_t i = out.size();
        if (i > 0 && (out[i - 1].kind == Tok::Minus || out[i - 1].kind == Tok::Plus)) --i;
        if (i > 0 && out[i - 1].kind == Tok::LParen) --i;
        return i > 0 && out[i - 1].kind == Tok::Caret;
    }

    Token number(bool allow_rational) {
        Token t{Tok::Number, "", 0.0, line_, col_};
        const std::size_t start = pos_;
        bool integral = true;
        while (digit_at(pos_)) advance();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            integral = false;
            advance();
            while (digit_at(pos_)) advance();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (digit_at(p)) {
                integral = false;
                while (pos_ < p) advance();
                while (digit_at(pos_)) advance();
            }
        }
        std::string lit(src_.substr(start, pos_ - start));
        if (lit == ".") throw ParseError("malformed number", t.line, t.column);
        double value = 0.0;
        auto res = std::from_chars(lit.data(), lit.data() + lit.size(), value);
        if (res.ec != std::errc{} || res.ptr != lit.data() + lit.size()) {
            throw ParseError("malformed number '" + lit + "'", t.line, t.column);
        }
        // p/q rational literal: integer '/' integer with no blanks in between.
        if (allow_rational && integral && pos_ + 1 < src_.size() && src_[pos_] == '/' && digit_at(pos_ + 1)) {
            std::size_t p = pos_ + 1;
            while (digit_at(p)) ++p;
            const bool frac_tail = p < src_.size() && (src_[p] == '.' || src_[p] == 'e' || src_[p] == 'E');
            if (!frac_tail) {
                advance();
                const std::size_t dstart = pos_;
                while (digit_at(pos_)) advance();
                std::string den(src_.substr(dstart, pos_ - dstart));
                double q = 0.0;
                std::from_chars(den.data(), den.data() + den.size(), q);
                if (q == 0.0) throw ParseError("zero denominator in rational literal", t.line, t.column);
                lit += "/" + den;
                value /= q;
            }
        }
        t.text = lit;
        t.value = value;
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    std::vector<Expr> statements() {
        std::vector<Expr> out;
        while (true) {
            while (peek().kind == Tok::Sep) ++pos_;
            if (peek().kind == Tok::End) return out;
            out.push_back(expr());
            if (peek().kind != Tok::Sep && peek().kind != Tok::End) fail("expected ';' or newline");
        }
    }

    Expr single() {
        while (peek().kind == Tok::Sep) ++pos_;
        if (peek().kind == Tok::End) fail("empty expression");
        Expr e = expr();
        while (peek().kind == Tok::Sep) ++pos_;
        if (peek().kind != Tok::End) fail("trailing input after expression");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        std::string what = msg;
        if (t.kind == Tok::End) {
            what += " (at end of input)";
        } else if (!t.text.empty()) {
            what += " (found '" + t.text + "')";
        }
        throw ParseError(what, t.line, t.column);
    }

    void expect(Tok kind, const char* what) {
        if (peek().kind != kind) fail(std::string("expected ") + what);
        ++pos_;
    }

    Expr expr() {
        Expr lhs = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const Op op = next().kind == Tok::Plus ? Op::Add : Op::Sub;
            lhs = make_binary(op, lhs, term());
        }
        return lhs;
    }

    Expr term() {
        Expr lhs = unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const Op op = next().kind == Tok::Star ? Op::Mul : Op::Div;
            lhs = make_binary(op, lhs, unary());
        }
        return lhs;
    }

    Expr unary() {
        if (peek().kind == Tok::Minus) {
            ++pos_;
            return make_neg(unary());
        }
        if (peek().kind == Tok::Plus) {
            ++pos_;
            return unary();
        }
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (peek().kind != Tok::Caret) return base;
        ++pos_;
        bool paren = false;
        if (peek().kind == Tok::LParen) {
            paren = true;
            ++pos_;
        }
        int sign = 1;
        if (peek().kind == Tok::Minus || peek().kind == Tok::Plus) {
            if (next().kind == Tok::Minus) sign = -1;
        }
        if (peek().kind != Tok::Number) fail("expected an integer exponent");
        const Token& t = next();
        if (t.text.find_first_not_of("0123456789") != std::string::npos || t.value > 64.0) {
            --pos_;
            fail("exponent must be an integer literal between -64 and 64");
        }
        if (paren) expect(Tok::RParen, "')'");
        return make_pow(base, sign * static_cast<int>(t.value));
    }

    Expr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number:
                ++pos_;
                return make_num(t.value, t.text);
            case Tok::Ident: {
                ++pos_;
                if (t.text == "u") return make_var(0);
                if (t.text == "v") return make_var(1);
                if (t.text == "s") return make_var(2);
                if (t.text == "sqrt") {
                    expect(Tok::LParen, "'(' after sqrt");
                    Expr a = expr();
                    expect(Tok::RParen, "')'");
                    return make_sqrt(a);
                }
                --pos_;
                fail("unknown identifier '" + t.text + "'");
            }
            case Tok::LParen: {
                ++pos_;
                Expr e = expr();
                expect(Tok::RParen, "')'");
                return e;
            }
            default:
                fail("expected a number, variable, or '('");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation over doubles and jets

struct ScalarOps {
    using T = double;
    const std::array<double, 3>* point;
    T num(double x) const { return x; }
    T var(int k) const { return (*point)[static_cast<std::size_t>(k)]; }
    T div(const T& a, const T& b) const {
        if (b == 0.0) throw DomainError("division by zero");
        return a / b;
    }
    T pow(const T& a, int n) const {
        if (n < 0 && a == 0.0) throw DomainError("negative power of zero");
        return std::pow(a, n);
    }
    T sqrt(const T& a) const {
        if (a < 0.0) throw DomainError("sqrt of a negative number");
        return std::sqrt(a);
    }
};

struct JetOps {
    using T = Jet;
    const std::array<double, 3>* point;
    int order;
    T num(double x) const { return Jet::constant(3, order, x); }
    T var(int k) const { return Jet::variable(3, order, k, (*point)[static_cast<std::size_t>(k)]); }
    T div(const T& a, const T& b) const {
        if (b.constant_term() == 0.0) throw DomainError("division by zero");
        return a * recip(b);
    }
    T pow(const T& a, int n) const {
        if (n < 0 && a.constant_term() == 0.0) throw DomainError("negative power of zero");
        return s1d::pow(a, n);
    }
    T sqrt(const T& a) const {
        if (!(a.constant_term() > 0.0)) throw DomainError("sqrt of a nonpositive value (jet needs a positive base)");
        return s1d::sqrt(a);
    }
};

template <class Ops>
typename Ops::T eval(const Expr& e, const Ops& ops) {
    using T = typename Ops::T;
    switch (e->op) {
        case Op::Num: return ops.num(e->value);
        case Op::Var: return ops.var(e->var);
        case Op::Neg: return -eval(e->lhs, ops);
        case Op::Add: return T(eval(e->lhs, ops) + eval(e->rhs, ops));
        case Op::Sub: return T(eval(e->lhs, ops) - eval(e->rhs, ops));
        case Op::Mul: return T(eval(e->lhs, ops) * eval(e->rhs, ops));
        case Op::Div: return ops.div(eval(e->lhs, ops), eval(e->rhs, ops));
        case Op::Pow: return ops.pow(eval(e->lhs, ops), e->exponent);
        case Op::Sqrt: return ops.sqrt(eval(e->lhs, ops));
    }
    throw UsageError("corrupt expression node");
}

const char* op_symbol(Op op) {
    switch (op) {
        case Op::Add: return " + ";
        case Op::Sub: return " - ";
        case Op::Mul: return " * ";
        case Op::Div: return " / ";
        default: return "?";
    }
}

}  // namespace

// ---------------------------------------------------------------------------

Expr make_num(double value) {
    if (value < 0.0 || (value == 0.0 && std::signbit(value))) return make_neg(make_num(-value));
    return make_num(value, shortest(value));
}

Expr make_num(double value, std::string text) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Num;
    n->value = value;
    n->text = std::move(text);
    return n;
}

Expr make_var(int var) {
    if (var < 0 || var > 2) throw UsageError("variable index out of range");
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Var;
    n->var = var;
    return n;
}

Expr make_neg(Expr a) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Neg;
    n->lhs = std::move(a);
    return n;
}

Expr make_binary(Op op, Expr a, Expr b) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

Expr make_pow(Expr base, int exponent) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Pow;
    n->lhs = std::move(base);
    n->exponent = exponent;
    return n;
}

Expr make_sqrt(Expr a) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Sqrt;
    n->lhs = std::move(a);
    return n;
}

Expr parse_expression(std::string_view text) { return Parser(Lexer(text).run()).single(); }

std::vector<Expr> parse_expression_list(std::string_view text) {
    return Parser(Lexer(text).run()).statements();
}

std::string to_string(const Expr& e) {
    switch (e->op) {
        case Op::Num: return e->text;
        case Op::Var: return var_name(e->var);
        case Op::Neg: return "(-" + to_string(e->lhs) + ")";
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: return "(" + to_string(e->lhs) + op_symbol(e->op) + to_string(e->rhs) + ")";
        case Op::Pow:
            if (e->exponent < 0) return to_string(e->lhs) + "^(" + std::to_string(e->exponent) + ")";
            return to_string(e->lhs) + "^" + std::to_string(e->exponent);
        case Op::Sqrt: return "sqrt(" + to_string(e->lhs) + ")";
    }
    return "?";
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a == b) return true;
    if (!a || !b || a->op != b->op) return false;
    switch (a->op) {
        case Op::Num: return a->value == b->value;
        case Op::Var: return a->var == b->var;
        case Op::Pow: return a->exponent == b->exponent && structurally_equal(a->lhs, b->lhs);
        case Op::Neg:
        case Op::Sqrt: return structurally_equal(a->lhs, b->lhs);
        default: return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
    }
}

bool mentions_var(const Expr& e, int var) {
    if (!e) return false;
    if (e->op == Op::Var) return e->var == var;
    return mentions_var(e->lhs, var) || mentions_var(e->rhs, var);
}

Expr substitute(const Expr& e, const std::array<Expr, 3>& by) {
    switch (e->op) {
        case Op::Num: return e;
        case Op::Var: return by[static_cast<std::size_t>(e->var)];
        case Op::Neg: return make_neg(substitute(e->lhs, by));
        case Op::Pow: return make_pow(substitute(e->lhs, by), e->exponent);
        case Op::Sqrt: return make_sqrt(substitute(e->lhs, by));
        default: return make_binary(e->op, substitute(e->lhs, by), substitute(e->rhs, by));
    }
}

double evaluate(const Expr& e, const std::array<double, 3>& point) { return eval(e, ScalarOps{&point}); }

Jet evaluate_jet(const Expr& e, const std::array<double, 3>& point, int order) {
    return eval(e, JetOps{&point, order});
}

const char* var_name(int var) {
    static const char* names[] = {"u", "v", "s"};
    return names[var];
}

}  // namespace s1d
