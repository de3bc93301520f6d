#pragma once

// Dense truncated multivariate Taylor series ("jets") in up to three
// variables. Every operation truncates at the jet order; nothing is ever
// silently extended.

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace s1d {

inline constexpr int kMaxVars = 3;

/// Multi-index; entries past `nvars` are always zero.
using Exponent = std::array<int, kMaxVars>;

inline int total_degree(const Exponent& e) { return e[0] + e[1] + e[2]; }

/// Graded monomial table for a fixed (nvars, order). Degree 0 first, then
/// degree 1, ...; inside a degree, exponents of the first variable descend.
/// Layouts are interned, so two jets with equal shape share one table.
class JetLayout {
public:
    static std::shared_ptr<const JetLayout> get(int nvars, int order);

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    std::size_t size() const { return exps_.size(); }
    const Exponent& exponent(std::size_t i) const { return exps_[i]; }
    int degree(std::size_t i) const { return degs_[i]; }
    /// Index of the first monomial of degree `d`; `degree_begin(order+1) == size()`.
    std::size_t degree_begin(int d) const { return begins_[static_cast<std::size_t>(d)]; }
    /// -1 when the exponent is outside the table.
    std::ptrdiff_t index(const Exponent& e) const;

    JetLayout(int nvars, int order);

private:
    int nvars_;
    int order_;
    int stride_;
    std::vector<Exponent> exps_;
    std::vector<int> degs_;
    std::vector<std::size_t> begins_;
    std::vector<std::ptrdiff_t> lookup_;
};

class Jet {
public:
    Jet() = default;
    Jet(int nvars, int order);

    static Jet constant(int nvars, int order, double c);
    /// `at + x_var`; with `at == 0` this is the coordinate function itself.
    static Jet variable(int nvars, int order, int var, double at = 0.0);

    int nvars() const { return layout_->nvars(); }
    int order() const { return layout_->order(); }
    std::size_t size() const { return c_.size(); }
    const JetLayout& layout() const { return *layout_; }
    bool same_shape(const Jet& o) const { return layout_ == o.layout_; }

    double operator[](std::size_t i) const { return c_[i]; }
    double& operator[](std::size_t i) { return c_[i]; }
    const Exponent& exponent(std::size_t i) const { return layout_->exponent(i); }

    /// Coefficient of x^e; zero for exponents above the order.
    double coeff(const Exponent& e) const;
    void set(const Exponent& e, double value);

    std::span<const double> coeffs() const { return c_; }
    double constant_term() const { return c_.front(); }
    double max_abs() const;

    /// Plain polynomial evaluation of the stored coefficients.
    double evaluate(std::span<const double> x) const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(double k);
    Jet operator-() const;

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double k) { return a *= k; }
    friend Jet operator*(double k, Jet a) { return a *= k; }
    friend Jet operator*(const Jet& a, const Jet& b);

    friend Jet operator+(Jet a, double k) {
        a.c_[0] += k;
        return a;
    }
    friend Jet operator-(Jet a, double k) {
        a.c_[0] -= k;
        return a;
    }

private:
    std::shared_ptr<const JetLayout> layout_;
    std::vector<double> c_;
};

/// Formal partial derivative. The result keeps the input shape; its top
/// degree is necessarily zero.
Jet partial(const Jet& a, int var);

/// outer(inner_0, ..., inner_{k-1}) truncated at the inner order. Every inner
/// jet must have zero constant term and the same shape; outer.nvars() == k.
Jet compose(const Jet& outer, std::span<const Jet> inner);

/// Same as `compose` but without the zero-constant requirement. Exact only
/// when `outer` is treated as a polynomial (all its terms are kept).
Jet substitute(const Jet& outer, std::span<const Jet> inner);

/// Re-expands the polynomial `poly` about `point` (one entry per variable).
Jet recenter(const Jet& poly, std::span<const double> point);

Jet sqrt(const Jet& a);
Jet recip(const Jet& a);
Jet pow(const Jet& a, int n);

/// a with x_var := 0.
Jet set_zero(const Jet& a, int var);

struct MonomialQuotient {
    Jet quotient;
    /// Largest |coefficient| that was not divisible by the monomial.
    double remainder;
};

/// Exact division by x^e as a coefficient shift.
MonomialQuotient divide_monomial(const Jet& a, const Exponent& e);

/// Moves the jet into `nvars` variables: old variable i becomes new variable
/// `target_of[i]`, or is dropped when `target_of[i] < 0` (monomials that use a
/// dropped variable are discarded).
Jet remap(const Jet& a, int nvars, std::span<const int> target_of);

/// Truncates or zero-pads to `order`.
Jet with_order(const Jet& a, int order);

/// Newton iteration count used by the series solvers: ceil(log2 N) + 1.
int newton_steps(int order);

/// Solves lam(u, sigma(u,s), s) = 0 for sigma in (u, s). lam is a jet in
/// (u, v, s) with lam(0) = 0 and d lam/dv (0) != 0.
Jet implicit_solve(const Jet& lam);

/// Finds W with V(x | x_slot := W) = x_slot, i.e. the slot component of the
/// inverse of the map that is the identity except in `slot`.
Jet invert_slot(const Jet& v, int slot);

using JetTriple = std::array<Jet, 3>;

/// Inverse of (u, V(u,v,s), s).
JetTriple map_invert(const JetTriple& phi);

/// Branch u(t) = sum alpha_i t^i of F(u, t) = 0 for F = -c t^2 + a u^2 + ...
/// with a > 0, c > 0; alpha_1 > 0. Returns alpha_1 .. alpha_{N-1}.
std::vector<double> branch_solve(const Jet& f);

/// Univariate jet sum alpha_i t^i of the given order.
Jet series_from_coefficients(std::span<const double> alpha, int order);

}  // namespace s1d
