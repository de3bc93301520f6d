#include "s1deform/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "s1deform/errors.hpp"

namespace s1d {

namespace {

// Scale-aware zero test for constant terms of series arguments.
constexpr double kZeroTol = 1e-12;

void require_shape(const Jet& a, const Jet& b, const char* op) {
    if (!a.same_shape(b)) {
        throw UsageError(std::string(op) + ": jets differ in arity or order (" +
                         std::to_string(a.nvars()) + "," + std::to_string(a.order()) + ") vs (" +
                         std::to_string(b.nvars()) + "," + std::to_string(b.order()) + ")");
    }
}

// True when `j` is exactly the coordinate x_k (coefficient 1, nothing else).
int pure_variable(const Jet& j) {
    const auto& lay = j.layout();
    if (j.order() < 1) return -1;
    int found = -1;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i] == 0.0) continue;
        if (lay.degree(i) != 1 || j[i] != 1.0 || found >= 0) return -1;
        for (int k = 0; k < lay.nvars(); ++k) {
            if (lay.exponent(i)[static_cast<std::size_t>(k)] == 1) found = k;
        }
    }
    return found;
}

Jet shift_by_variable(const Jet& a, int var) {
    Jet r(a.nvars(), a.order());
    const auto& lay = a.layout();
    const std::size_t top = lay.degree_begin(a.order());
    for (std::size_t i = 0; i < top; ++i) {
        if (a[i] == 0.0) continue;
        Exponent e = lay.exponent(i);
        ++e[static_cast<std::size_t>(var)];
        r[static_cast<std::size_t>(lay.index(e))] = a[i];
    }
    return r;
}

Jet times_factor(const Jet& a, const Jet& factor, int factor_var) {
    return factor_var >= 0 ? shift_by_variable(a, factor_var) : a * factor;
}

Jet compose_impl(const Jet& outer, std::span<const Jet> inner) {
    if (static_cast<int>(inner.size()) != outer.nvars()) {
        throw UsageError("compose: outer has " + std::to_string(outer.nvars()) +
                         " variables but " + std::to_string(inner.size()) +
                         " inner jets were given");
    }
    if (inner.empty()) throw UsageError("compose: no inner jets");
    for (const auto& j : inner) require_shape(j, inner.front(), "compose");

    const Jet& proto = inner.front();
    const auto& olay = outer.layout();

    // Highest outer index with a nonzero coefficient bounds the powers needed.
    std::size_t last = 0;
    for (std::size_t i = 0; i < outer.size(); ++i) {
        if (outer[i] != 0.0) last = i;
    }

    std::array<int, kMaxVars> fast{-1, -1, -1};
    for (std::size_t k = 0; k < inner.size(); ++k) fast[k] = pure_variable(inner[k]);

    std::vector<Jet> powers;
    powers.reserve(last + 1);
    Jet result = Jet::constant(proto.nvars(), proto.order(), outer[0]);
    powers.push_back(Jet::constant(proto.nvars(), proto.order(), 1.0));
    for (std::size_t i = 1; i <= last; ++i) {
        Exponent e = olay.exponent(i);
        int k = 0;
        while (e[static_cast<std::size_t>(k)] == 0) ++k;
        --e[static_cast<std::size_t>(k)];
        const auto prev = static_cast<std::size_t>(olay.index(e));
        powers.push_back(times_factor(powers[prev], inner[static_cast<std::size_t>(k)],
                                      fast[static_cast<std::size_t>(k)]));
        if (outer[i] != 0.0) result += outer[i] * powers.back();
    }
    return result;
}

}  // namespace

// ---------------------------------------------------------------------------
// JetLayout

JetLayout::JetLayout(int nvars, int order) : nvars_(nvars), order_(order), stride_(order + 1) {
    if (nvars < 1 || nvars > kMaxVars) throw UsageError("jet: nvars must be 1..3");
    if (order < 0) throw UsageError("jet: negative order");
    for (int d = 0; d <= order; ++d) {
        begins_.push_back(exps_.size());
        if (nvars == 1) {
            exps_.push_back({d, 0, 0});
        } else if (nvars == 2) {
            for (int a = d; a >= 0; --a) exps_.push_back({a, d - a, 0});
        } else {
            for (int a = d; a >= 0; --a) {
                for (int b = d - a; b >= 0; --b) exps_.push_back({a, b, d - a - b});
            }
        }
    }
    begins_.push_back(exps_.size());
    degs_.reserve(exps_.size());
    for (const auto& e : exps_) degs_.push_back(total_degree(e));
    std::size_t cells = 1;
    for (int k = 0; k < nvars; ++k) cells *= static_cast<std::size_t>(stride_);
    lookup_.assign(cells, -1);
    for (std::size_t i = 0; i < exps_.size(); ++i) {
        const auto& e = exps_[i];
        const auto key = static_cast<std::size_t>(e[0] + stride_ * (e[1] + stride_ * e[2]));
        lookup_[key] = static_cast<std::ptrdiff_t>(i);
    }
}

std::ptrdiff_t JetLayout::index(const Exponent& e) const {
    int deg = 0;
    for (int k = 0; k < kMaxVars; ++k) {
        const int ek = e[static_cast<std::size_t>(k)];
        if (ek < 0 || (k >= nvars_ && ek != 0)) return -1;
        deg += ek;
    }
    if (deg > order_) return -1;
    return lookup_[static_cast<std::size_t>(e[0] + stride_ * (e[1] + stride_ * e[2]))];
}

std::shared_ptr<const JetLayout> JetLayout::get(int nvars, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{nvars, order}];
    if (!slot) slot = std::make_shared<const JetLayout>(nvars, order);
    return slot;
}

// ---------------------------------------------------------------------------
// Jet

Jet::Jet(int nvars, int order) : layout_(JetLayout::get(nvars, order)), c_(layout_->size(), 0.0) {}

Jet Jet::constant(int nvars, int order, double c) {
    Jet j(nvars, order);
    j.c_[0] = c;
    return j;
}

Jet Jet::variable(int nvars, int order, int var, double at) {
    if (var < 0 || var >= nvars) throw UsageError("jet: variable index out of range");
    Jet j(nvars, order);
    j.c_[0] = at;
    if (order >= 1) {
        Exponent e{0, 0, 0};
        e[static_cast<std::size_t>(var)] = 1;
        j.set(e, 1.0);
    }
    return j;
}

double Jet::coeff(const Exponent& e) const {
    const auto i = layout_->index(e);
    return i < 0 ? 0.0 : c_[static_cast<std::size_t>(i)];
}

void Jet::set(const Exponent& e, double value) {
    const auto i = layout_->index(e);
    if (i < 0) throw UsageError("jet: exponent outside the jet table");
    c_[static_cast<std::size_t>(i)] = value;
}

double Jet::max_abs() const {
    double m = 0.0;
    for (double x : c_) m = std::max(m, std::abs(x));
    return m;
}

double Jet::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != nvars()) throw UsageError("jet: evaluation point arity");
    // Powers of each coordinate, then one pass over the table.
    std::array<std::vector<double>, kMaxVars> pw;
    for (int k = 0; k < nvars(); ++k) {
        auto& p = pw[static_cast<std::size_t>(k)];
        p.resize(static_cast<std::size_t>(order()) + 1);
        p[0] = 1.0;
        for (std::size_t d = 1; d < p.size(); ++d) p[d] = p[d - 1] * x[static_cast<std::size_t>(k)];
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        double term = c_[i];
        const auto& e = exponent(i);
        for (int k = 0; k < nvars(); ++k) {
            term *= pw[static_cast<std::size_t>(k)][static_cast<std::size_t>(e[static_cast<std::size_t>(k)])];
        }
        sum += term;
    }
    return sum;
}

Jet& Jet::operator+=(const Jet& o) {
    require_shape(*this, o, "add");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    require_shape(*this, o, "sub");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator*=(double k) {
    for (double& x : c_) x *= k;
    return *this;
}

Jet Jet::operator-() const {
    Jet r = *this;
    for (double& x : r.c_) x = -x;
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    require_shape(a, b, "mul");
    const auto& lay = a.layout();
    const int n = a.order();
    Jet r(a.nvars(), n);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        const Exponent& ei = lay.exponent(i);
        const std::size_t limit = lay.degree_begin(n - lay.degree(i) + 1);
        for (std::size_t j = 0; j < limit; ++j) {
            const double bj = b[j];
            if (bj == 0.0) continue;
            const Exponent& ej = lay.exponent(j);
            const Exponent sum{ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2]};
            r[static_cast<std::size_t>(lay.index(sum))] += ai * bj;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Free functions

Jet partial(const Jet& a, int var) {
    if (var < 0 || var >= a.nvars()) throw UsageError("partial: variable index out of range");
    const auto& lay = a.layout();
    Jet r(a.nvars(), a.order());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Exponent& e = lay.exponent(i);
        const int p = e[static_cast<std::size_t>(var)];
        if (p == 0 || a[i] == 0.0) continue;
        Exponent d = e;
        --d[static_cast<std::size_t>(var)];
        r[static_cast<std::size_t>(lay.index(d))] = p * a[i];
    }
    return r;
}

Jet compose(const Jet& outer, std::span<const Jet> inner) {
    for (const auto& j : inner) {
        if (std::abs(j.constant_term()) > 0.0) {
            throw UsageError("compose: inner jet has nonzero constant term");
        }
    }
    if (!inner.empty() && inner.front().order() != outer.order()) {
        throw UsageError("compose: outer and inner orders differ");
    }
    return compose_impl(outer, inner);
}

Jet substitute(const Jet& outer, std::span<const Jet> inner) { return compose_impl(outer, inner); }

Jet recenter(const Jet& poly, std::span<const double> point) {
    if (static_cast<int>(point.size()) != poly.nvars()) throw UsageError("recenter: point arity");
    std::vector<Jet> inner;
    for (int k = 0; k < poly.nvars(); ++k) {
        inner.push_back(Jet::variable(poly.nvars(), poly.order(), k, point[static_cast<std::size_t>(k)]));
    }
    return compose_impl(poly, inner);
}

Jet recip(const Jet& a) {
    const double c = a.constant_term();
    if (std::abs(c) <= kZeroTol * std::max(1.0, a.max_abs())) {
        throw DomainError("recip: constant term is zero");
    }
    Jet x = a * (1.0 / c);
    x[0] = 0.0;
    // 1/(1+x) = 1 - x(1 - x(1 - ...)), Horner in x.
    Jet r = Jet::constant(a.nvars(), a.order(), 1.0);
    for (int k = 0; k < a.order(); ++k) r = -(x * r) + 1.0;
    return r * (1.0 / c);
}

Jet sqrt(const Jet& a) {
    const double c = a.constant_term();
    if (!(c > kZeroTol * std::max(1.0, a.max_abs()))) {
        throw DomainError("sqrt: constant term is not positive");
    }
    Jet x = a * (1.0 / c);
    x[0] = 0.0;
    // Binomial series of (1+x)^(1/2).
    const int n = a.order();
    std::vector<double> b(static_cast<std::size_t>(n) + 1);
    b[0] = 1.0;
    for (int k = 1; k <= n; ++k) b[static_cast<std::size_t>(k)] = b[static_cast<std::size_t>(k - 1)] * (0.5 - (k - 1)) / k;
    Jet r = Jet::constant(a.nvars(), n, b[static_cast<std::size_t>(n)]);
    for (int k = n - 1; k >= 0; --k) r = x * r + b[static_cast<std::size_t>(k)];
    return r * std::sqrt(c);
}

Jet pow(const Jet& a, int n) {
    if (n < 0) return recip(pow(a, -n));
    Jet result = Jet::constant(a.nvars(), a.order(), 1.0);
    Jet base = a;
    while (n > 0) {
        if (n & 1) result = result * base;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

Jet set_zero(const Jet& a, int var) {
    Jet r = a;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r.exponent(i)[static_cast<std::size_t>(var)] > 0) r[i] = 0.0;
    }
    return r;
}

MonomialQuotient divide_monomial(const Jet& a, const Exponent& e) {
    MonomialQuotient out{Jet(a.nvars(), a.order()), 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Exponent& ei = a.exponent(i);
        bool divisible = true;
        Exponent q{};
        for (int k = 0; k < kMaxVars; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            q[kk] = ei[kk] - e[kk];
            if (q[kk] < 0) divisible = false;
        }
        if (divisible) {
            out.quotient.set(q, a[i]);
        } else {
            out.remainder = std::max(out.remainder, std::abs(a[i]));
        }
    }
    return out;
}

Jet remap(const Jet& a, int nvars, std::span<const int> target_of) {
    if (static_cast<int>(target_of.size()) != a.nvars()) throw UsageError("remap: map arity");
    Jet r(nvars, a.order());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        const Exponent& e = a.exponent(i);
        Exponent ne{0, 0, 0};
        bool keep = true;
        for (int k = 0; k < a.nvars(); ++k) {
            const int p = e[static_cast<std::size_t>(k)];
            if (p == 0) continue;
            const int t = target_of[static_cast<std::size_t>(k)];
            if (t < 0) {
                keep = false;
                break;
            }
            if (t >= nvars) throw UsageError("remap: target variable out of range");
            ne[static_cast<std::size_t>(t)] += p;
        }
        if (keep) r.set(ne, r.coeff(ne) + a[i]);
    }
    return r;
}

Jet with_order(const Jet& a, int order) {
    Jet r(a.nvars(), order);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.layout().degree(i) <= order) r.set(a.exponent(i), a[i]);
    }
    return r;
}

int newton_steps(int order) {
    int steps = 0;
    while ((1 << steps) < order) ++steps;
    return steps + 1;
}

Jet implicit_solve(const Jet& lam) {
    if (lam.nvars() != 3) throw UsageError("implicit_solve: expects a jet in (u,v,s)");
    const double scale = std::max(1.0, lam.max_abs());
    if (std::abs(lam.constant_term()) > kZeroTol * scale) {
        throw UsageError("implicit_solve: lam(0) != 0");
    }
    const Jet lam_v = partial(lam, 1);
    if (std::abs(lam_v.constant_term()) <= kZeroTol * scale) {
        throw DegeneracyError("implicit_solve: d lam/dv (0) = 0");
    }
    const int n = lam.order();
    const std::array<Jet, 3> base{Jet::variable(2, n, 0), Jet(2, n), Jet::variable(2, n, 1)};
    Jet sigma(2, n);
    for (int it = 0; it < newton_steps(n); ++it) {
        std::array<Jet, 3> inner = base;
        inner[1] = sigma;
        const Jet r = compose(lam, inner);
        const Jet d = compose(lam_v, inner);
        sigma -= r * recip(d);
        sigma[0] = 0.0;
    }
    return sigma;
}

Jet invert_slot(const Jet& v, int slot) {
    const int nv = v.nvars();
    const int n = v.order();
    if (slot < 0 || slot >= nv) throw UsageError("invert_slot: slot out of range");
    const double scale = std::max(1.0, v.max_abs());
    if (std::abs(v.constant_term()) > kZeroTol * scale) {
        throw UsageError("map_invert: component does not vanish at the origin");
    }
    const Jet dv = partial(v, slot);
    const double d0 = dv.constant_term();
    if (std::abs(d0) <= kZeroTol * scale) {
        throw DegeneracyError("map_invert: derivative along the inverted coordinate vanishes");
    }
    std::vector<Jet> inner;
    for (int k = 0; k < nv; ++k) inner.push_back(Jet::variable(nv, n, k));
    const Jet x_slot = inner[static_cast<std::size_t>(slot)];
    Jet w = x_slot * (1.0 / d0);
    for (int it = 0; it < newton_steps(n); ++it) {
        inner[static_cast<std::size_t>(slot)] = w;
        const Jet r = compose(v, inner) - x_slot;
        const Jet d = compose(dv, inner);
        w -= r * recip(d);
        w[0] = 0.0;
    }
    return w;
}

JetTriple map_invert(const JetTriple& phi) {
    const int n = phi[0].order();
    for (const auto& c : phi) {
        if (c.nvars() != 3 || c.order() != n) throw UsageError("map_invert: expects three jets in (u,v,s)");
    }
    const Jet u = Jet::variable(3, n, 0);
    const Jet s = Jet::variable(3, n, 2);
    const double tol = kZeroTol * std::max(1.0, std::max(phi[0].max_abs(), phi[2].max_abs()));
    if ((phi[0] - u).max_abs() > tol || (phi[2] - s).max_abs() > tol) {
        throw UsageError("map_invert: first and third components must be the coordinates u and s");
    }
    return {u, invert_slot(phi[1], 1), s};
}

std::vector<double> branch_solve(const Jet& f) {
    if (f.nvars() != 2) throw UsageError("branch_solve: expects a jet in (u,t)");
    const int n = f.order();
    if (n < 2) throw UsageError("branch_solve: order must be at least 2");
    const double scale = std::max(1.0, f.max_abs());
    const double tol = kZeroTol * scale;
    const double f0 = f.coeff({0, 0, 0});
    const double fu = f.coeff({1, 0, 0});
    const double ft = f.coeff({0, 1, 0});
    const double a = f.coeff({2, 0, 0});
    const double b = f.coeff({1, 1, 0});
    const double c = f.coeff({0, 2, 0});
    if (std::abs(f0) > tol || std::abs(fu) > tol || std::abs(ft) > tol) {
        throw UsageError("branch_solve: F must vanish to first order at the origin");
    }
    if (std::abs(b) > tol) throw UsageError("branch_solve: mixed u*t term must vanish");
    if (!(a > tol) || !(c < -tol)) {
        throw DegeneracyError("branch_solve: leading quadratic is not of the form a u^2 - c t^2, a,c > 0");
    }
    std::vector<double> alpha(static_cast<std::size_t>(n - 1), 0.0);
    alpha[0] = std::sqrt(-c / a);
    const double slope = 2.0 * a * alpha[0];
    const std::array<Jet, 2> tvar{Jet(1, n), Jet::variable(1, n, 0)};
    for (int i = 2; i <= n - 1; ++i) {
        std::array<Jet, 2> inner = tvar;
        inner[0] = series_from_coefficients(alpha, n);
        const Jet r = compose(f, inner);
        alpha[static_cast<std::size_t>(i - 1)] = -r.coeff({i + 1, 0, 0}) / slope;
    }
    return alpha;
}

Jet series_from_coefficients(std::span<const double> alpha, int order) {
    Jet r(1, order);
    for (std::size_t i = 0; i < alpha.size() && static_cast<int>(i) + 1 <= order; ++i) {
        r.set({static_cast<int>(i) + 1, 0, 0}, alpha[i]);
    }
    return r;
}

}  // namespace s1d
