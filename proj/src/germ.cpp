#include "s1deform/germ.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "s1deform/errors.hpp"

namespace s1d {

namespace {

constexpr double kRankTol = 1e-9;

Eigen::Matrix<double, 3, 2> jacobian(const LocalDerivatives& d) {
    Eigen::Matrix<double, 3, 2> j;
    j.col(0) = d.fu;
    j.col(1) = d.fv;
    return j;
}

LocalDerivatives from_jets(const JetTriple& j) {
    LocalDerivatives d;
    for (int i = 0; i < 3; ++i) {
        const Jet& c = j[static_cast<std::size_t>(i)];
        d.f[i] = c.coeff({0, 0, 0});
        d.fu[i] = c.coeff({1, 0, 0});
        d.fv[i] = c.coeff({0, 1, 0});
        d.fuu[i] = 2.0 * c.coeff({2, 0, 0});
        d.fuv[i] = c.coeff({1, 1, 0});
        d.fvv[i] = 2.0 * c.coeff({0, 2, 0});
    }
    return d;
}

}  // namespace

MapGerm make_germ(std::array<Expr, 3> components) {
    MapGerm f;
    f.kind = GermKind::Germ;
    for (const auto& c : components) {
        if (!c) throw UsageError("germ component is empty");
        if (mentions_var(c, 2)) f.kind = GermKind::Deformation;
    }
    f.components = std::move(components);
    return f;
}

MapGerm parse_germ(std::string_view text) {
    auto exprs = parse_expression_list(text);
    if (exprs.size() != 3) {
        throw UsageError("a germ needs exactly three component expressions, got " + std::to_string(exprs.size()));
    }
    return make_germ({exprs[0], exprs[1], exprs[2]});
}

std::string to_string(const MapGerm& f) {
    return to_string(f.components[0]) + "; " + to_string(f.components[1]) + "; " + to_string(f.components[2]);
}

Vec3 evaluate(const MapGerm& f, const Point& p) {
    const auto x = p.coords();
    return {evaluate(f.components[0], x), evaluate(f.components[1], x), evaluate(f.components[2], x)};
}

JetTriple jet_at(const MapGerm& f, const Point& p, int order) {
    const auto x = p.coords();
    JetTriple out;
    for (int i = 0; i < 3; ++i) {
        out[static_cast<std::size_t>(i)] = evaluate_jet(f.components[static_cast<std::size_t>(i)], x, order);
    }
    return out;
}

LocalDerivatives local_derivatives(const MapGerm& f, const Point& p) { return from_jets(jet_at(f, p, 2)); }

LocalDerivatives local_derivatives(const JetTriple& poly, const Point& p) {
    const int n = poly[0].order();
    for (const auto& c : poly) {
        if (c.nvars() != 3 || c.order() != n) throw UsageError("local_derivatives: expects three jets in (u,v,s)");
    }
    // Powers x^k for k in [0, n]; index k-1 or k-2 below zero means the term drops.
    auto powers = [n](double x) {
        std::vector<double> pw(static_cast<std::size_t>(n) + 1, 1.0);
        for (int k = 1; k <= n; ++k) pw[static_cast<std::size_t>(k)] = pw[static_cast<std::size_t>(k - 1)] * x;
        return pw;
    };
    const auto pu = powers(p.u);
    const auto pv = powers(p.v);
    const auto ps = powers(p.s);
    auto at = [](const std::vector<double>& pw, int k) { return k < 0 ? 0.0 : pw[static_cast<std::size_t>(k)]; };

    LocalDerivatives d;
    const auto& lay = poly[0].layout();
    for (std::size_t m = 0; m < lay.size(); ++m) {
        const Exponent& e = lay.exponent(m);
        const int i = e[0];
        const int j = e[1];
        const double sk = ps[static_cast<std::size_t>(e[2])];
        const double val = at(pu, i) * at(pv, j) * sk;
        const double du = i * at(pu, i - 1) * at(pv, j) * sk;
        const double dv = j * at(pu, i) * at(pv, j - 1) * sk;
        const double duu = i * (i - 1) * at(pu, i - 2) * at(pv, j) * sk;
        const double duv = i * j * at(pu, i - 1) * at(pv, j - 1) * sk;
        const double dvv = j * (j - 1) * at(pu, i) * at(pv, j - 2) * sk;
        for (int c = 0; c < 3; ++c) {
            const double a = poly[static_cast<std::size_t>(c)][m];
            if (a == 0.0) continue;
            d.f[c] += a * val;
            d.fu[c] += a * du;
            d.fv[c] += a * dv;
            d.fuu[c] += a * duu;
            d.fuv[c] += a * duv;
            d.fvv[c] += a * dvv;
        }
    }
    return d;
}

int rank_at(const LocalDerivatives& d) {
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(jacobian(d));
    const auto sv = svd.singularValues();
    const double tol = kRankTol * (sv(0) + 1.0);
    int r = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) >= tol) ++r;
    }
    return r;
}

int rank_at(const MapGerm& f, const Point& p) { return rank_at(local_derivatives(f, p)); }

Vec2 null_vector(const LocalDerivatives& d) {
    if (rank_at(d) != 1) throw DomainError("null_vector: rank of df is not 1");
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(jacobian(d), Eigen::ComputeFullV);
    Vec2 n = svd.matrixV().col(1).normalized();
    const int lead = std::abs(n(0)) > 1e-12 ? 0 : 1;
    if (n(lead) < 0.0) n = -n;
    return n;
}

Vec2 null_vector(const MapGerm& f, const Point& p) { return null_vector(local_derivatives(f, p)); }

LocalDerivatives align_kernel(const LocalDerivatives& d) {
    const Vec2 n = null_vector(d);
    const Vec2 a(n(1), -n(0));  // det[a n] = +1
    LocalDerivatives r;
    r.f = d.f;
    r.fu = a(0) * d.fu + a(1) * d.fv;
    r.fv = n(0) * d.fu + n(1) * d.fv;
    r.fuu = a(0) * a(0) * d.fuu + 2.0 * a(0) * a(1) * d.fuv + a(1) * a(1) * d.fvv;
    r.fuv = a(0) * n(0) * d.fuu + (a(0) * n(1) + a(1) * n(0)) * d.fuv + a(1) * n(1) * d.fvv;
    r.fvv = n(0) * n(0) * d.fuu + 2.0 * n(0) * n(1) * d.fuv + n(1) * n(1) * d.fvv;
    return r;
}

AdmissibilityReport admissibility_check(const MapGerm& f, int order) {
    AdmissibilityReport rep;
    auto add = [&rep](std::string id, bool pass, std::string detail) {
        rep.clauses.push_back({std::move(id), pass, std::move(detail)});
        if (!pass && rep.failing_clause.empty()) rep.failing_clause = rep.clauses.back().id;
    };

    // (i) the base-point curve (0,0,s) maps to the origin.
    {
        const JetTriple j = jet_at(f, Point{}, order);
        double worst = 0.0;
        double scale = 1.0;
        for (const auto& c : j) {
            scale = std::max(scale, c.max_abs());
            for (int k = 0; k <= order; ++k) worst = std::max(worst, std::abs(c.coeff({0, 0, k})));
        }
        std::ostringstream msg;
        msg << "max |coefficient of s^k| in f(0,0,s) = " << worst;
        add("i", worst <= 1e-10 * scale, msg.str());
    }

    LocalDerivatives d;
    try {
        d = local_derivatives(f, Point{});
    } catch (const DomainError& e) {
        add("ii", false, std::string("cannot evaluate at the origin: ") + e.what());
        return rep;
    }

    const int rank = rank_at(d);
    add("ii", rank == 1, "rank df_0 = " + std::to_string(rank));
    if (rank != 1) {
        rep.pass = false;
        return rep;
    }

    const LocalDerivatives a = align_kernel(d);
    const Vec3 t = a.fu.normalized();
    const Vec3 normal_part = a.fvv - a.fvv.dot(t) * t;
    {
        std::ostringstream msg;
        msg << "|normal part of f_vv| = " << normal_part.norm();
        add("iii", normal_part.norm() > 1e-9 * (1.0 + a.fvv.norm()), msg.str());
    }
    {
        const double det = a.fu.dot(a.fvv.cross(a.fuv));
        const double scale = a.fu.norm() * a.fvv.norm() * a.fuv.norm() + 1.0;
        std::ostringstream msg;
        msg << "det[f_u, f_vv, f_uv] = " << det << " (nonzero means an umbrella, not an S1-type 2-jet)";
        add("iv", std::abs(det) <= 1e-9 * scale, msg.str());
    }
    rep.pass = rep.failing_clause.empty();
    return rep;
}

}  // namespace s1d
