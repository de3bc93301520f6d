#include "s1deform/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "s1deform/errors.hpp"
#include "s1deform/kernels.hpp"

namespace s1d {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double horner(const std::vector<double>& p, double x) {
    double r = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) r = r * x + p[k];
    return r;
}

double horner_derivative(const std::vector<double>& p, double x) {
    double r = 0.0;
    for (std::size_t k = p.size(); k-- > 1;) r = r * x + static_cast<double>(k) * p[k];
    return r;
}

// Parlett-Reinsch diagonal balancing, in place. Companion matrices of
// polynomials whose coefficients span many decades lose their small
// eigenvalues without it.
void balance(Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    constexpr double radix = 2.0;
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            const double s = c + r;
            double f = 1.0;
            double g = r / radix;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

// Real roots of sum p_k x^k via the balanced companion matrix, Newton-polished.
std::vector<double> real_roots(std::vector<double> p) {
    double big = 0.0;
    for (double c : p) big = std::max(big, std::abs(c));
    if (big == 0.0) throw DegeneracyError("singular_locus: F33(., s) vanishes identically");
    const double zero = 1e-14 * big;
    const std::vector<double> original = p;

    std::vector<double> roots;
    std::size_t lead = p.size();
    while (lead > 0 && std::abs(p[lead - 1]) <= zero) --lead;
    p.resize(lead);
    std::size_t low = 0;
    while (low < p.size() && std::abs(p[low]) <= zero) ++low;
    if (low > 0) roots.push_back(0.0);
    p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(low));

    const auto deg = static_cast<Eigen::Index>(p.size()) - 1;
    if (deg >= 1) {
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
        for (Eigen::Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
        for (Eigen::Index i = 0; i < deg; ++i) comp(i, deg - 1) = -p[static_cast<std::size_t>(i)] / p.back();
        balance(comp);
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        const auto ev = es.eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (std::abs(ev(i).imag()) >= 1e-8) continue;
            double x = ev(i).real();
            for (int it = 0; it < 4; ++it) {
                const double d = horner_derivative(original, x);
                if (d == 0.0) break;
                const double step = horner(original, x) / d;
                if (!std::isfinite(step)) break;
                x -= step;
            }
            roots.push_back(x);
        }
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> out;
    for (double r : roots) {
        if (!out.empty() && std::abs(r - out.back()) <= 1e-9 * (1.0 + std::abs(r))) continue;
        out.push_back(r);
    }
    return out;
}

// F33 restricted to a fixed s, as coefficients in u.
std::vector<double> f33_at(const Jet& f33, double s) {
    const int n = f33.order();
    std::vector<double> p(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t i = 0; i < f33.size(); ++i) {
        const Exponent& e = f33.exponent(i);
        p[static_cast<std::size_t>(e[0])] += f33[i] * std::pow(s, e[1]);
    }
    return p;
}

double series_at(const std::vector<double>& alpha, double t) {
    double r = 0.0;
    for (std::size_t k = alpha.size(); k-- > 0;) r = (r + alpha[k]) * t;
    return r;
}

UmbrellaInvariants nan_invariants() {
    UmbrellaInvariants inv;
    inv.a20 = inv.a11 = inv.a02 = inv.ku_ext = inv.ka = kNaN;
    return inv;
}

std::array<Jet, 3> cross(const std::array<Jet, 3>& a, const std::array<Jet, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Jet dot(const std::array<Jet, 3>& a, const std::array<Jet, 3>& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

std::array<Jet, 3> derivative(const std::array<Jet, 3>& a) { return {partial(a[0], 0), partial(a[1], 0), partial(a[2], 0)}; }

}  // namespace

const char* to_string(PointClass c) {
    switch (c) {
        case PointClass::Umbrella: return "umbrella";
        case PointClass::S1: return "S1";
        case PointClass::Degenerate: return "degenerate";
    }
    return "degenerate";
}

DeformationModel make_model(const MapGerm& f, int order, bool normalize) {
    DeformationModel m;
    m.nf = reduce(f, order);
    m.generic = std::abs(m.nf.F33.coeff({0, 1, 0})) > kClassifyTol;
    if (normalize) {
        if (!m.generic) throw DegeneracyError("deformation is not generic: dF33/ds(0,0) = 0");
        m.nf = normalize_parameter(m.nf);
    }
    m.cs = scalar_coefficients(m.nf);
    if (m.cs.c2_degenerate) throw DegeneracyError("c2(0) = 0: the singular locus expansion is unavailable");
    m.cls = classify(m.nf);
    m.epsilon = m.cs.c2_0 > 0.0 ? 1 : -1;
    m.poly = m.nf.assembled();
    return m;
}

std::vector<SingularPointRecord> singular_locus(const DeformationModel& m, double s, double r0) {
    std::vector<SingularPointRecord> out;
    const auto p = f33_at(m.nf.F33, s);
    for (double u : real_roots(p)) {
        if (std::abs(u) >= r0) continue;
        SingularPointRecord rec;
        rec.s = s;
        rec.s_tilde = std::sqrt(std::abs(s));
        rec.point = {u, 0.0, s};
        rec.residual = std::abs(horner(p, u));
        const LocalDerivatives d = local_derivatives(m.poly, rec.point);
        if (rank_at(d) == 1) {
            rec.conic = focal_conic(d).kind;
            if (whitney_test(d)) {
                rec.cls = PointClass::Umbrella;
                rec.inv = umbrella_invariants(d).inv;
            } else if (m.cls.kind != S1Class::Degenerate && std::abs(u) < 1e-9 && std::abs(s) < 1e-12) {
                rec.cls = PointClass::S1;
            }
        }
        out.push_back(rec);
    }
    return out;
}

LocusExpansion locus_expansion(const DeformationModel& m) {
    const CoefficientSet& c = m.cs;
    LocusExpansion le;
    le.epsilon = m.epsilon;
    const double eps = m.epsilon;
    const double c20 = c.c20;
    const double c1 = c.c1_0;
    const double c3 = eps * c.c3_0;
    const double c4 = eps * c.c4_00;
    const double c2s = c.c2_s0;
    le.alpha1 = 1.0 / c20;
    le.alpha2 = (c1 * c20 * c20 - c3) / (2.0 * std::pow(c20, 4));
    const double c20_2 = c20 * c20;
    const double c20_4 = c20_2 * c20_2;
    const double denom = 8.0 * std::pow(c20, 7);
    le.alpha3_alt_4c2s = ((c1 * c1 + 4.0 * c2s) * c20_4 - 2.0 * (3.0 * c3 * c1 + 2.0 * c4) * c20_2 - 5.0 * c3 * c3) / denom;
    le.alpha3_alt_14c2s = ((c1 * c1 + 14.0 * c2s) * c20_4 - 2.0 * (3.0 * c3 * c1 + 2.0 * c4) * c20_2 - 5.0 * c3 * c3) / denom;

    // F(u, t) = eps * F33(u, -eps t^2)
    const int n = m.nf.F33.order();
    const Jet t = Jet::variable(2, n, 1);
    const std::array<Jet, 2> inner{Jet::variable(2, n, 0), (-eps) * (t * t)};
    const Jet F = eps * compose(m.nf.F33, inner);
    le.alpha_oracle = branch_solve(F);
    le.alpha3 = le.alpha_oracle.size() >= 3 ? le.alpha_oracle[2] : kNaN;
    return le;
}

std::vector<double> GeometricGrid::values() const {
    std::vector<double> v;
    double x = start;
    for (int j = 0; j < n; ++j) {
        v.push_back(x);
        x *= ratio;
    }
    return v;
}

GeometricGrid parse_grid(const std::string& text) {
    GeometricGrid g;
    std::istringstream in(text);
    char c1 = 0;
    char c2 = 0;
    if (!(in >> g.start >> c1 >> g.ratio >> c2 >> g.n) || c1 != ':' || c2 != ':' || !in.eof()) {
        throw UsageError("grid must look like start:ratio:n, got '" + text + "'");
    }
    if (!(g.start > 0.0) || !(g.ratio > 0.0) || g.ratio == 1.0 || g.n < 1) {
        throw UsageError("grid needs start > 0, ratio > 0 and != 1, n >= 1");
    }
    return g;
}

TraceRow trace_row(const DeformationModel& m, const LocusExpansion& le, double s_tilde) {
    TraceRow row;
    row.s_tilde = s_tilde;
    row.s = -m.epsilon * s_tilde * s_tilde;
    row.plus = row.minus = nan_invariants();
    row.u_plus = row.u_minus = kNaN;

    const auto recs = singular_locus(m, row.s);
    auto nearest = [&recs](double target) -> const SingularPointRecord* {
        const SingularPointRecord* best = nullptr;
        for (const auto& r : recs) {
            if (!best || std::abs(r.point.u - target) < std::abs(best->point.u - target)) best = &r;
        }
        return best;
    };
    // Two terms are enough to tell the branches apart; the tail of the series
    // can be large and only hurts at the coarse end of the grid.
    const std::vector<double> head(le.alpha_oracle.begin(), le.alpha_oracle.begin() + std::min<std::size_t>(2, le.alpha_oracle.size()));
    const auto* plus = nearest(series_at(head, s_tilde));
    const auto* minus = nearest(series_at(head, -s_tilde));
    if (!plus || !minus || plus == minus) return row;
    row.found = true;
    row.u_plus = plus->point.u;
    row.u_minus = minus->point.u;
    if (plus->inv) row.plus = *plus->inv;
    if (minus->inv) row.minus = *minus->inv;
    row.conic_plus = plus->conic;
    row.conic_minus = minus->conic;
    return row;
}

TraceTable trace(const DeformationModel& m, const GeometricGrid& grid) {
    const LocusExpansion le = locus_expansion(m);
    const auto v = grid.values();
    return {grid, trace_rows_parallel(m, le, v)};
}

TraceTable trace(const MapGerm& f, const GeometricGrid& grid, int order) { return trace(make_model(f, order), grid); }

std::vector<double> richardson(const std::vector<double>& y, double ratio) {
    const std::size_t n = y.size();
    std::vector<double> prev;
    std::vector<double> cur;
    for (std::size_t j = 0; j < n; ++j) {
        cur.assign(j + 1, 0.0);
        cur[0] = y[j];
        double rk = 1.0;
        for (std::size_t k = 1; k <= j; ++k) {
            rk *= ratio;
            cur[k] = (cur[k - 1] - rk * prev[k - 1]) / (1.0 - rk);
        }
        prev = cur;
    }
    return prev;
}

AsymptoticReport asymptotic_limits(const TraceTable& t, const CoefficientSet& cs) {
    if (t.rows.size() < 4) throw UsageError("asymptotic_limits: need at least 4 grid points");
    const double ratio = t.grid.ratio;
    for (std::size_t j = 1; j < t.rows.size(); ++j) {
        const double r = t.rows[j].s_tilde / t.rows[j - 1].s_tilde;
        if (std::abs(r - ratio) > 1e-12 * std::abs(ratio)) throw UsageError("asymptotic_limits: grid is not geometric");
    }
    for (const auto& row : t.rows) {
        if (!row.found || !std::isfinite(row.plus.a02)) {
            throw DomainError("asymptotic_limits: a grid point has no umbrella pair (grid too coarse?)");
        }
    }

    auto column = [&t](auto get) {
        std::vector<double> y;
        for (const auto& row : t.rows) y.push_back(get(row));
        return y;
    };
    AsymptoticReport rep;
    auto add = [&rep, ratio](std::string name, const std::vector<double>& y, double theory) {
        const auto last = richardson(y, ratio);
        LimitEstimate e;
        e.name = std::move(name);
        e.extrapolated = last.back();
        e.theory = theory;
        e.residual = std::abs(e.extrapolated - theory);
        e.spread = last.size() >= 2 ? std::abs(last.back() - last[last.size() - 2]) : kNaN;
        rep.limits.push_back(e);
        return e.extrapolated;
    };
    const double two_c2 = 2.0 * cs.c20 * cs.c20;
    const double l20 = add("s2_a20", column([](const TraceRow& r) { return r.s_tilde * r.s_tilde * r.plus.a20; }),
                           cs.f31_0 * cs.f31_0 / two_c2);
    const double l11 = add("s2_a11", column([](const TraceRow& r) { return r.s_tilde * r.s_tilde * r.plus.a11; }),
                           cs.f31_0 / two_c2);
    const double l02 = add("s2_a02", column([](const TraceRow& r) { return r.s_tilde * r.s_tilde * r.plus.a02; }),
                           1.0 / two_c2);
    add("ku_ext", column([](const TraceRow& r) { return r.plus.ku_ext; }), 2.0 * std::abs(cs.f31_0));
    add("ka", column([](const TraceRow& r) { return r.plus.ka; }), 2.0 * std::abs(cs.f21_0));

    constexpr double kBound = 1e-6;
    auto bounded = [&](double l2, auto get) {
        if (std::abs(l2) > kBound) return false;
        const auto l1 = richardson(column(get), ratio).back();
        return std::abs(l1) <= kBound;
    };
    rep.a20_bounded = bounded(l20, [](const TraceRow& r) { return r.s_tilde * r.plus.a20; });
    rep.a11_bounded = bounded(l11, [](const TraceRow& r) { return r.s_tilde * r.plus.a11; });
    rep.a02_bounded = bounded(l02, [](const TraceRow& r) { return r.s_tilde * r.plus.a02; });
    rep.a20_bounded_theory = std::abs(cs.f31_0) <= 1e-9;
    rep.a11_bounded_theory = rep.a20_bounded_theory && std::abs(3.0 * cs.f31_u - cs.d1 * cs.f21_0) <= 1e-9;
    rep.all_hyperbolas = std::all_of(t.rows.begin(), t.rows.end(), [](const TraceRow& r) {
        return r.conic_plus == ConicKind::Hyperbola && r.conic_minus == ConicKind::Hyperbola;
    });
    return rep;
}

double gauss_radius(const CoefficientSet& cs, double theta) {
    const double c2 = cs.c20 * cs.c20;
    const double w = c2 + 3.0 * cs.d2;
    if (w > 0.0) return 1.0;
    const double sn = std::sin(theta);
    return std::sqrt(c2 / (-sn * sn * w + c2));
}

namespace {

struct ProbeOutcome {
    double u = kNaN;
    std::vector<GaussSample> samples;
    int agree = 0;
};

ProbeOutcome probe_once(const DeformationModel& m, const LocusExpansion& le, double s_tilde, int n_theta, int n_k) {
    ProbeOutcome out;
    const TraceRow row = trace_row(m, le, s_tilde);
    if (!row.found) return out;
    out.u = row.u_plus;
    std::vector<Point> pts;
    for (int i = 0; i < n_theta; ++i) {
        const double theta = 2.0 * std::numbers::pi * (i + 0.5) / n_theta;
        const double radius = gauss_radius(m.cs, theta);
        for (int j = 0; j < n_k; ++j) {
            const double k = radius * (j + 1) / (n_k + 1);
            GaussSample g;
            g.theta = theta;
            g.k = k;
            const double sn = std::sin(theta);
            g.predicted = (s_tilde * sn * m.cs.f31_0 > 0.0) ? 1 : -1;
            out.samples.push_back(g);
            pts.push_back({k * out.u * std::cos(theta), k * out.u * sn, row.s});
        }
    }
    const auto K = curvature_K_parallel(m.poly, pts);
    for (std::size_t i = 0; i < K.size(); ++i) {
        auto& g = out.samples[i];
        g.K = K[i];
        g.agree = (g.K > 0.0 && g.predicted > 0) || (g.K < 0.0 && g.predicted < 0);
        if (g.agree) ++out.agree;
    }
    return out;
}

}  // namespace

GaussProbeReport gauss_sign_probe(const DeformationModel& m, double s_tilde, int n_theta, int n_k, bool search) {
    if (std::abs(m.cs.f31_0) <= 1e-9) throw DomainError("gauss_sign_probe: requires f31(0) != 0");
    if (m.epsilon < 0) throw DomainError("gauss_sign_probe: the sign law is only established for c2(0) > 0");
    if (!m.nf.normalized) throw DomainError("gauss_sign_probe: needs the normalized parameter");
    if (n_theta < 1 || n_k < 1) throw UsageError("gauss_sign_probe: empty grid");
    if (s_tilde == 0.0) throw UsageError("gauss_sign_probe: s_tilde must be nonzero");
    const LocusExpansion le = locus_expansion(m);

    GaussProbeReport rep;
    rep.s_tilde = s_tilde;
    rep.n_theta = n_theta;
    rep.n_k = n_k;
    for (int i = 0; i < n_theta; ++i) {
        rep.thetas.push_back(2.0 * std::numbers::pi * (i + 0.5) / n_theta);
        rep.radius.push_back(gauss_radius(m.cs, rep.thetas.back()));
    }
    const ProbeOutcome o = probe_once(m, le, s_tilde, n_theta, n_k);
    rep.u = o.u;
    rep.samples = o.samples;
    rep.agree = o.agree;

    if (search) {
        const int total = n_theta * n_k;
        auto all_agree = [&](double st) { return probe_once(m, le, st, n_theta, n_k).agree == total; };
        double lo = 0.0;
        double hi = 0.5;
        if (all_agree(hi)) {
            lo = hi;
        } else {
            for (int it = 0; it < 20; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (all_agree(mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        rep.s_tilde0 = lo;
    }
    return rep;
}

TrajectoryReport trajectory_geometry(const DeformationModel& m) {
    const CoefficientSet& c = m.cs;
    const LocusExpansion le = locus_expansion(m);
    const int n = m.poly[0].order();
    const double eps = m.epsilon;

    const Jet t = Jet::variable(1, n, 0);
    const std::array<Jet, 3> inner{series_from_coefficients(le.alpha_oracle, n), Jet(1, n), (-eps) * (t * t)};
    std::array<Jet, 3> gamma;
    for (std::size_t i = 0; i < 3; ++i) gamma[i] = compose(m.poly[i], inner);

    const auto d1 = derivative(gamma);
    const auto d2 = derivative(d1);
    const auto d3 = derivative(d2);
    const auto c12 = cross(d1, d2);

    TrajectoryReport rep;
    rep.ku = 2.0 * std::abs(c.f31_0);
    rep.ka = 2.0 * std::abs(c.f21_0);
    const Jet speed2 = dot(d1, d1);
    const Jet area2 = dot(c12, c12);
    const double speed = std::sqrt(speed2.constant_term());
    rep.kappa0 = std::sqrt(std::max(0.0, area2.constant_term())) / (speed * speed * speed);
    if (rep.kappa0 <= 1e-9) {
        rep.note = "kappa(0) = 0: torsion undefined, recovery skipped";
        return rep;
    }
    const Jet kappa = sqrt(area2) * recip(pow(sqrt(speed2), 3));
    rep.kappa_prime0 = kappa.coeff({1, 0, 0});
    rep.tau0 = dot(c12, d3).constant_term() / area2.constant_term();

    if (m.epsilon < 0) {
        rep.note = "c2(0) < 0: recovery formulas assume c2(0) > 0, skipped";
        return rep;
    }
    const double k = rep.kappa0;
    const double kp = rep.kappa_prime0;
    const double den = 6.0 * c.c20 * c.c20;
    rep.recovered_f24 = (2.0 * rep.tau0 * c.f31_0 - 2.0 * kp * c.c20 * c.f21_0 / k + 6.0 * c.f21_u) / den;
    rep.recovered_f34 = (-2.0 * rep.tau0 * c.f21_0 - 2.0 * kp * c.c20 * c.f31_0 / k + 6.0 * c.f31_u) / den;
    rep.flipped_f24 = (2.0 * rep.tau0 * c.f31_0 + 2.0 * kp * c.c20 * c.f21_0 / k + 6.0 * c.f21_u) / den;
    rep.flipped_f34 = (-2.0 * rep.tau0 * c.f21_0 + 2.0 * kp * c.c20 * c.f31_0 / k + 6.0 * c.f31_u) / den;
    rep.recovered = true;
    return rep;
}

}  // namespace s1d
