#include "s1deform/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace s1d {

namespace {

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json vec(const Eigen::Ref<const Eigen::VectorXd>& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
    return a;
}

Json mat(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
    return a;
}

Json basis(const std::array<Vec3, 2>& b) { return Json::array({vec(b[0]), vec(b[1])}); }

// Fixed 4-decimal SVG coordinate without a negative zero.
std::string fixed4(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    std::string s = buf;
    if (s == "-0.0000") s = "0.0000";
    return s;
}

}  // namespace

Json to_json(const Jet& j) {
    Json terms = Json::array();
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i] == 0.0) continue;
        const Exponent& e = j.exponent(i);
        Json exp = Json::array();
        for (int k = 0; k < j.nvars(); ++k) exp.push_back(e[static_cast<std::size_t>(k)]);
        terms.push_back({{"exponent", exp}, {"coefficient", num(j[i])}});
    }
    return {{"nvars", j.nvars()}, {"order", j.order()}, {"terms", terms}};
}

Json to_json(const AdmissibilityReport& r) {
    Json clauses = Json::array();
    for (const auto& c : r.clauses) clauses.push_back({{"id", c.id}, {"pass", c.pass}, {"detail", c.detail}});
    return {{"pass", r.pass}, {"clauses", clauses}, {"failing_clause", r.failing_clause}};
}

Json to_json(const NormalFormData& nf) {
    Json log = Json::array();
    for (const auto& s : nf.source_log) {
        Json step = {{"kind", s.kind}};
        if (s.kind == "linear") {
            step["linear"] = mat(s.linear);
        } else {
            step["jet"] = to_json(s.jet);
        }
        log.push_back(step);
    }
    return {{"order", nf.order},
            {"rotation", mat(nf.rotation)},
            {"source_log", log},
            {"normalized", nf.normalized},
            {"parameter_reversed", nf.parameter_reversed},
            {"F21", to_json(nf.F21)},
            {"F24", to_json(nf.F24)},
            {"F31", to_json(nf.F31)},
            {"F32", to_json(nf.F32)},
            {"F33", to_json(nf.F33)},
            {"F34", to_json(nf.F34)}};
}

Json to_json(const CoefficientSet& c) {
    return {{"f21_0", num(c.f21_0)}, {"f21_u", num(c.f21_u)},   {"f31_0", num(c.f31_0)},
            {"f31_u", num(c.f31_u)}, {"f24_00", num(c.f24_00)}, {"f34_00", num(c.f34_00)},
            {"c1_0", num(c.c1_0)},   {"c2_0", num(c.c2_0)},     {"c20", num(c.c20)},
            {"c2_s0", num(c.c2_s0)}, {"c3_0", num(c.c3_0)},     {"c4_00", num(c.c4_00)},
            {"d1", num(c.d1)},       {"d2", num(c.d2)},         {"d3", num(c.d3)},
            {"df33_ds", num(c.df33_ds)}, {"c2_degenerate", c.c2_degenerate}};
}

Json to_json(const Classification& c) { return {{"kind", to_string(c.kind)}, {"discriminant", num(c.discriminant)}}; }

Json to_json(const std::vector<MonomialEntry>& m) {
    Json o = Json::object();
    for (const auto& e : m) {
        o[e.name] = {{"value", num(e.value)},
                     {"slope", num(e.slope)},
                     {"value_alt", num(e.value_alt)},
                     {"slope_alt", num(e.slope_alt)}};
    }
    return o;
}

Json to_json(const FundamentalScalars& s) {
    return {{"A", num(s.A)}, {"B", num(s.B)}, {"C", num(s.C)}, {"D", num(s.D)}, {"E", num(s.E_inv)}};
}

Json to_json(const UmbrellaInvariants& inv) {
    return {{"a20", num(inv.a20)},       {"a11", num(inv.a11)}, {"a02", num(inv.a02)},
            {"ku_ext", num(inv.ku_ext)}, {"ka", num(inv.ka)},   {"v_flipped", inv.v_flipped}};
}

Json to_json(const CurvatureParabola& p) {
    Json o = {{"plane_basis", basis(p.plane_basis)},
              {"kind", to_string(p.kind)},
              {"vertex", vec(p.vertex)},
              {"axis_dir", vec(p.axis_dir)},
              {"ka", num(p.ka)}};
    o["ku"] = p.ku ? num(*p.ku) : Json(nullptr);
    return o;
}

Json to_json(const FocalConic& c) {
    return {{"plane_basis", basis(c.plane_basis)},
            {"M", mat(c.M)},
            {"l", vec(c.l)},
            {"c", num(c.c)},
            {"kind", to_string(c.kind)},
            {"delta", num(c.delta)},
            {"Delta", num(c.Delta)},
            {"cross_check", c.cross_check}};
}

Json to_json(const FormBundle& b) {
    return {{"E", num(b.E1)}, {"F", num(b.F1)}, {"G", num(b.G1)},
            {"L", num(b.L)},  {"M", num(b.M)},  {"N", num(b.N_)}, {"K", num(b.K)}};
}

Json to_json(const SingularPointRecord& r) {
    Json o = {{"s", num(r.s)},
              {"s_tilde", num(r.s_tilde)},
              {"point", Json::array({num(r.point.u), num(r.point.v), num(r.point.s)})},
              {"class", to_string(r.cls)},
              {"conic_kind", to_string(r.conic)},
              {"residual", num(r.residual)}};
    o["invariants"] = r.inv ? to_json(*r.inv) : Json(nullptr);
    return o;
}

Json to_json(const LocusExpansion& le) {
    Json oracle = Json::array();
    for (double a : le.alpha_oracle) oracle.push_back(num(a));
    return {{"alpha1", num(le.alpha1)},
            {"alpha2", num(le.alpha2)},
            {"alpha3", num(le.alpha3)},
            {"alpha_oracle", oracle},
            {"annotations",
             {{"alpha3_alt_4c2s", num(le.alpha3_alt_4c2s)}, {"alpha3_alt_14c2s", num(le.alpha3_alt_14c2s)}}},
            {"epsilon", le.epsilon}};
}

Json to_json(const TraceTable& t) {
    Json rows = Json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"s_tilde", num(r.s_tilde)},
                        {"s", num(r.s)},
                        {"found", r.found},
                        {"u_plus", num(r.u_plus)},
                        {"u_minus", num(r.u_minus)},
                        {"plus", to_json(r.plus)},
                        {"minus", to_json(r.minus)},
                        {"conic_plus", to_string(r.conic_plus)},
                        {"conic_minus", to_string(r.conic_minus)}});
    }
    return {{"grid", {{"start", num(t.grid.start)}, {"ratio", num(t.grid.ratio)}, {"n", t.grid.n}}}, {"rows", rows}};
}

Json to_json(const AsymptoticReport& a) {
    Json limits = Json::object();
    for (const auto& l : a.limits) {
        limits[l.name] = {{"extrapolated", num(l.extrapolated)},
                          {"theory", num(l.theory)},
                          {"residual", num(l.residual)},
                          {"spread", num(l.spread)}};
    }
    return {{"limits", limits},
            {"a20_bounded", a.a20_bounded},
            {"a11_bounded", a.a11_bounded},
            {"a02_bounded", a.a02_bounded},
            {"a20_bounded_theory", a.a20_bounded_theory},
            {"a11_bounded_theory", a.a11_bounded_theory},
            {"all_hyperbolas", a.all_hyperbolas}};
}

Json to_json(const GaussProbeReport& g) {
    Json samples = Json::array();
    for (const auto& s : g.samples) {
        samples.push_back({{"theta", num(s.theta)},
                           {"k", num(s.k)},
                           {"K", num(s.K)},
                           {"predicted", s.predicted},
                           {"agree", s.agree}});
    }
    Json thetas = Json::array();
    Json radius = Json::array();
    for (double x : g.thetas) thetas.push_back(num(x));
    for (double x : g.radius) radius.push_back(num(x));
    return {{"s_tilde", num(g.s_tilde)},
            {"u", num(g.u)},
            {"n_theta", g.n_theta},
            {"n_k", g.n_k},
            {"thetas", thetas},
            {"radius", radius},
            {"samples", samples},
            {"agree", g.agree},
            {"total", static_cast<int>(g.samples.size())},
            {"s_tilde0", num(g.s_tilde0)}};
}

Json to_json(const TrajectoryReport& t) {
    return {{"kappa0", num(t.kappa0)},
            {"tau0", num(t.tau0)},
            {"kappa_prime0", num(t.kappa_prime0)},
            {"ku", num(t.ku)},
            {"ka", num(t.ka)},
            {"recovered", t.recovered},
            {"recovered_f24", num(t.recovered_f24)},
            {"recovered_f34", num(t.recovered_f34)},
            {"annotations", {{"flipped_f24", num(t.flipped_f24)}, {"flipped_f34", num(t.flipped_f34)}}},
            {"note", t.note}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (x == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string trace_csv(const TraceTable& t) {
    std::string out = "s_tilde,u_plus,u_minus,a20,a11,a02,ku_ext,ka,conic_kind\n";
    for (const auto& r : t.rows) {
        if (!r.found) continue;
        for (double x : {r.s_tilde, r.u_plus, r.u_minus, r.plus.a20, r.plus.a11, r.plus.a02, r.plus.ku_ext, r.plus.ka}) {
            out += format_double(x);
            out += ',';
        }
        out += to_string(r.conic_plus);
        out += '\n';
    }
    return out;
}

std::string focal_svg(const FocalConic& c, int cells) {
    constexpr double lo = -5.0;
    constexpr double hi = 5.0;
    const double h = (hi - lo) / cells;
    auto q = [&c](double x, double y) {
        const Vec2 w(x, y);
        return w.dot(c.M * w) + c.l.dot(w) + c.c;
    };
    const int n = cells + 1;
    std::vector<double> val(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) val[static_cast<std::size_t>(j * n + i)] = q(lo + i * h, lo + j * h);
    }
    auto at = [&](int i, int j) { return val[static_cast<std::size_t>(j * n + i)]; };

    std::ostringstream path;
    auto point = [&path](double x, double y) { path << fixed4(x) << ' ' << fixed4(-y); };
    auto segment = [&](const Vec2& a, const Vec2& b) {
        path << 'M';
        point(a(0), a(1));
        path << 'L';
        point(b(0), b(1));
    };
    for (int j = 0; j < cells; ++j) {
        for (int i = 0; i < cells; ++i) {
            const double x0 = lo + i * h;
            const double y0 = lo + j * h;
            // corners counter-clockwise from (x0, y0)
            const std::array<double, 4> v{at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
            const std::array<Vec2, 4> p{Vec2(x0, y0), Vec2(x0 + h, y0), Vec2(x0 + h, y0 + h), Vec2(x0, y0 + h)};
            std::vector<Vec2> cuts;
            for (int e = 0; e < 4; ++e) {
                const auto a = static_cast<std::size_t>(e);
                const auto b = static_cast<std::size_t>((e + 1) % 4);
                if ((v[a] >= 0.0) == (v[b] >= 0.0)) continue;
                const double t = v[a] / (v[a] - v[b]);
                cuts.push_back(p[a] + t * (p[b] - p[a]));
            }
            if (cuts.size() == 2) {
                segment(cuts[0], cuts[1]);
            } else if (cuts.size() == 4) {
                // saddle cell: pair by the sign at the centre
                const bool centre = q(x0 + h / 2, y0 + h / 2) >= 0.0;
                if (centre == (v[0] >= 0.0)) {
                    segment(cuts[0], cuts[3]);
                    segment(cuts[1], cuts[2]);
                } else {
                    segment(cuts[0], cuts[1]);
                    segment(cuts[2], cuts[3]);
                }
            }
        }
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-5 -5 10 10\" width=\"500\" height=\"500\">\n"
        << "<line x1=\"-5\" y1=\"0\" x2=\"5\" y2=\"0\" stroke=\"#bbb\" stroke-width=\"0.01\"/>\n"
        << "<line x1=\"0\" y1=\"-5\" x2=\"0\" y2=\"5\" stroke=\"#bbb\" stroke-width=\"0.01\"/>\n"
        << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"black\" stroke-width=\"0.03\"/>\n"
        << "<text x=\"-4.8\" y=\"-4.5\" font-size=\"0.4\">" << to_string(c.kind) << "</text>\n"
        << "</svg>\n";
    return svg.str();
}

std::string mesh_obj(const Mesh& m) {
    std::string out;
    for (const auto& v : m.vertices) {
        out += "v " + format_double(v(0)) + ' ' + format_double(v(1)) + ' ' + format_double(v(2)) + '\n';
    }
    for (const auto& f : m.faces) {
        out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' + std::to_string(f[2] + 1) + '\n';
    }
    return out;
}

std::string k_sign_text(const Mesh& m) {
    std::string out;
    for (int k : m.k_sign) out += std::to_string(k) + '\n';
    return out;
}

}  // namespace s1d
