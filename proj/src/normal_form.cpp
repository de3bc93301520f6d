#include "s1deform/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "s1deform/errors.hpp"

namespace s1d {

namespace {

constexpr double kSplitTol = 1e-10;
constexpr double kMonomialTol = 1e-9;

JetTriple rotate(const Mat3& r, const JetTriple& f) {
    JetTriple out;
    for (int i = 0; i < 3; ++i) {
        Jet acc(f[0].nvars(), f[0].order());
        for (int j = 0; j < 3; ++j) {
            if (r(i, j) != 0.0) acc += r(i, j) * f[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

JetTriple compose_all(const JetTriple& f, const JetTriple& inner) {
    JetTriple out;
    for (std::size_t i = 0; i < 3; ++i) out[i] = compose(f[i], inner);
    return out;
}

JetTriple identity_map(int order) {
    return {Jet::variable(3, order, 0), Jet::variable(3, order, 1), Jet::variable(3, order, 2)};
}

// Jet in (u, s) -> jet in (u, v, s).
Jet lift_us(const Jet& a) {
    const std::array<int, 2> t{0, 2};
    return remap(a, 3, t);
}

// Jet in s -> jet in (u, v, s).
Jet lift_s(const Jet& a) {
    const std::array<int, 1> t{2};
    return remap(a, 3, t);
}

Jet project_us(const Jet& a) {
    const std::array<int, 3> t{0, -1, 1};
    return remap(a, 2, t);
}

Jet project_u(const Jet& a) {
    const std::array<int, 3> t{0, -1, -1};
    return remap(a, 1, t);
}

Jet exact_divide(const Jet& a, const Exponent& e, const char* what, double scale = 1.0) {
    auto q = divide_monomial(a, e);
    const double tol = kSplitTol * std::max({1.0, scale, a.max_abs()});
    if (q.remainder > tol) {
        std::ostringstream msg;
        msg << "Hadamard split of " << what << " left remainder " << q.remainder
            << "; the input violates f(0,0,s) = 0 or the 2-jet hypothesis";
        throw DegeneracyError(msg.str());
    }
    return q.quotient;
}

// Two Givens rotations taking the unit vector w to e1.
Mat3 align_to_e1(const Vec3& w) {
    const double a = std::atan2(w(2), w(1));
    Mat3 g1 = Mat3::Identity();
    g1(1, 1) = std::cos(a);
    g1(1, 2) = std::sin(a);
    g1(2, 1) = -std::sin(a);
    g1(2, 2) = std::cos(a);
    const Vec3 w1 = g1 * w;
    const double b = std::atan2(w1(1), w1(0));
    Mat3 g2 = Mat3::Identity();
    g2(0, 0) = std::cos(b);
    g2(0, 1) = std::sin(b);
    g2(1, 0) = -std::sin(b);
    g2(1, 1) = std::cos(b);
    return g2 * g1;
}

Mat3 about_e1(double theta) {
    Mat3 r = Mat3::Identity();
    r(1, 1) = std::cos(theta);
    r(1, 2) = std::sin(theta);
    r(2, 1) = -std::sin(theta);
    r(2, 2) = std::cos(theta);
    return r;
}

// Splits working jets (u, f2, f3) into the six components, truncated to n.
void split(NormalFormData& nf) {
    const int n = nf.order;
    const Jet& f2 = nf.working[1];
    const Jet& f3 = nf.working[2];
    const int w = f2.order();

    const Jet f2_u0s = set_zero(f2, 1);
    const Jet f2_u00 = set_zero(f2_u0s, 2);
    {
        // f2 - f2(u,0,s) must be exactly v^2.
        Jet rest = f2 - f2_u0s;
        rest.set({0, 2, 0}, rest.coeff({0, 2, 0}) - 1.0);
        const double tol = kSplitTol * std::max({1.0, nf.scale, f2.max_abs()});
        if (rest.max_abs() > tol) {
            std::ostringstream msg;
            msg << "second component is not of the form f2(u,0,s) + v^2 (residual " << rest.max_abs() << ")";
            throw ConsistencyError(msg.str());
        }
    }
    nf.F21 = with_order(project_u(exact_divide(f2_u00, {2, 0, 0}, "f2(u,0,0)", nf.scale)), n);
    nf.F24 = with_order(project_us(exact_divide(f2_u0s - f2_u00, {1, 0, 1}, "f2(u,0,s)-f2(u,0,0)", nf.scale)), n);

    const Jet f3_u0s = set_zero(f3, 1);
    const Jet f3_u00 = set_zero(f3_u0s, 2);
    const Jet f33 = set_zero(partial(f3, 1), 1);
    nf.F33 = with_order(project_us(f33), n);
    nf.F31 = with_order(project_u(exact_divide(f3_u00, {2, 0, 0}, "f3(u,0,0)", nf.scale)), n);
    nf.F34 = with_order(project_us(exact_divide(f3_u0s - f3_u00, {1, 0, 1}, "f3(u,0,s)-f3(u,0,0)", nf.scale)), n);
    const Jet v = Jet::variable(3, w, 1);
    nf.F32 = with_order(exact_divide(f3 - f3_u0s - v * f33, {0, 2, 0}, "f3 - f3(u,0,s) - v F33", nf.scale), n);
}

}  // namespace

const char* to_string(S1Class k) {
    switch (k) {
        case S1Class::S1Plus: return "S1Plus";
        case S1Class::S1Minus: return "S1Minus";
        case S1Class::Degenerate: return "Degenerate";
    }
    return "Degenerate";
}

JetTriple NormalFormData::assembled() const {
    return {with_order(working[0], order), with_order(working[1], order), with_order(working[2], order)};
}

NormalFormData reduce(const MapGerm& f, int order) {
    if (order < 2) throw UsageError("reduce: order must be at least 2");
    const int w = order + 3;

    const auto adm = admissibility_check(f, w);
    if (!adm.pass) {
        std::string detail;
        for (const auto& c : adm.clauses) {
            if (c.id == adm.failing_clause) detail = c.detail;
        }
        throw DegeneracyError("admissibility clause (" + adm.failing_clause + ") failed: " + detail);
    }

    NormalFormData nf;
    nf.order = order;
    JetTriple g = jet_at(f, Point{}, w);
    auto track = [&nf, &g] {
        for (const auto& c : g) nf.scale = std::max(nf.scale, c.max_abs());
    };
    track();

    // Target rotation sending the image direction to e1.
    const LocalDerivatives d = local_derivatives(f, Point{});
    const bool use_u = d.fu.norm() >= 1e-9 * (d.fv.norm() + 1.0);
    const Vec3 image = use_u ? d.fu : d.fv;
    const Mat3 r1 = align_to_e1(image.normalized());
    g = rotate(r1, g);

    // Source linear change: m has unit image e1, n spans the kernel.
    const Vec2 n = null_vector(d);
    Vec2 m = use_u ? Vec2(1.0 / d.fu.norm(), 0.0) : Vec2(0.0, 1.0 / d.fv.norm());
    Eigen::Matrix2d lin;
    lin.col(0) = m;
    lin.col(1) = n;
    if (lin.determinant() < 0.0) lin.col(1) = -n;
    {
        JetTriple inner = identity_map(w);
        inner[0] = lin(0, 0) * Jet::variable(3, w, 0) + lin(0, 1) * Jet::variable(3, w, 1);
        inner[1] = lin(1, 0) * Jet::variable(3, w, 0) + lin(1, 1) * Jet::variable(3, w, 1);
        g = compose_all(g, inner);
        nf.source_log.push_back({"linear", lin, Jet()});
        track();
    }

    // First component becomes the coordinate u.
    {
        JetTriple inner = identity_map(w);
        inner[0] = invert_slot(g[0], 0);
        g = compose_all(g, inner);
        g[0] = Jet::variable(3, w, 0);
        nf.source_log.push_back({"first-coordinate", Eigen::Matrix2d::Identity(), inner[0]});
        track();
    }

    // Rotation about e1: f22 > 0 and f32 = 0.
    const double theta = std::atan2(g[2].coeff({0, 2, 0}), g[1].coeff({0, 2, 0}));
    const Mat3 r2 = about_e1(theta);
    g = rotate(r2, g);
    g[0] = Jet::variable(3, w, 0);
    g[2].set({0, 2, 0}, 0.0);
    nf.rotation = r2 * r1;

    // Straighten the fold curve: d f2/dv (u, 0, s) = 0.
    {
        const Jet sigma = implicit_solve(partial(g[1], 1));
        JetTriple inner = identity_map(w);
        inner[1] = inner[1] + lift_us(sigma);
        g = compose_all(g, inner);
        g[0] = Jet::variable(3, w, 0);
        nf.source_log.push_back({"shift", Eigen::Matrix2d::Identity(), sigma});
        track();
    }

    // Rescale v so that f2 = f2(u,0,s) + v^2.
    {
        const Jet f2_u0s = set_zero(g[1], 1);
        const Jet f22 = exact_divide(g[1] - f2_u0s, {0, 2, 0}, "f2 - f2(u,0,s)", nf.scale);
        const Jet rho = sqrt(with_order(f22, w - 2));
        const JetTriple phi{Jet::variable(3, w, 0), Jet::variable(3, w, 1) * with_order(rho, w),
                            Jet::variable(3, w, 2)};
        const JetTriple psi = map_invert(phi);
        g = compose_all(g, psi);
        g[0] = Jet::variable(3, w, 0);
        nf.source_log.push_back({"rescale", Eigen::Matrix2d::Identity(), psi[1]});
        track();
    }

    // Only the first w-1 degrees are exact now.
    for (auto& c : g) c = with_order(c, order + 2);
    nf.working = g;
    split(nf);
    return nf;
}

NormalFormData normalize_parameter(const NormalFormData& nf) {
    const int w = nf.working[2].order();
    const Jet beta3 = set_zero(set_zero(partial(nf.working[2], 1), 1), 0);
    const std::array<int, 3> to_s{-1, -1, 0};
    const Jet beta = remap(beta3, 1, to_s);
    const double slope = beta.coeff({1, 0, 0});
    if (std::abs(slope) <= kClassifyTol) {
        throw DegeneracyError("dF33/ds(0,0) = 0: the deformation is not generic, parameter not normalized");
    }
    const Jet inv = invert_slot(beta, 0);

    NormalFormData out = nf;
    JetTriple inner = identity_map(w);
    inner[2] = lift_s(inv);
    out.working = compose_all(nf.working, inner);
    out.working[0] = Jet::variable(3, w, 0);
    out.source_log.push_back({"parameter", Eigen::Matrix2d::Identity(), inv});
    for (const auto& c : out.working) out.scale = std::max(out.scale, c.max_abs());
    out.normalized = true;
    out.parameter_reversed = nf.parameter_reversed != (slope < 0.0);
    split(out);
    return out;
}

NormalFormData reduce_normalized(const MapGerm& f, int order, bool* generic) {
    NormalFormData nf = reduce(f, order);
    const double slope = nf.F33.coeff({0, 1, 0});
    const bool ok = std::abs(slope) > kClassifyTol;
    if (generic) *generic = ok;
    return ok ? normalize_parameter(nf) : nf;
}

CoefficientSet scalar_coefficients(const NormalFormData& nf) {
    CoefficientSet c;
    c.f21_0 = nf.F21.coeff({0, 0, 0});
    c.f21_u = nf.F21.coeff({1, 0, 0});
    c.f31_0 = nf.F31.coeff({0, 0, 0});
    c.f31_u = nf.F31.coeff({1, 0, 0});
    c.f24_00 = nf.F24.coeff({0, 0, 0});
    c.f34_00 = nf.F34.coeff({0, 0, 0});
    c.c1_0 = nf.F33.coeff({1, 1, 0});
    c.c2_0 = nf.F33.coeff({2, 0, 0});
    c.c3_0 = nf.F33.coeff({3, 0, 0});
    c.c4_00 = nf.F33.coeff({4, 0, 0});
    c.c2_s0 = nf.F33.coeff({2, 1, 0});
    c.c20 = std::sqrt(std::abs(c.c2_0));
    c.d1 = nf.F32.coeff({1, 0, 0});
    c.d2 = nf.F32.coeff({0, 1, 0});
    c.d3 = nf.F32.coeff({0, 0, 1});
    c.df33_ds = nf.F33.coeff({0, 1, 0});
    c.c2_degenerate = std::abs(c.c2_0) <= kClassifyTol;
    return c;
}

Classification classify(const NormalFormData& nf) {
    const CoefficientSet c = scalar_coefficients(nf);
    Classification out;
    out.discriminant = c.d2 * 2.0 * c.c2_0;
    if (out.discriminant > kClassifyTol) {
        out.kind = S1Class::S1Plus;
    } else if (out.discriminant < -kClassifyTol) {
        out.kind = S1Class::S1Minus;
    } else {
        out.kind = S1Class::Degenerate;
    }
    return out;
}

std::vector<MonomialEntry> monomial_coefficients(const NormalFormData& nf) {
    const Jet& f2 = nf.working[1];
    const Jet& f3 = nf.working[2];
    std::vector<MonomialEntry> out;
    auto add = [&out](std::string name, const Jet& j, int i, int k, double v0, double v1) {
        MonomialEntry e;
        e.name = std::move(name);
        e.value = j.coeff({i, k, 0});
        e.slope = j.coeff({i, k, 1});
        e.value_alt = v0;
        e.slope_alt = v1;
        out.push_back(e);
    };
    const auto& F21 = nf.F21;
    const auto& F24 = nf.F24;
    const auto& F31 = nf.F31;
    const auto& F32 = nf.F32;
    const auto& F33 = nf.F33;
    const auto& F34 = nf.F34;
    add("b1", f2, 1, 0, 0.0, F24.coeff({0, 0, 0}));
    add("b2", f2, 2, 0, F21.coeff({0, 0, 0}), F24.coeff({1, 0, 0}));
    add("b3", f2, 3, 0, F21.coeff({1, 0, 0}), F24.coeff({2, 0, 0}));
    add("a10", f3, 1, 0, 0.0, F34.coeff({0, 0, 0}));
    add("a01", f3, 0, 1, 0.0, F33.coeff({0, 1, 0}));
    add("a20", f3, 2, 0, F31.coeff({0, 0, 0}), F34.coeff({1, 0, 0}));
    add("a11", f3, 1, 1, 0.0, F33.coeff({1, 1, 0}));
    add("a02", f3, 0, 2, 0.0, F32.coeff({0, 0, 1}));
    add("a30", f3, 3, 0, F31.coeff({1, 0, 0}), F34.coeff({2, 0, 0}));
    add("a21", f3, 2, 1, F33.coeff({2, 0, 0}), F33.coeff({2, 1, 0}));
    add("a12", f3, 1, 2, F32.coeff({1, 0, 0}), F32.coeff({1, 0, 1}));
    add("a03", f3, 0, 3, F32.coeff({0, 1, 0}), F32.coeff({0, 1, 1}));
    for (const auto& e : out) {
        const double err = std::max(std::abs(e.value - e.value_alt), std::abs(e.slope - e.slope_alt));
        if (err > kMonomialTol) {
            std::ostringstream msg;
            msg << "monomial coefficient " << e.name << " disagrees between routes by " << err;
            throw ConsistencyError(msg.str());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Equivalences

void validate_diffeo(const DiffeoSpec& d) {
    for (const auto& c : d.components) {
        if (!c) throw UsageError("diffeo component is empty");
    }
    if (mentions_var(d.components[2], 0) || mentions_var(d.components[2], 1)) {
        throw UsageError("diffeo: third component must depend on s only");
    }
    const MapGerm as_map = make_germ(d.components);
    const JetTriple j = jet_at(as_map, Point{}, 1);
    for (const auto& c : j) {
        if (std::abs(c.constant_term()) > 1e-12) throw UsageError("diffeo: phi(0) != 0");
    }
    const double det = j[0].coeff({1, 0, 0}) * j[1].coeff({0, 1, 0}) - j[0].coeff({0, 1, 0}) * j[1].coeff({1, 0, 0});
    if (!(det > 0.0)) throw UsageError("diffeo: (u,v) part is not orientation preserving at 0");
    if (!(j[2].coeff({0, 0, 1}) > 0.0)) throw UsageError("diffeo: d phi3/ds (0) must be positive");
}

MapGerm apply_equivalence(const MapGerm& f, const DiffeoSpec& phi, const Mat3& rot) {
    validate_diffeo(phi);
    std::array<Expr, 3> pulled;
    for (std::size_t i = 0; i < 3; ++i) pulled[i] = substitute(f.components[i], phi.components);
    std::array<Expr, 3> out;
    for (int i = 0; i < 3; ++i) {
        Expr acc;
        for (int j = 0; j < 3; ++j) {
            const double r = rot(i, j);
            if (r == 0.0) continue;
            Expr term = r == 1.0 ? pulled[static_cast<std::size_t>(j)]
                                 : make_binary(Op::Mul, make_num(r), pulled[static_cast<std::size_t>(j)]);
            acc = acc ? make_binary(Op::Add, acc, term) : term;
        }
        out[static_cast<std::size_t>(i)] = acc ? acc : make_num(0.0);
    }
    return make_germ(out);
}

DiffeoSpec random_diffeo(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-0.5, 0.5);
    auto monomial = [](int i, int j, int k) {
        Expr m;
        const std::array<int, 3> p{i, j, k};
        for (int var = 0; var < 3; ++var) {
            const int e = p[static_cast<std::size_t>(var)];
            if (e == 0) continue;
            Expr x = e == 1 ? make_var(var) : make_pow(make_var(var), e);
            m = m ? make_binary(Op::Mul, m, x) : x;
        }
        return m;
    };
    auto term = [&](double c, int i, int j, int k) { return make_binary(Op::Mul, make_num(c), monomial(i, j, k)); };

    for (;;) {
        std::array<Expr, 2> comp;
        std::array<double, 2> lead{};
        std::array<double, 2> cross{};
        for (int which = 0; which < 2; ++which) {
            Expr acc;
            for (int deg = 1; deg <= 3; ++deg) {
                for (int i = deg; i >= 0; --i) {
                    for (int j = deg - i; j >= 0; --j) {
                        const int k = deg - i - j;
                        if (i == 0 && j == 0) continue;  // no pure-s terms
                        double c = coef(rng);
                        if (deg == 1 && k == 0) {
                            const bool diag = (which == 0) == (i == 1);
                            if (diag) {
                                c += 1.0;
                                lead[static_cast<std::size_t>(which)] = c;
                            } else {
                                cross[static_cast<std::size_t>(which)] = c;
                            }
                        }
                        const Expr t = term(c, i, j, k);
                        acc = acc ? make_binary(Op::Add, acc, t) : t;
                    }
                }
            }
            comp[static_cast<std::size_t>(which)] = acc;
        }
        const double det = lead[0] * lead[1] - cross[0] * cross[1];
        if (det < 0.1) continue;
        const Expr phi3 = make_binary(
            Op::Add, make_binary(Op::Add, term(1.0 + coef(rng), 0, 0, 1), term(coef(rng), 0, 0, 2)),
            term(coef(rng), 0, 0, 3));
        return DiffeoSpec{{comp[0], comp[1], phi3}};
    }
}

Mat3 random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
    q.normalize();
    return q.toRotationMatrix();
}

}  // namespace s1d
