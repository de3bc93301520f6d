#include "s1deform/pointwise.hpp"

#include <cmath>
#include <sstream>

#include "s1deform/errors.hpp"

namespace s1d {

namespace {

constexpr double kTol = 1e-9;

double det3(const Vec3& a, const Vec3& b, const Vec3& c) { return a.dot(b.cross(c)); }

LocalDerivatives aligned(const LocalDerivatives& d, const char* who) {
    if (rank_at(d) != 1) throw DomainError(std::string(who) + ": rank of df is not 1");
    return align_kernel(d);
}

Vec2 in_plane(const std::array<Vec3, 2>& basis, const Vec3& x) { return {x.dot(basis[0]), x.dot(basis[1])}; }

double cross2(const Vec2& a, const Vec2& b) { return a(0) * b(1) - a(1) * b(0); }

}  // namespace

const char* to_string(ParabolaKind k) {
    switch (k) {
        case ParabolaKind::Parabola: return "parabola";
        case ParabolaKind::HalfLine: return "half-line";
        case ParabolaKind::Line: return "line";
    }
    return "line";
}

const char* to_string(ConicKind k) {
    switch (k) {
        case ConicKind::Ellipse: return "ellipse";
        case ConicKind::Parabola: return "parabola";
        case ConicKind::Hyperbola: return "hyperbola";
        case ConicKind::TwoLines: return "two-lines";
        case ConicKind::DoubleOrSingleLine: return "double-or-single-line";
        case ConicKind::DegenerateOther: return "degenerate-other";
    }
    return "degenerate-other";
}

std::array<Vec3, 2> normal_plane_basis(const Vec3& t) {
    const Vec3 tn = t.normalized();
    const std::array<Vec3, 3> candidates{Vec3::UnitY(), Vec3::UnitZ(), Vec3::UnitX()};
    std::array<Vec3, 2> out;
    int found = 0;
    for (const auto& e : candidates) {
        if (found == 2) break;
        Vec3 x = e - e.dot(tn) * tn;
        for (int k = 0; k < found; ++k) x -= x.dot(out[static_cast<std::size_t>(k)]) * out[static_cast<std::size_t>(k)];
        if (x.norm() < 1e-6) continue;
        x.normalize();
        Eigen::Index big = 0;
        x.cwiseAbs().maxCoeff(&big);
        if (x(big) < 0.0) x = -x;
        out[static_cast<std::size_t>(found++)] = x;
    }
    return out;
}

bool whitney_test(const LocalDerivatives& d) {
    const LocalDerivatives a = aligned(d, "whitney_test");
    const double det = det3(a.fu, a.fvv, a.fuv);
    return std::abs(det) > kTol * (a.fu.norm() * a.fvv.norm() * a.fuv.norm() + 1.0);
}

bool whitney_test(const MapGerm& f, const Point& p) { return whitney_test(local_derivatives(f, p)); }

UmbrellaResult umbrella_invariants(const LocalDerivatives& d) {
    if (!whitney_test(d)) throw DomainError("umbrella_invariants: the point is not a Whitney umbrella");
    LocalDerivatives a = align_kernel(d);
    UmbrellaResult r;
    if (det3(a.fu, a.fuv, a.fvv) < 0.0) {
        a.fuv = -a.fuv;
        r.inv.v_flipped = true;
    }
    const Vec3& fu = a.fu;
    const Vec3& fuu = a.fuu;
    const Vec3& fuv = a.fuv;
    const Vec3& fvv = a.fvv;
    auto& s = r.scalars;
    s.A = fu.dot(fu);
    s.B = fu.cross(fvv).squaredNorm();
    s.C = det3(fu, fuv, fvv);
    const double t = det3(fu, fuu, fvv);
    s.D = t * t + 4.0 * s.C * det3(fu, fuv, fuu);
    const double gram = fu.dot(fu) * fvv.dot(fuv) - fu.dot(fuv) * fvv.dot(fu);
    s.E_inv = 2.0 * s.C * gram - s.B * t;

    auto& inv = r.inv;
    const double c2 = s.C * s.C;
    inv.a20 = 0.25 * std::pow(s.A, -1.5) * std::sqrt(s.B) * s.D / c2;
    inv.a11 = 0.5 / std::sqrt(s.A) * s.E_inv / c2;
    inv.a02 = std::sqrt(s.A) * std::pow(s.B, 1.5) / c2;
    inv.ku_ext = 2.0 * std::abs(inv.a11 / inv.a02);
    inv.ka = std::abs((inv.a20 * inv.a02 - inv.a11 * inv.a11) / inv.a02);
    return r;
}

UmbrellaResult umbrella_invariants(const MapGerm& f, const Point& p) {
    return umbrella_invariants(local_derivatives(f, p));
}

CurvatureParabola curvature_parabola(const LocalDerivatives& d) {
    const LocalDerivatives a = aligned(d, "curvature_parabola");
    CurvatureParabola cp;
    cp.plane_basis = normal_plane_basis(a.fu);
    const double e1 = a.fu.squaredNorm();
    const Vec2 p0 = in_plane(cp.plane_basis, a.fuu) / e1;
    const Vec2 p1 = in_plane(cp.plane_basis, a.fuv) / std::sqrt(e1);
    const Vec2 p2 = in_plane(cp.plane_basis, a.fvv);

    if (p2.norm() <= kTol) {
        cp.kind = ParabolaKind::Line;
        cp.vertex = p0;
        cp.axis_dir = p1.norm() > kTol ? Vec2(p1.normalized()) : Vec2(Vec2::UnitX());
    } else if (std::abs(cross2(p2, p1)) <= kTol * (p2.norm() * p1.norm() + 1.0)) {
        cp.kind = ParabolaKind::HalfLine;
        const double lam = p1.dot(p2) / p2.squaredNorm();
        cp.vertex = p0 - lam * lam * p2;
        cp.axis_dir = p2.normalized();
    } else {
        cp.kind = ParabolaKind::Parabola;
        const double b = -p1.dot(p2) / p2.squaredNorm();
        cp.vertex = p0 + 2.0 * b * p1 + b * b * p2;
        cp.axis_dir = p2.normalized();
    }
    const Vec2 nu2(-cp.axis_dir(1), cp.axis_dir(0));
    if (cp.kind == ParabolaKind::HalfLine) cp.ku = std::abs(cp.vertex.dot(nu2));
    cp.ka = std::abs(cp.vertex.dot(cp.axis_dir));
    return cp;
}

CurvatureParabola curvature_parabola(const MapGerm& f, const Point& p) {
    return curvature_parabola(local_derivatives(f, p));
}

FocalConic focal_conic(const LocalDerivatives& d) {
    const LocalDerivatives a = aligned(d, "focal_conic");
    FocalConic fc;
    fc.plane_basis = normal_plane_basis(a.fu);
    const Vec2 q0 = in_plane(fc.plane_basis, a.fuu);
    const Vec2 q1 = in_plane(fc.plane_basis, a.fuv);
    const Vec2 q2 = in_plane(fc.plane_basis, a.fvv);
    const double A = a.fu.squaredNorm();

    // (A - w.q0)(-w.q2) - (w.q1)^2 = 0
    const Eigen::Matrix2d outer = q0 * q2.transpose();
    fc.M = 0.5 * (outer + outer.transpose()) - q1 * q1.transpose();
    fc.l = -A * q2;
    fc.c = 0.0;

    Eigen::Matrix3d q;
    q.topLeftCorner<2, 2>() = fc.M;
    q.topRightCorner<2, 1>() = fc.l / 2.0;
    q.bottomLeftCorner<1, 2>() = fc.l.transpose() / 2.0;
    q(2, 2) = fc.c;
    fc.delta = fc.M.determinant();
    fc.Delta = q.determinant();

    const double scale = fc.M.squaredNorm() + fc.l.squaredNorm() + fc.c * fc.c;
    const double tol_delta = kTol * scale;
    const double tol_Delta = kTol * std::pow(scale, 1.5);
    if (std::abs(fc.Delta) > tol_Delta) {
        if (fc.delta > tol_delta) {
            fc.kind = ConicKind::Ellipse;
        } else if (fc.delta < -tol_delta) {
            fc.kind = ConicKind::Hyperbola;
        } else {
            fc.kind = ConicKind::Parabola;
        }
    } else if (fc.delta < -tol_delta) {
        fc.kind = ConicKind::TwoLines;
    } else if (fc.delta > tol_delta) {
        fc.kind = ConicKind::DegenerateOther;  // a single real point
    } else if (fc.M.squaredNorm() > kTol * scale || fc.l.norm() > kTol) {
        fc.kind = ConicKind::DoubleOrSingleLine;
    } else {
        fc.kind = ConicKind::DegenerateOther;
    }

    if (whitney_test(d)) {
        const auto inv = umbrella_invariants(d).inv;
        const double size = std::abs(inv.a20) + std::abs(inv.a11) + std::abs(inv.a02) + 1.0;
        const double rel = inv.a20 * inv.a02;
        // Near-degenerate umbrellas (C close to 0) make both tests unreliable.
        const bool robust = std::abs(rel) > 1e-6 * size * size && std::abs(fc.delta) > 1e3 * tol_delta &&
                            std::abs(fc.Delta) > 1e3 * tol_Delta;
        if (robust) {
            const ConicKind predicted = rel < 0.0 ? ConicKind::Ellipse : ConicKind::Hyperbola;
            if (predicted != fc.kind) {
                std::ostringstream msg;
                msg << "focal conic is " << to_string(fc.kind) << " but a20*a02 = " << rel << " predicts "
                    << to_string(predicted);
                throw ConsistencyError(msg.str());
            }
            fc.cross_check = "agree";
        } else if (std::abs(inv.a20) <= 1e-6 * size && fc.kind == ConicKind::Parabola) {
            fc.cross_check = "agree";
        }
    }
    return fc;
}

FocalConic focal_conic(const MapGerm& f, const Point& p) { return focal_conic(local_derivatives(f, p)); }

FormBundle form_bundle(const LocalDerivatives& d) {
    FormBundle b;
    b.E1 = d.fu.dot(d.fu);
    b.F1 = d.fu.dot(d.fv);
    b.G1 = d.fv.dot(d.fv);
    const Vec3 n = d.fu.cross(d.fv);
    b.L = d.fuu.dot(n);
    b.M = d.fuv.dot(n);
    b.N_ = d.fvv.dot(n);
    b.K = b.L * b.N_ - b.M * b.M;
    return b;
}

FormBundle form_bundle(const MapGerm& f, const Point& p) { return form_bundle(local_derivatives(f, p)); }

}  // namespace s1d
