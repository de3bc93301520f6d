#pragma once

#include <array>
#include <optional>
#include <string>

#include "s1deform/germ.hpp"

namespace s1d {

struct FundamentalScalars {
    double A = 0, B = 0, C = 0, D = 0, E_inv = 0;
};

struct UmbrellaInvariants {
    double a20 = 0, a11 = 0, a02 = 0;
    double ku_ext = 0;  // 2|a11/a02|
    double ka = 0;      // |(a20 a02 - a11^2)/a02|
    /// v was replaced by -v to make C > 0.
    bool v_flipped = false;
};

struct UmbrellaResult {
    FundamentalScalars scalars;
    UmbrellaInvariants inv;
};

enum class ParabolaKind { Parabola, HalfLine, Line };
const char* to_string(ParabolaKind k);

struct CurvatureParabola {
    std::array<Vec3, 2> plane_basis;
    ParabolaKind kind = ParabolaKind::Parabola;
    Vec2 vertex = Vec2::Zero();
    Vec2 axis_dir = Vec2::UnitX();
    /// Native umbilic curvature; only defined for half-lines.
    std::optional<double> ku;
    double ka = 0;
};

enum class ConicKind { Ellipse, Parabola, Hyperbola, TwoLines, DoubleOrSingleLine, DegenerateOther };
const char* to_string(ConicKind k);

/// w^T M w + l.w + c = 0 in normal-plane coordinates centred at f(p).
struct FocalConic {
    std::array<Vec3, 2> plane_basis;
    Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
    Vec2 l = Vec2::Zero();
    double c = 0;
    ConicKind kind = ConicKind::DegenerateOther;
    double delta = 0;  // det M
    double Delta = 0;  // det of the 3x3 form
    /// "agree" when checked against the a20*a02 sign rule, "skipped" otherwise.
    std::string cross_check = "skipped";
};

struct FormBundle {
    double E1 = 0, F1 = 0, G1 = 0;
    double L = 0, M = 0, N_ = 0;
    double K = 0;
};

/// Orthonormal basis of the plane orthogonal to `t`, from Gram-Schmidt of
/// e2, e3 (then e1), each vector's largest component made positive.
std::array<Vec3, 2> normal_plane_basis(const Vec3& t);

bool whitney_test(const LocalDerivatives& d);
bool whitney_test(const MapGerm& f, const Point& p);

UmbrellaResult umbrella_invariants(const LocalDerivatives& d);
UmbrellaResult umbrella_invariants(const MapGerm& f, const Point& p);

CurvatureParabola curvature_parabola(const LocalDerivatives& d);
CurvatureParabola curvature_parabola(const MapGerm& f, const Point& p);

FocalConic focal_conic(const LocalDerivatives& d);
FocalConic focal_conic(const MapGerm& f, const Point& p);

FormBundle form_bundle(const LocalDerivatives& d);
FormBundle form_bundle(const MapGerm& f, const Point& p);

}  // namespace s1d
