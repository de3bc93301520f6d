#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "s1deform/expr.hpp"
#include "s1deform/jet.hpp"

namespace s1d {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Point {
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;

    std::array<double, 3> coords() const { return {u, v, s}; }
};

enum class GermKind { Germ, Deformation };

/// A map (u, v[, s]) -> R^3 given by three expressions. Mentioning `s`
/// anywhere makes it a deformation.
struct MapGerm {
    std::array<Expr, 3> components;
    GermKind kind = GermKind::Germ;
};

MapGerm make_germ(std::array<Expr, 3> components);
MapGerm parse_germ(std::string_view text);
std::string to_string(const MapGerm& f);

Vec3 evaluate(const MapGerm& f, const Point& p);

/// Taylor jets of the three components about p, in local coordinates.
JetTriple jet_at(const MapGerm& f, const Point& p, int order);

/// Value and (u, v)-derivatives up to second order at a point, s held fixed.
struct LocalDerivatives {
    Vec3 f = Vec3::Zero();
    Vec3 fu = Vec3::Zero();
    Vec3 fv = Vec3::Zero();
    Vec3 fuu = Vec3::Zero();
    Vec3 fuv = Vec3::Zero();
    Vec3 fvv = Vec3::Zero();
};

LocalDerivatives local_derivatives(const MapGerm& f, const Point& p);

/// Same for a polynomial map given as jets in (u, v, s) centred at the origin.
LocalDerivatives local_derivatives(const JetTriple& poly, const Point& p);

/// Rank of [f_u f_v]; singular values below 1e-9 * (sigma_max + 1) count as zero.
int rank_at(const LocalDerivatives& d);
int rank_at(const MapGerm& f, const Point& p);

/// Unit generator of Ker df, first nonzero entry positive. Requires rank 1.
Vec2 null_vector(const LocalDerivatives& d);
Vec2 null_vector(const MapGerm& f, const Point& p);

/// Derivatives re-expressed in the rotated source frame (a, n) where n is
/// the null vector and (a, n) is positively oriented, so the new f_v is 0.
/// Requires rank 1.
LocalDerivatives align_kernel(const LocalDerivatives& d);

struct AdmissibilityClause {
    std::string id;
    bool pass = false;
    std::string detail;
};

struct AdmissibilityReport {
    bool pass = false;
    std::vector<AdmissibilityClause> clauses;
    /// Id of the first failing clause, empty on success.
    std::string failing_clause;
};

/// Checks the hypotheses of the normal-form reduction at the origin:
/// (i) f(0,0,s) = 0 to `order`; (ii) rank df_0 = 1; (iii) the second
/// derivative along the kernel has a component normal to the image line
/// (f22(0) or f32(0) nonzero after the first rotation); (iv) the 2-jet is not
/// an umbrella, i.e. (f33)_u(0,0) = 0.
AdmissibilityReport admissibility_check(const MapGerm& f, int order = 8);

}  // namespace s1d
