#pragma once

#include <random>
#include <string>
#include <vector>

#include "s1deform/germ.hpp"
#include "s1deform/jet.hpp"

namespace s1d {

/// One recorded change of source coordinates, in the order applied.
struct SourceStep {
    std::string kind;  // linear | first-coordinate | shift | rescale | parameter
    Eigen::Matrix2d linear = Eigen::Matrix2d::Identity();  // kind == linear
    Jet jet;  // the substituted component (empty for linear)
};

/// Normal form (u, u^2 F21 + v^2 + u s F24, u^2 F31 + v^2 F32 + v F33 + u s F34).
struct NormalFormData {
    int order = 8;
    Mat3 rotation = Mat3::Identity();
    std::vector<SourceStep> source_log;

    Jet F21;  // u
    Jet F31;  // u
    Jet F24;  // (u, s)
    Jet F33;  // (u, s)
    Jet F34;  // (u, s)
    Jet F32;  // (u, v, s)

    /// (u, f2, f3) in (u, v, s) before splitting, kept two orders above
    /// `order` so that re-splitting after a reparametrization stays exact.
    JetTriple working;

    /// Largest coefficient met along the reduction; round-off in the
    /// split checks is measured against it.
    double scale = 1.0;

    bool normalized = false;
    /// Set when d F33(0,s)/ds < 0 at normalization, i.e. the new parameter
    /// runs against the old one.
    bool parameter_reversed = false;

    /// The normal form truncated at `order`, as three jets in (u, v, s).
    JetTriple assembled() const;
};

struct CoefficientSet {
    double f21_0 = 0, f21_u = 0, f31_0 = 0, f31_u = 0;
    double f24_00 = 0, f34_00 = 0;
    double c1_0 = 0, c2_0 = 0, c20 = 0, c2_s0 = 0, c3_0 = 0, c4_00 = 0;
    double d1 = 0, d2 = 0, d3 = 0;
    double df33_ds = 0;
    /// c2_0 is zero to tolerance; the locus expansion is unavailable.
    bool c2_degenerate = false;
};

enum class S1Class { S1Plus, S1Minus, Degenerate };

struct Classification {
    S1Class kind = S1Class::Degenerate;
    double discriminant = 0.0;  // d2 * 2 c2_0
};

const char* to_string(S1Class k);

inline constexpr double kClassifyTol = 1e-9;

/// Runs the whole reduction at working order N+3 and truncates to N.
/// Throws DegeneracyError when admissibility fails.
NormalFormData reduce(const MapGerm& f, int order = 8);

/// Reparametrizes so that F33(0,s) = s. Throws DegeneracyError when
/// dF33/ds(0,0) vanishes.
NormalFormData normalize_parameter(const NormalFormData& nf);

/// reduce followed by normalize_parameter; `generic` reports whether the
/// second step applied.
NormalFormData reduce_normalized(const MapGerm& f, int order, bool* generic = nullptr);

CoefficientSet scalar_coefficients(const NormalFormData& nf);
Classification classify(const NormalFormData& nf);

/// b_i(s), a_ij(s) as (value at 0, s-slope), plain monomial coefficients of
/// the normal form. Each entry is computed from the unsplit jets and from the
/// split components; a mismatch above 1e-9 raises ConsistencyError.
struct MonomialEntry {
    std::string name;
    double value = 0;
    double slope = 0;
    double value_alt = 0;
    double slope_alt = 0;
};
std::vector<MonomialEntry> monomial_coefficients(const NormalFormData& nf);

/// phi = (phi1(u,v,s), phi2(u,v,s), phi3(s)) with phi(0) = 0, orientation
/// preserving in (u,v) and increasing in s.
struct DiffeoSpec {
    std::array<Expr, 3> components;
};

void validate_diffeo(const DiffeoSpec& d);

/// rot o f o phi as an expression-level germ.
MapGerm apply_equivalence(const MapGerm& f, const DiffeoSpec& phi, const Mat3& rot);

/// Random cubic diffeo of the allowed shape, coefficients in [-1/2, 1/2],
/// with d phi1/du(0) > 0 and no pure-s terms in phi1, phi2.
DiffeoSpec random_diffeo(std::mt19937_64& rng);

/// Haar-random rotation.
Mat3 random_rotation(std::mt19937_64& rng);

}  // namespace s1d
