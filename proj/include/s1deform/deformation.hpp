#pragma once

#include <optional>
#include <string>
#include <vector>

#include "s1deform/normal_form.hpp"
#include "s1deform/pointwise.hpp"

namespace s1d {

/// A normalized normal form together with the data every sweep needs.
struct DeformationModel {
    NormalFormData nf;
    CoefficientSet cs;
    Classification cls;
    /// sign of c2(0); singular points live at s = -epsilon * s_tilde^2.
    int epsilon = 1;
    /// Normal form truncated at the jet order, used as an exact polynomial.
    JetTriple poly;
    /// dF33/ds(0,0) != 0.
    bool generic = false;
};

/// reduce, then normalize_parameter when `normalize` is set. Throws
/// DegeneracyError when c2(0) = 0, or when normalizing a non-generic
/// deformation. Without normalization s keeps its input meaning.
DeformationModel make_model(const MapGerm& f, int order = 8, bool normalize = true);

enum class PointClass { Umbrella, S1, Degenerate };
const char* to_string(PointClass c);

struct SingularPointRecord {
    double s = 0;
    double s_tilde = 0;  // sqrt(|s|)
    Point point;         // normal-form source coordinates, v = 0
    PointClass cls = PointClass::Degenerate;
    std::optional<UmbrellaInvariants> inv;
    ConicKind conic = ConicKind::DegenerateOther;
    double residual = 0;  // |F33(u, s)|
};

/// Real roots of F33(., s) with |u| < r0, sorted by u.
std::vector<SingularPointRecord> singular_locus(const DeformationModel& m, double s, double r0 = 1.0);

struct LocusExpansion {
    double alpha1 = 0, alpha2 = 0;  // closed forms
    std::vector<double> alpha_oracle;  // branch_solve: alpha_1 .. alpha_{N-1}
    double alpha3 = 0;                 // authoritative, = alpha_oracle[2]
    double alpha3_alt_4c2s = 0;       // closed form with 4 c2_s (annotation)
    double alpha3_alt_14c2s = 0;           // closed form with 14 c2_s (annotation)
    int epsilon = 1;
};

LocusExpansion locus_expansion(const DeformationModel& m);

/// s_tilde_j = start * ratio^j, j = 0 .. n-1.
struct GeometricGrid {
    double start = 0.1;
    double ratio = 0.5;
    int n = 7;
    std::vector<double> values() const;
};

/// Parses "a:ratio:n".
GeometricGrid parse_grid(const std::string& text);

struct TraceRow {
    double s_tilde = 0;
    double s = 0;
    double u_plus = 0;
    double u_minus = 0;
    bool found = false;
    UmbrellaInvariants plus;
    UmbrellaInvariants minus;
    ConicKind conic_plus = ConicKind::DegenerateOther;
    ConicKind conic_minus = ConicKind::DegenerateOther;
};

struct TraceTable {
    GeometricGrid grid;
    std::vector<TraceRow> rows;
};

/// One row per grid value, in grid order. Evaluated in parallel.
TraceTable trace(const DeformationModel& m, const GeometricGrid& grid);
TraceTable trace(const MapGerm& f, const GeometricGrid& grid, int order = 8);

/// The row for one s_tilde; shared by the serial and parallel kernels.
TraceRow trace_row(const DeformationModel& m, const LocusExpansion& le, double s_tilde);

struct LimitEstimate {
    std::string name;
    double extrapolated = 0;
    double theory = 0;
    double residual = 0;  // |extrapolated - theory|
    double spread = 0;    // last two tableau entries apart
};

struct AsymptoticReport {
    std::vector<LimitEstimate> limits;  // s2_a20, s2_a11, s2_a02, ku_ext, ka
    bool a20_bounded = false;
    bool a11_bounded = false;
    bool a02_bounded = false;
    bool a20_bounded_theory = false;
    bool a11_bounded_theory = false;
    /// Every conic in the table is a hyperbola (expected when f31(0) != 0).
    bool all_hyperbolas = false;
};

/// Richardson extrapolation to h = 0 of samples y_j taken at h_j = h0 r^j,
/// assuming y = L + c1 h + c2 h^2 + ... . Returns the full last row of the
/// tableau; the final entry is the estimate.
std::vector<double> richardson(const std::vector<double>& y, double ratio);

AsymptoticReport asymptotic_limits(const TraceTable& t, const CoefficientSet& cs);

struct GaussSample {
    double theta = 0;
    double k = 0;
    double K = 0;
    int predicted = 0;
    bool agree = false;
};

struct GaussProbeReport {
    double s_tilde = 0;
    double u = 0;  // u(s_tilde)
    int n_theta = 16;
    int n_k = 8;
    std::vector<double> thetas;
    std::vector<double> radius;  // R per theta
    std::vector<GaussSample> samples;
    int agree = 0;
    double s_tilde0 = 0;  // empirical, from bisection over (0, 0.5]
};

/// R from c20^2 + 3 d2 (1 when positive, the square-root formula otherwise).
double gauss_radius(const CoefficientSet& cs, double theta);

/// Samples sign K on the (theta, k) grid at s = -s_tilde^2. With `search`,
/// also bisects for the empirical s_tilde0.
GaussProbeReport gauss_sign_probe(const DeformationModel& m, double s_tilde, int n_theta = 16, int n_k = 8,
                                  bool search = false);

struct TrajectoryReport {
    double kappa0 = 0;
    double tau0 = 0;
    double kappa_prime0 = 0;
    double ku = 0;  // 2|f31(0)|
    double ka = 0;  // 2|f21(0)|
    bool recovered = false;
    double recovered_f24 = 0;
    double recovered_f34 = 0;
    /// The same inversion with the opposite sign on the kappa' terms;
    /// annotation only.
    double flipped_f24 = 0;
    double flipped_f34 = 0;
    std::string note;
};

TrajectoryReport trajectory_geometry(const DeformationModel& m);

}  // namespace s1d
