#pragma once

// Serialization of every result type. JSON objects are key-sorted and
// doubles are written in shortest round-trip form; NaN becomes null.

#include <string>

#include <json.hpp>

#include "s1deform/deformation.hpp"
#include "s1deform/kernels.hpp"

namespace s1d {

using Json = nlohmann::json;

Json to_json(const Jet& j);
Json to_json(const AdmissibilityReport& r);
Json to_json(const NormalFormData& nf);
Json to_json(const CoefficientSet& c);
Json to_json(const Classification& c);
Json to_json(const std::vector<MonomialEntry>& m);
Json to_json(const FundamentalScalars& s);
Json to_json(const UmbrellaInvariants& inv);
Json to_json(const CurvatureParabola& p);
Json to_json(const FocalConic& c);
Json to_json(const FormBundle& b);
Json to_json(const SingularPointRecord& r);
Json to_json(const LocusExpansion& le);
Json to_json(const TraceTable& t);
Json to_json(const AsymptoticReport& a);
Json to_json(const GaussProbeReport& g);
Json to_json(const TrajectoryReport& t);

/// Two-space indented with a trailing newline.
std::string dump(const Json& j);

/// Shortest round-trip decimal, "nan" for NaN; never locale dependent.
std::string format_double(double x);

/// Header s_tilde,u_plus,u_minus,a20,a11,a02,ku_ext,ka,conic_kind; one line
/// per row where both umbrellas were found, invariants of the + branch.
std::string trace_csv(const TraceTable& t);

/// The zero set of the conic on the fixed window [-5, 5]^2 (y up), traced by
/// marching squares on a `cells` x `cells` grid, with a kind label.
std::string focal_svg(const FocalConic& c, int cells = 200);

/// Wavefront OBJ, 1-based faces.
std::string mesh_obj(const Mesh& m);
/// One integer per vertex, same order as the OBJ.
std::string k_sign_text(const Mesh& m);

}  // namespace s1d
