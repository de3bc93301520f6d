#pragma once

// Data-parallel loops. Each kernel has a serial reference; the OpenMP
// version must produce identical output (same order, same bits).

#include <array>
#include <span>
#include <vector>

#include "s1deform/deformation.hpp"

namespace s1d {

std::vector<TraceRow> trace_rows_serial(const DeformationModel& m, const LocusExpansion& le,
                                        std::span<const double> s_tildes);
std::vector<TraceRow> trace_rows_parallel(const DeformationModel& m, const LocusExpansion& le,
                                          std::span<const double> s_tildes);

/// Gaussian-curvature numerator K = LN - M^2 of the polynomial map at each point.
std::vector<double> curvature_K_serial(const JetTriple& poly, std::span<const Point> points);
std::vector<double> curvature_K_parallel(const JetTriple& poly, std::span<const Point> points);

struct MeshGrid {
    double u0 = -1, u1 = 1, v0 = -1, v1 = 1;
    int nu = 50, nv = 50;
};

struct Mesh {
    std::vector<Vec3> vertices;             // row-major: v outer, u inner
    std::vector<std::array<int, 3>> faces;  // 0-based
    std::vector<int> k_sign;                // -1, 0, +1 per vertex
};

/// Evaluates f(., ., s) on the grid. A grid with fewer than 2 samples in
/// either direction is a usage error.
Mesh mesh_serial(const MapGerm& f, double s, const MeshGrid& g);
Mesh mesh_parallel(const MapGerm& f, double s, const MeshGrid& g);

}  // namespace s1d
