#include "s1deform/kernels.hpp"

#include <cmath>
#include <exception>

#include "s1deform/errors.hpp"

namespace s1d {

namespace {

// Runs body(i) for i in [0, n) under OpenMP. The exception of the lowest
// failing index is rethrown after the loop, so failures are deterministic too.
template <class Body>
void parallel_for(std::size_t n, Body body) {
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

int sign_of(double k) {
    if (std::abs(k) <= 1e-12) return 0;
    return k > 0 ? 1 : -1;
}

void check_grid(const MeshGrid& g) {
    if (g.nu < 2 || g.nv < 2) throw UsageError("mesh grid needs at least 2 samples per direction");
    if (!(g.u1 > g.u0) || !(g.v1 > g.v0)) throw UsageError("mesh grid bounds must be increasing");
}

Point grid_point(const MeshGrid& g, std::size_t idx, double s) {
    const int i = static_cast<int>(idx % static_cast<std::size_t>(g.nu));
    const int j = static_cast<int>(idx / static_cast<std::size_t>(g.nu));
    return {g.u0 + (g.u1 - g.u0) * i / (g.nu - 1), g.v0 + (g.v1 - g.v0) * j / (g.nv - 1), s};
}

void mesh_vertex(const MapGerm& f, const Point& p, Vec3& x, int& ks) {
    const LocalDerivatives d = local_derivatives(f, p);
    x = d.f;
    ks = sign_of(form_bundle(d).K);
}

std::vector<std::array<int, 3>> mesh_faces(const MeshGrid& g) {
    std::vector<std::array<int, 3>> faces;
    faces.reserve(static_cast<std::size_t>(2 * (g.nu - 1) * (g.nv - 1)));
    for (int j = 0; j + 1 < g.nv; ++j) {
        for (int i = 0; i + 1 < g.nu; ++i) {
            const int a = j * g.nu + i;
            const int b = a + 1;
            const int c = a + g.nu;
            const int d = c + 1;
            faces.push_back({a, b, d});
            faces.push_back({a, d, c});
        }
    }
    return faces;
}

}  // namespace

std::vector<TraceRow> trace_rows_serial(const DeformationModel& m, const LocusExpansion& le,
                                        std::span<const double> s_tildes) {
    std::vector<TraceRow> rows;
    rows.reserve(s_tildes.size());
    for (double st : s_tildes) rows.push_back(trace_row(m, le, st));
    return rows;
}

std::vector<TraceRow> trace_rows_parallel(const DeformationModel& m, const LocusExpansion& le,
                                          std::span<const double> s_tildes) {
    std::vector<TraceRow> rows(s_tildes.size());
    parallel_for(rows.size(), [&](std::size_t i) { rows[i] = trace_row(m, le, s_tildes[i]); });
    return rows;
}

std::vector<double> curvature_K_serial(const JetTriple& poly, std::span<const Point> points) {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(form_bundle(local_derivatives(poly, p)).K);
    return out;
}

std::vector<double> curvature_K_parallel(const JetTriple& poly, std::span<const Point> points) {
    std::vector<double> out(points.size());
    parallel_for(out.size(), [&](std::size_t i) { out[i] = form_bundle(local_derivatives(poly, points[i])).K; });
    return out;
}

Mesh mesh_serial(const MapGerm& f, double s, const MeshGrid& g) {
    check_grid(g);
    const auto n = static_cast<std::size_t>(g.nu) * static_cast<std::size_t>(g.nv);
    Mesh mesh;
    mesh.vertices.resize(n);
    mesh.k_sign.resize(n);
    for (std::size_t i = 0; i < n; ++i) mesh_vertex(f, grid_point(g, i, s), mesh.vertices[i], mesh.k_sign[i]);
    mesh.faces = mesh_faces(g);
    return mesh;
}

Mesh mesh_parallel(const MapGerm& f, double s, const MeshGrid& g) {
    check_grid(g);
    const auto n = static_cast<std::size_t>(g.nu) * static_cast<std::size_t>(g.nv);
    Mesh mesh;
    mesh.vertices.resize(n);
    mesh.k_sign.resize(n);
    parallel_for(n, [&](std::size_t i) { mesh_vertex(f, grid_point(g, i, s), mesh.vertices[i], mesh.k_sign[i]); });
    mesh.faces = mesh_faces(g);
    return mesh;
}

}  // namespace s1d
