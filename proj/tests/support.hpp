#pragma once

#include <cmath>
#include <initializer_list>
#include <random>
#include <utility>

#include "s1deform/jet.hpp"

namespace s1d::test {

// Model germs used across the suites.
inline constexpr const char* kFsPlus = "u; v^2; v*(u^2+v^2)+s*v";
inline constexpr const char* kFsMinus = "u; v^2; v*(u^2-v^2)+s*v";
inline constexpr const char* kF0Plus = "u; v^2; u^2*v+v^3";
inline constexpr const char* kHyperbola = "u; v^2; u^2+v^3+u^2*v+s*v";
inline constexpr const char* kFPlus = "u; v^2+u*s; u^2+v^3+u^2*v+v*s";
inline constexpr const char* kFMinus = "u; v^2+u*s; -u^2+v^3+u^2*v+v*s";
inline constexpr const char* kUmbrella = "u; u*v; v^2";
inline constexpr const char* kFocalSweep = "u; -u^2+v^2; u^2+v^3+v*s+u^2*v";
inline constexpr const char* kFocalSweepSquared = "u; -u^2+v^2; u^2+v^3+v*s^2+u^2*v";
inline constexpr const char* kParabolaFamily = "u; v^2; v^3-v*s^2+u^2*v";
// f21(0) = f31(0) = 1
inline constexpr const char* kBothCurvatures = "u; v^2+u^2; u^2+v^3+u^2*v+s*v";

inline Jet poly(int nvars, int order, std::initializer_list<std::pair<Exponent, double>> terms) {
    Jet j(nvars, order);
    for (const auto& [e, c] : terms) j.set(e, j.coeff(e) + c);
    return j;
}

inline Jet random_jet(std::mt19937_64& rng, int nvars, int order, double c0 = 0.0) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Jet j(nvars, order);
    for (std::size_t i = 0; i < j.size(); ++i) j[i] = d(rng);
    j[0] = c0;
    return j;
}

// Largest |a_i - b_i| / max(1, |b_i|).
inline double rel_gap(const Jet& a, const Jet& b) {
    double g = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        g = std::max(g, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    }
    return g;
}

// Same, ignoring coefficients above total degree `deg`.
inline double rel_gap_to(const Jet& a, const Jet& b, int deg) {
    double g = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (total_degree(a.exponent(i)) > deg) continue;
        g = std::max(g, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    }
    return g;
}

}  // namespace s1d::test
