#include <doctest.h>

#include <random>

#include "s1deform/errors.hpp"
#include "s1deform/normal_form.hpp"
#include "support.hpp"

using namespace s1d;
using namespace s1d::test;

namespace {

double coefficient_gap(const CoefficientSet& a, const CoefficientSet& b) {
    const double x[] = {a.f21_0, a.f21_u, a.f31_0, a.f31_u, a.f24_00, a.f34_00, a.c1_0, a.c2_0,
                        a.c20,   a.c2_s0, a.c3_0,  a.c4_00, a.d1,     a.d2,     a.d3};
    const double y[] = {b.f21_0, b.f21_u, b.f31_0, b.f31_u, b.f24_00, b.f34_00, b.c1_0, b.c2_0,
                        b.c20,   b.c2_s0, b.c3_0,  b.c4_00, b.d1,     b.d2,     b.d3};
    double g = 0.0;
    for (std::size_t i = 0; i < std::size(x); ++i) g = std::max(g, std::abs(x[i] - y[i]));
    return g;
}

CoefficientSet coefficients_of(const MapGerm& f) { return scalar_coefficients(reduce_normalized(f, 8)); }

}  // namespace

TEST_SUITE("normal_form") {

TEST_CASE("f^{s,+} is its own normal form") {
    const NormalFormData nf = reduce(parse_germ(kFsPlus));
    CHECK(nf.F21.max_abs() < 1e-12);
    CHECK(nf.F24.max_abs() < 1e-12);
    CHECK(nf.F31.max_abs() < 1e-12);
    CHECK(nf.F34.max_abs() < 1e-12);
    CHECK(nf.F32.coeff({0, 1, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((nf.F32 - Jet::variable(3, nf.F32.order(), 1)).max_abs() < 1e-12);
    CHECK(nf.F33.coeff({0, 1, 0}) == doctest::Approx(1.0));
    CHECK(nf.F33.coeff({2, 0, 0}) == doctest::Approx(1.0));
    CHECK((nf.rotation - Mat3::Identity()).norm() < 1e-12);
}

TEST_CASE("shape invariants after reduce") {
    for (const char* text : {kFsPlus, kFPlus, kFMinus, kHyperbola, kFocalSweep, "u+v^2; u*s+v^2+u^2*v; v^3+u*v*s+s*v+u^2"}) {
        INFO(text);
        const NormalFormData nf = reduce(parse_germ(text));
        CHECK(std::abs(nf.F32.constant_term()) < 1e-12);
        CHECK(std::abs(nf.F33.constant_term()) < 1e-12);
        CHECK(std::abs(nf.F33.coeff({1, 0, 0})) < 1e-12);
        // second component is u^2 F21 + v^2 + u s F24
        const JetTriple a = nf.assembled();
        const int n = a[1].order();
        const Jet u = Jet::variable(3, n, 0);
        const Jet v = Jet::variable(3, n, 1);
        const Jet s = Jet::variable(3, n, 2);
        const std::array<int, 1> to_u{0};
        const std::array<int, 2> to_us{0, 2};
        const Jet F21 = remap(with_order(nf.F21, n), 3, to_u);
        const Jet F24 = remap(with_order(nf.F24, n), 3, to_us);
        CHECK((a[1] - (u * u * F21 + v * v + u * s * F24)).max_abs() < 1e-12);
        CHECK((a[0] - u).max_abs() < 1e-12);
    }
}

TEST_CASE("normalize_parameter") {
    const NormalFormData nf = reduce_normalized(parse_germ("u; v^2; v*(u^2+2*s)+v^3"), 8);
    CHECK(nf.normalized);
    CHECK_FALSE(nf.parameter_reversed);
    for (int k = 0; k <= 7; ++k) CHECK(std::abs(nf.F33.coeff({0, k, 0}) - (k == 1 ? 1.0 : 0.0)) < 1e-12);
    CHECK(nf.F33.coeff({2, 0, 0}) == doctest::Approx(1.0));

    CHECK_THROWS_AS(normalize_parameter(reduce(parse_germ("u; v^2; v*(u^2+s^2)+v^3"))), DegeneracyError);
    bool generic = true;
    reduce_normalized(parse_germ(kParabolaFamily), 8, &generic);
    CHECK_FALSE(generic);

    const NormalFormData rev = reduce_normalized(parse_germ("u; v^2; v*(u^2-s)+v^3"), 8);
    CHECK(rev.parameter_reversed);
}

TEST_CASE("hand-split germ") {
    const CoefficientSet c = coefficients_of(parse_germ(kFPlus));
    CHECK(std::abs(c.f21_0) < 1e-12);
    CHECK(c.f31_0 == doctest::Approx(1.0));
    CHECK(c.f24_00 == doctest::Approx(1.0));
    CHECK(c.c20 == doctest::Approx(1.0));
    CHECK(c.d2 == doctest::Approx(1.0));

    const CoefficientSet p = coefficients_of(parse_germ(kFsPlus));
    for (double x : {p.c1_0, p.c3_0, p.c4_00, p.d1, p.d3}) CHECK(std::abs(x) < 1e-12);
    CHECK(p.c20 == doctest::Approx(1.0));
    CHECK(p.d2 == doctest::Approx(1.0));

    CHECK(coefficients_of(parse_germ("u; v^2; v*(s+u^2+u^3)+v^3")).c3_0 == doctest::Approx(1.0));
    CHECK(coefficients_of(parse_germ("u; v^2; v^3+u^2*v+v*s-v*s*u")).c1_0 == doctest::Approx(-1.0));
}

TEST_CASE("classification") {
    CHECK(classify(reduce(parse_germ(kFsPlus))).kind == S1Class::S1Plus);
    CHECK(classify(reduce(parse_germ(kFsPlus))).discriminant == doctest::Approx(2.0));
    CHECK(classify(reduce(parse_germ(kFsMinus))).kind == S1Class::S1Minus);
    CHECK(classify(reduce(parse_germ(kFsMinus))).discriminant == doctest::Approx(-2.0));
    CHECK(classify(reduce(parse_germ("u; v^2; v*s+v^3"))).kind == S1Class::Degenerate);
}

TEST_CASE("monomial coefficients") {
    auto lookup = [](const std::vector<MonomialEntry>& m, const std::string& name) {
        for (const auto& e : m)
            if (e.name == name) return e;
        FAIL("missing " << name);
        return MonomialEntry{};
    };
    const auto plus = monomial_coefficients(reduce_normalized(parse_germ(kFsPlus), 8));
    CHECK(lookup(plus, "a21").value == doctest::Approx(1.0));
    CHECK(lookup(plus, "a03").value == doctest::Approx(1.0));
    for (const char* b : {"b1", "b2", "b3"}) CHECK(std::abs(lookup(plus, b).slope) < 1e-12);
    const auto minus = monomial_coefficients(reduce_normalized(parse_germ(kFsMinus), 8));
    CHECK(lookup(minus, "a03").value == doctest::Approx(-1.0));
    const auto b = monomial_coefficients(reduce_normalized(parse_germ(kFPlus), 8));
    CHECK(std::abs(lookup(b, "b1").value) < 1e-12);
    CHECK(lookup(b, "b1").slope == doctest::Approx(1.0));
    for (const auto& e : b) {
        CHECK(e.value == doctest::Approx(e.value_alt).epsilon(1e-9));
        CHECK(e.slope == doctest::Approx(e.slope_alt).epsilon(1e-9));
    }
}

TEST_CASE("specific equivalences") {
    const CoefficientSet base = coefficients_of(parse_germ(kFsPlus));
    const MapGerm f = parse_germ(kFsPlus);
    DiffeoSpec id{{parse_expression("u"), parse_expression("v"), parse_expression("s")}};
    const MapGerm same = apply_equivalence(f, id, Mat3::Identity());
    for (std::size_t i = 0; i < 3; ++i) CHECK(evaluate(same, {0.3, 0.2, 0.1})(i) == evaluate(f, {0.3, 0.2, 0.1})(i));

    DiffeoSpec shear{{parse_expression("u"), parse_expression("v+u^2"), parse_expression("s")}};
    CHECK(coefficient_gap(coefficients_of(apply_equivalence(f, shear, Mat3::Identity())), base) < 1e-8);

    const double a = std::numbers::pi / 6;
    Mat3 rx;
    rx << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
    CHECK(coefficient_gap(coefficients_of(apply_equivalence(f, shear, rx)), base) < 1e-8);

    DiffeoSpec twice{{parse_expression("u"), parse_expression("v"), parse_expression("2*s")}};
    CHECK(coefficient_gap(coefficients_of(apply_equivalence(f, twice, Mat3::Identity())), base) < 1e-8);

    DiffeoSpec bad{{parse_expression("u"), parse_expression("-v"), parse_expression("s")}};
    CHECK_THROWS_AS(validate_diffeo(bad), UsageError);
    DiffeoSpec moves_s{{parse_expression("u"), parse_expression("v"), parse_expression("s+u")}};
    CHECK_THROWS_AS(validate_diffeo(moves_s), UsageError);
}

TEST_CASE("random equivalences leave the coefficients and the class alone") {
    std::mt19937_64 rng(2024);
    for (const char* text : {kFsPlus, kFsMinus, kFPlus}) {
        const MapGerm f = parse_germ(text);
        const NormalFormData nf0 = reduce_normalized(f, 8);
        const CoefficientSet base = scalar_coefficients(nf0);
        for (int i = 0; i < 5; ++i) {
            const DiffeoSpec phi = random_diffeo(rng);
            validate_diffeo(phi);
            const MapGerm g = apply_equivalence(f, phi, random_rotation(rng));
            const NormalFormData nf = reduce_normalized(g, 8);
            CHECK(coefficient_gap(scalar_coefficients(nf), base) < 1e-8);
            CHECK(classify(nf).kind == classify(nf0).kind);
        }
    }
}

TEST_CASE("reduce rejects inadmissible germs") {
    CHECK_THROWS_AS(reduce(parse_germ(kUmbrella)), DegeneracyError);
    CHECK_THROWS_AS(reduce(parse_germ("u; v^3; 0")), DegeneracyError);
}

}  // TEST_SUITE
