#include <algorithm>
#include <doctest.h>

#include <array>
#include <random>

#include "s1deform/errors.hpp"
#include "s1deform/jet.hpp"
#include "support.hpp"

using namespace s1d;
using namespace s1d::test;

TEST_SUITE("jet") {

TEST_CASE("layout holds every multi-index up to the order once") {
    for (int nv = 1; nv <= 3; ++nv) {
        for (int n = 0; n <= 8; ++n) {
            const Jet j(nv, n);
            std::size_t expected = 0;
            for (int a = 0; a <= n; ++a)
                for (int b = 0; b <= (nv > 1 ? n : 0); ++b)
                    for (int c = 0; c <= (nv > 2 ? n : 0); ++c)
                        if (a + b + c <= n) ++expected;
            CHECK(j.size() == expected);
            for (std::size_t i = 0; i < j.size(); ++i) {
                CHECK(total_degree(j.exponent(i)) <= n);
                CHECK(j.layout().index(j.exponent(i)) == static_cast<std::ptrdiff_t>(i));
            }
        }
    }
}

TEST_CASE("products truncate at the order") {
    const Jet one_plus = poly(1, 3, {{{0, 0, 0}, 1}, {{1, 0, 0}, 1}});
    const Jet one_minus = poly(1, 3, {{{0, 0, 0}, 1}, {{1, 0, 0}, -1}});
    const Jet p = one_plus * one_minus;
    CHECK(p.coeff({0, 0, 0}) == 1.0);
    CHECK(p.coeff({1, 0, 0}) == 0.0);
    CHECK(p.coeff({2, 0, 0}) == -1.0);

    const Jet w = poly(2, 2, {{{1, 0, 0}, 1}, {{0, 1, 0}, 1}});
    const Jet sq = w * w;
    CHECK(sq.coeff({2, 0, 0}) == 1.0);
    CHECK(sq.coeff({1, 1, 0}) == 2.0);
    CHECK(sq.coeff({0, 2, 0}) == 1.0);
    CHECK(rel_gap(w * (w * w), Jet(2, 2)) == 0.0);  // degree 3 is dropped

    std::mt19937_64 rng(3);
    const Jet a = random_jet(rng, 3, 5, 0.7);
    CHECK(rel_gap(a + Jet(3, 5), a) == 0.0);
}

TEST_CASE("partial derivatives") {
    const Jet f = poly(3, 4, {{{2, 1, 0}, 1}});
    const Jet fu = partial(f, 0);
    CHECK(fu.coeff({1, 1, 0}) == 2.0);
    CHECK(rel_gap(partial(Jet::constant(3, 4, 5.0), 1), Jet(3, 4)) == 0.0);
    const Jet usf = poly(3, 4, {{{1, 0, 1}, 1}});
    CHECK(rel_gap(partial(usf, 2), poly(3, 4, {{{1, 0, 0}, 1}})) == 0.0);
}

TEST_CASE("compose") {
    const int n = 4;
    const Jet u2 = poly(2, n, {{{2, 0, 0}, 1}});
    const std::array<Jet, 2> shear{poly(2, n, {{{1, 0, 0}, 1}, {{0, 1, 0}, 1}}), Jet::variable(2, n, 1)};
    const Jet r = compose(u2, shear);
    CHECK(r.coeff({2, 0, 0}) == 1.0);
    CHECK(r.coeff({1, 1, 0}) == 2.0);
    CHECK(r.coeff({0, 2, 0}) == 1.0);

    std::mt19937_64 rng(5);
    const Jet a = random_jet(rng, 3, 6, 0.3);
    const std::array<Jet, 3> id{Jet::variable(3, 6, 0), Jet::variable(3, 6, 1), Jet::variable(3, 6, 2)};
    CHECK(rel_gap(compose(a, id), a) < 1e-15);

    // u composed with v - sigma at sigma = -u/2
    const Jet outer = poly(1, n, {{{1, 0, 0}, 1}});
    const std::array<Jet, 1> inner{poly(2, n, {{{0, 1, 0}, 1}, {{1, 0, 0}, 0.5}})};
    const Jet w = compose(outer, inner);
    CHECK(w.coeff({0, 1, 0}) == 1.0);
    CHECK(w.coeff({1, 0, 0}) == 0.5);
}

TEST_CASE("sqrt and recip examples") {
    const Jet a = poly(1, 2, {{{0, 0, 0}, 1}, {{1, 0, 0}, 2}});
    const Jet r = sqrt(a);
    CHECK(r.coeff({0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.coeff({1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.coeff({2, 0, 0}) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(sqrt(Jet::constant(1, 3, 4.0)).constant_term() == 2.0);

    const Jet g = recip(poly(1, 3, {{{0, 0, 0}, 1}, {{1, 0, 0}, -1}}));
    for (int k = 0; k <= 3; ++k) CHECK(g.coeff({k, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(sqrt(Jet::constant(1, 3, -1.0)), DomainError);
    CHECK_THROWS_AS(recip(Jet(1, 3)), DomainError);
}

TEST_CASE("ring laws hold coefficientwise") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Jet a = random_jet(rng, 3, 8, 0.5);
        const Jet b = random_jet(rng, 3, 8, -0.25);
        const Jet c = random_jet(rng, 3, 8, 1.5);
        CHECK(rel_gap((a + b) + c, a + (b + c)) < 1e-15);
        CHECK(rel_gap(a * b, b * a) < 1e-14);
        CHECK(rel_gap(a * (b + c), a * b + a * c) < 1e-12);
    }
}

TEST_CASE("Leibniz rule below the top degree") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const Jet a = random_jet(rng, 3, 8, 0.5);
        const Jet b = random_jet(rng, 3, 8, 2.0);
        for (int var = 0; var < 3; ++var) {
            const Jet lhs = partial(a * b, var);
            const Jet rhs = partial(a, var) * b + a * partial(b, var);
            CHECK(rel_gap_to(lhs, rhs, 7) < 1e-12);
        }
    }
}

TEST_CASE("sqrt squares back and recip inverts") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const Jet a = random_jet(rng, 3, 8, 1.0 + trial * 0.25);
        const Jet r = sqrt(a);
        CHECK(rel_gap(r * r, a) < 1e-12);
        CHECK(rel_gap(recip(a) * a, Jet::constant(3, 8, 1.0)) < 1e-12);
    }
}

TEST_CASE("implicit_solve") {
    const int n = 8;
    const Jet lam1 = poly(3, n, {{{0, 1, 0}, 2}, {{1, 0, 0}, 1}});
    const Jet s1 = implicit_solve(lam1);
    CHECK(s1.coeff({1, 0, 0}) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(rel_gap(implicit_solve(poly(3, n, {{{0, 1, 0}, 2}})), Jet(2, n)) == 0.0);

    const Jet lam3 = poly(3, n, {{{0, 1, 0}, 2}, {{2, 0, 0}, 1}, {{1, 0, 1}, 1}});
    const Jet s3 = implicit_solve(lam3);
    CHECK(rel_gap(s3, poly(2, n, {{{2, 0, 0}, -0.5}, {{1, 1, 0}, -0.5}})) < 1e-15);

    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        Jet lam = random_jet(rng, 3, n);
        lam.set({0, 1, 0}, 1.0 + trial * 0.1);
        const Jet sigma = implicit_solve(lam);
        const std::array<Jet, 3> inner{Jet::variable(2, n, 0), sigma, Jet::variable(2, n, 1)};
        CHECK(rel_gap(compose(lam, inner), Jet(2, n)) < 1e-12);
    }
    CHECK_THROWS_AS(implicit_solve(poly(3, n, {{{1, 0, 0}, 1}})), DegeneracyError);
}

TEST_CASE("map_invert") {
    const int n = 8;
    const Jet u = Jet::variable(3, n, 0);
    const Jet v = Jet::variable(3, n, 1);
    const Jet s = Jet::variable(3, n, 2);

    const JetTriple half = map_invert({u, 2.0 * v, s});
    CHECK(rel_gap(half[1], 0.5 * v) < 1e-15);
    CHECK(rel_gap(map_invert({u, v, s})[1], v) == 0.0);

    // v(1+u): inverse v(1 - u + u^2 - ...)
    const JetTriple inv = map_invert({u, v * (u + 1.0), s});
    for (int k = 0; k < n; ++k) CHECK(inv[1].coeff({k, 1, 0}) == doctest::Approx(k % 2 ? -1.0 : 1.0).epsilon(1e-14));

    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 10; ++trial) {
        Jet V = random_jet(rng, 3, n);
        V.set({0, 1, 0}, 1.0 + 0.2 * trial);
        const JetTriple phi{u, V, s};
        const JetTriple psi = map_invert(phi);
        const std::array<Jet, 3> a{psi[0], psi[1], psi[2]};
        const std::array<Jet, 3> b{phi[0], phi[1], phi[2]};
        // Inverse coefficients grow fast with degree; round-off scales with them.
        const double scale = std::max({1.0, V.max_abs(), psi[1].max_abs()});
        CAPTURE(scale);
        CHECK(rel_gap(compose(V, a), v) < 1e-14 * scale * scale);
        CHECK(rel_gap(compose(psi[1], b), v) < 1e-14 * scale * scale);
    }
}

TEST_CASE("branch_solve against the coefficient-matching oracle") {
    const int n = 8;
    const Jet plain = poly(2, n, {{{0, 2, 0}, -1}, {{2, 0, 0}, 1}});
    const auto a0 = branch_solve(plain);
    CHECK(a0[0] == doctest::Approx(1.0));
    for (std::size_t k = 1; k < a0.size(); ++k) CHECK(std::abs(a0[k]) < 1e-14);

    // oracle: 1, -1/2, 5/8, -1, 231/128
    const Jet cubic = poly(2, n, {{{0, 2, 0}, -1}, {{2, 0, 0}, 1}, {{3, 0, 0}, 1}});
    const auto a = branch_solve(cubic);
    const std::array<double, 5> oracle{1.0, -0.5, 0.625, -1.0, 231.0 / 128.0};
    for (std::size_t k = 0; k < oracle.size(); ++k) CHECK(a[k] == doctest::Approx(oracle[k]).epsilon(1e-12));

    // -t^2 + (1 - m t^2) u^2: alpha_3 = m/2
    const double m = 0.7;
    const Jet fm = poly(2, n, {{{0, 2, 0}, -1}, {{2, 0, 0}, 1}, {{2, 2, 0}, -m}});
    const auto am = branch_solve(fm);
    CHECK(am[1] == doctest::Approx(0.0));
    CHECK(am[2] == doctest::Approx(m / 2).epsilon(1e-12));

    // the residual lives only above degree N-1 in t
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 10; ++trial) {
        Jet f = random_jet(rng, 2, n);
        f.set({1, 0, 0}, 0.0);
        f.set({0, 1, 0}, 0.0);
        f.set({1, 1, 0}, 0.0);
        f.set({2, 0, 0}, 1.0 + 0.1 * trial);
        f.set({0, 2, 0}, -1.0);
        // no pure-t terms beyond t^2 would shift the branch off u ~ t; keep them
        const auto alpha = branch_solve(f);
        const Jet ut = series_from_coefficients(alpha, n);
        const std::array<Jet, 2> inner{ut, Jet::variable(1, n, 0)};
        const Jet r = compose(f, inner);
        for (int k = 0; k < n; ++k) CHECK(std::abs(r.coeff({k, 0, 0})) < 1e-12 * std::max(1.0, f.max_abs()));
    }
}

}  // TEST_SUITE
