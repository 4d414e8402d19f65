#include <doctest.h>

#include <cmath>

#include "bounce/extension.hpp"
#include "oracles.hpp"

using namespace bounce;

namespace {

/// Free flight at g = 2: k = 1 and every extension constant is hand-checkable.
ExtensionContext shear_ext() {
    return make_extension_context(make_generating_context(2.0, ForcingFunction{}));
}

} // namespace

TEST_CASE("infimum of the gluing quotient: closed form equals a dense scan") {
    const double A = 0.125, C = 1.5, x0 = 1.0;
    const double closed = phi_infimum(A, C, x0);
    CHECK(closed == doctest::Approx(-C * C / (4.0 * A)).epsilon(1e-14));
    double scanned = 0.0;
    for (int i = 1; i <= 200000; ++i) {
        const double v = -2.0 * i / 200000.0; // covers the minimizer v = -2A/C
        scanned = std::min(scanned, (A + C * v) / (v * v));
    }
    CHECK(closed == doctest::Approx(scanned).epsilon(1e-6));
    CHECK(phi_infimum(A, 0.0, x0) == 0.0);
    CHECK_THROWS_AS(phi_infimum(-1.0, 1.0, x0), std::invalid_argument);
}

TEST_CASE("extension constants for free flight are the hand-derived values") {
    const auto ext = shear_ext();
    CHECK(ext.c.k == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ext.c.epsilon == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(ext.c.epsilon_tilde == doctest::Approx(-0.125).epsilon(1e-14));
    CHECK(ext.c.A == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(ext.c.C == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(ext.c.I == doctest::Approx(-4.5).epsilon(1e-12));
    CHECK(ext.c.H == doctest::Approx(-5.5).epsilon(1e-12));
    REQUIRE(ext.base.cert.epsilon_tilde.has_value());
    CHECK(*ext.base.cert.epsilon_tilde == doctest::Approx(-0.125).epsilon(1e-14));
}

TEST_CASE("extended cross derivative: dispatch, bound, and seam smoothness") {
    const auto ext = shear_ext();
    const double k = ext.c.k;
    for (double t0 : {0.0, 0.4})
        for (double gap : {k, k + 0.5, k + 3.0})
            CHECK(extended_cross(ext, t0, t0 + gap) ==
                  doctest::Approx(cross_derivative(ext.base, t0, t0 + gap)).epsilon(1e-14));
    for (double t0 : {0.1, 0.7})
        for (double gap : {-2.0, -0.5, 0.0, 0.4, k - 0.01, k + 0.7})
            CHECK(extended_cross(ext, t0, t0 + gap) <= ext.c.epsilon_tilde + 1e-12);
    // one-sided difference quotients across the seam agree (C1 glue)
    const double t0 = 0.3, t1 = t0 + k;
    const double delta = 1e-6;
    const double below = (extended_cross(ext, t0, t1) - extended_cross(ext, t0, t1 - delta)) / delta;
    const double above = (extended_cross(ext, t0, t1 + delta) - extended_cross(ext, t0, t1)) / delta;
    CHECK(below == doctest::Approx(above).epsilon(1e-4));
}

TEST_CASE("rebuilt h reproduces the closed form above the seam") {
    const auto ext = shear_ext();
    const double g = 2.0;
    for (double t0 : {0.0, 0.35})
        for (double gap : {ext.c.k + 0.4, ext.c.k + 1.6}) {
            const double exact = g * g * gap * gap * gap / 24.0;
            CHECK(std::abs(wave_h(ext, t0, t0 + gap) - exact) < 1e-8);
            CHECK(extended_h(ext, t0, t0 + gap) == doctest::Approx(exact).epsilon(1e-13));
        }
}

TEST_CASE("seam Cauchy data: documented free-flight values and consistency") {
    const auto ext = shear_ext();
    for (double t0 : {0.0, 0.25, 0.6}) {
        const auto b = boundary_data(ext, t0);
        CHECK(b.phi == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
        CHECK(b.psi == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(b.phi_prime == doctest::Approx(0.0).epsilon(1e-13));
    }
    const auto canonical = make_extension_context(
        make_generating_context(1.0, ForcingFunction(0.0, {{0.0, 0.05}})));
    for (double t0 : {0.2, 0.85}) {
        const auto b = boundary_data(canonical, t0);
        const double fd = oracles::diff1(
            [&](double x) { return boundary_data(canonical, x).phi; }, t0);
        CHECK(b.phi_prime == doctest::Approx(fd).epsilon(1e-7));
        const auto p = h_partials(canonical.base, t0, t0 + canonical.c.k);
        CHECK(b.psi == doctest::Approx(p.d2 - p.d1).epsilon(1e-12));
        CHECK(b.phi_prime == doctest::Approx(p.d1 + p.d2).epsilon(1e-12));
    }
}

TEST_CASE("below the seam the rebuild satisfies the rectangle identity") {
    const auto ext = shear_ext();
    const double k = ext.c.k;
    for (double gap : {0.3, 0.7, -0.4}) {
        const double X = 0.2, Y = X + gap;
        // corners: P target, A and B on the seam, C above it
        const double uA = boundary_data(ext, Y - k).phi;
        const double uB = boundary_data(ext, X).phi;
        const double uC = wave_h(ext, Y - k, X + k);
        const double integral = oracles::integrate_2d(
            [&](double s, double t) { return extended_cross(ext, s, t); }, Y - k, X, Y, X + k,
            512);
        const double expected = uA + uB - uC - integral;
        CHECK(std::abs(wave_h(ext, X, Y) - expected) < 2e-4);
        CHECK(std::abs(extended_h(ext, X, Y) - expected) < 2e-4);
    }
}

TEST_CASE("extended partials: closed form above, quadrature consistent below") {
    const auto ext = shear_ext();
    const double k = ext.c.k;
    {
        const double t0 = 0.15, t1 = t0 + k + 0.9;
        const auto a = extended_partials(ext, t0, t1);
        const auto b = h_partials(ext.base, t0, t1);
        CHECK(a.d1 == doctest::Approx(b.d1).epsilon(1e-13));
        CHECK(a.d2 == doctest::Approx(b.d2).epsilon(1e-13));
    }
    for (double gap : {0.5, -0.6}) {
        const double t0 = 0.4, t1 = t0 + gap;
        const auto p = extended_partials(ext, t0, t1);
        const double fd1 = oracles::diff1(
            [&](double x) { return extended_h(ext, x, t1); }, t0, 1e-4);
        const double fd2 = oracles::diff1(
            [&](double x) { return extended_h(ext, t0, x); }, t1, 1e-4);
        CHECK(p.d1 == doctest::Approx(fd1).epsilon(1e-6));
        CHECK(p.d2 == doctest::Approx(fd2).epsilon(1e-6));
    }
}

TEST_CASE("extended second partials agree with difference quotients below the seam") {
    const auto ext = shear_ext();
    const double t0 = 0.25, t1 = t0 + 0.45;
    const auto s = extended_second_partials(ext, t0, t1);
    const double fd11 = oracles::diff2([&](double x) { return extended_h(ext, x, t1); }, t0, 1e-3);
    const double fd22 = oracles::diff2([&](double x) { return extended_h(ext, t0, x); }, t1, 1e-3);
    CHECK(s.d11 == doctest::Approx(fd11).epsilon(1e-4));
    CHECK(s.d22 == doctest::Approx(fd22).epsilon(1e-4));
}

TEST_CASE("the full extension audit passes for free flight") {
    const auto report = verify_extension(shear_ext());
    for (const auto& check : report.checks) {
        INFO(check.name << ": " << check.measured << " vs " << check.threshold);
        CHECK(check.pass);
    }
    CHECK(report.all_pass);
}
