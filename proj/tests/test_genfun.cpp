#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bounce/dynamics.hpp"
#include "bounce/errors.hpp"
#include "bounce/genfun.hpp"
#include "oracles.hpp"

using namespace bounce;

namespace {

GeneratingContext canonical_ctx(double g) {
    return make_generating_context(g, ForcingFunction(0.0, {{0.0, 0.03}, {0.01, 0.0}}));
}

} // namespace

TEST_CASE("free flight: every closed form is exact") {
    const ForcingFunction f0;
    for (double g : {1.0, 2.0, 9.8}) {
        const auto ctx = make_generating_context(g, f0);
        for (double gap : {0.5, 1.0, 5.0}) {
            const double t0 = 0.3, t1 = t0 + gap;
            CHECK(h_value(ctx, t0, t1) ==
                  doctest::Approx(g * g * gap * gap * gap / 24.0).epsilon(1e-13));
            const auto p = h_partials(ctx, t0, t1);
            CHECK(p.d1 == doctest::Approx(-g * g * gap * gap / 8.0).epsilon(1e-13));
            CHECK(p.d2 == doctest::Approx(g * g * gap * gap / 8.0).epsilon(1e-13));
            CHECK(cross_derivative(ctx, t0, t1) ==
                  doctest::Approx(-g * g * gap / 4.0).epsilon(1e-13));
            const auto s = h_second_partials(ctx, t0, t1);
            CHECK(s.d11 == doctest::Approx(g * g * gap / 4.0).epsilon(1e-13));
            CHECK(s.d22 == doctest::Approx(g * g * gap / 4.0).epsilon(1e-13));
            CHECK(third_derivative_difference(ctx, t0, t1) ==
                  doctest::Approx(-g * g / 2.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("one flight of period 3 without forcing: the documented action") {
    const auto ctx = make_generating_context(2.0, ForcingFunction{});
    CHECK(h_value(ctx, 0.81, 3.81) == doctest::Approx(4.5).epsilon(1e-14));
}

TEST_CASE("partial derivatives match difference quotients of h") {
    const auto ctx = canonical_ctx(1.0);
    for (double t0 : {0.15, 0.6})
        for (double gap : {2.7, 5.3, 11.0}) {
            const double t1 = t0 + gap;
            const auto p = h_partials(ctx, t0, t1);
            CHECK(p.d1 == doctest::Approx(oracles::diff1(
                              [&](double x) { return h_value(ctx, x, t1); }, t0))
                              .epsilon(1e-9));
            CHECK(p.d2 == doctest::Approx(oracles::diff1(
                              [&](double x) { return h_value(ctx, t0, x); }, t1))
                              .epsilon(1e-9));
            const auto s = h_second_partials(ctx, t0, t1);
            CHECK(s.d11 == doctest::Approx(oracles::diff2(
                               [&](double x) { return h_value(ctx, x, t1); }, t0))
                               .epsilon(1e-7));
            CHECK(s.d22 == doctest::Approx(oracles::diff2(
                               [&](double x) { return h_value(ctx, t0, x); }, t1))
                               .epsilon(1e-7));
            CHECK(cross_derivative(ctx, t0, t1) ==
                  doctest::Approx(oracles::diff_mixed(
                      [&](double a, double b) { return h_value(ctx, a, b); }, t0, t1))
                      .epsilon(1e-7));
        }
}

TEST_CASE("partials equal the signed energies of the impact map") {
    const auto ctx = canonical_ctx(1.0);
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const ImpactState s0(u01(rng), 5.0 + 10.0 * u01(rng));
        const ImpactState s1 = map_forward(1.0, ctx.f, s0);
        const auto p = h_partials(ctx, s0.t(), s1.t());
        CHECK(std::abs(p.d1 + s0.E()) / s0.E() < 1e-9);
        CHECK(std::abs(p.d2 - s1.E()) / s1.E() < 1e-9);
    }
}

TEST_CASE("twist certificate: explicit constants and a certified sign") {
    const auto ctx = canonical_ctx(1.0);
    const double b1 = 0.03 * 2.0 * std::numbers::pi + 0.01 * 4.0 * std::numbers::pi;
    CHECK(ctx.cert.k == doctest::Approx(std::max(1.0, 8.0 * b1)).epsilon(1e-14));
    CHECK(ctx.cert.epsilon == doctest::Approx(-ctx.cert.k / 16.0).epsilon(1e-14));
    for (double t0 : {0.0, 0.33, 0.71})
        for (double gap : {ctx.cert.k, ctx.cert.k + 1.7, ctx.cert.k + 20.0})
            CHECK(cross_derivative(ctx, t0, t0 + gap) <= ctx.cert.epsilon);
    CHECK_THROWS_AS(make_generating_context(0.0, ForcingFunction{}), std::invalid_argument);
    CHECK_THROWS_AS(make_generating_context(-2.0, ForcingFunction{}), std::invalid_argument);
}

TEST_CASE("diagonal translation by one period leaves h invariant") {
    const auto ctx = canonical_ctx(1.0);
    for (double t0 : {0.12, 0.8})
        for (double gap : {3.3, 7.9}) {
            const double a = h_value(ctx, t0, t0 + gap);
            const double b = h_value(ctx, t0 + 1.0, t0 + 1.0 + gap);
            CHECK(a == doctest::Approx(b).epsilon(1e-13));
            CHECK(cross_derivative(ctx, t0, t0 + gap) ==
                  doctest::Approx(cross_derivative(ctx, t0 + 1.0, t0 + 1.0 + gap))
                      .epsilon(1e-13));
        }
}

TEST_CASE("third-derivative difference matches difference quotients of the cross") {
    const auto ctx = canonical_ctx(1.0);
    for (double t0 : {0.2, 0.55})
        for (double gap : {1.4, 3.0}) {
            const double t1 = t0 + gap;
            // d/du of u -> d(t1-u, t1) at u = gap is -d_t0; of u -> d(t0, t0+u) is +d_t1
            const double fd =
                oracles::diff1([&](double u) { return cross_derivative(ctx, t1 - u, t1); }, gap) +
                oracles::diff1([&](double u) { return cross_derivative(ctx, t0, t0 + u); }, gap);
            CHECK(third_derivative_difference(ctx, t0, t1) ==
                  doctest::Approx(fd).epsilon(1e-6));
        }
}

TEST_CASE("the cross derivative approaches the shear slope at long flights") {
    const auto ctx = canonical_ctx(1.0);
    const double gap = 50.0;
    for (double t0 : {0.05, 0.5, 0.95})
        CHECK(std::abs(cross_derivative(ctx, t0, t0 + gap) / gap + 0.25) < 0.02 * 0.25);
}
