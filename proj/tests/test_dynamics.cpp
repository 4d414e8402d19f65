#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bounce/dynamics.hpp"
#include "bounce/errors.hpp"
#include "bounce/forcing.hpp"
#include "oracles.hpp"

using namespace bounce;

namespace {

ForcingFunction canonical() { return ForcingFunction(0.0, {{0.0, 0.03}, {0.01, 0.0}}); }

} // namespace

TEST_CASE("impact states store energy and reject bad launches") {
    const ImpactState s(0.4, 3.0);
    CHECK(s.E() == doctest::Approx(4.5).epsilon(1e-15));
    CHECK_THROWS_AS(ImpactState(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(ImpactState(0.0, -1.0), std::domain_error);
}

TEST_CASE("orbit windows demand strictly increasing times") {
    OrbitWindow w;
    w.append(ImpactState(0.0, 1.0));
    w.append(ImpactState(1.5, 1.0));
    CHECK_THROWS_AS(w.append(ImpactState(1.5, 2.0)), std::invalid_argument);
    CHECK(w.gaps().size() == 1);
    CHECK(w.gaps()[0] == doctest::Approx(1.5));
}

TEST_CASE("dirichlet arcs touch the wall at both ends") {
    const auto f = canonical();
    const double g = 1.0;
    const auto arc = solve_dirichlet(g, f, 0.27, 3.81);
    CHECK(std::abs(arc_position(arc, g, f, arc.t0)) < 1e-12);
    CHECK(std::abs(arc_position(arc, g, f, arc.t1)) < 1e-12);
    const double mid = 0.5 * (arc.t0 + arc.t1);
    CHECK(arc_position(arc, g, f, mid) > 0.0);
    const double fd = oracles::diff1([&](double t) { return arc_position(arc, g, f, t); }, mid);
    CHECK(arc_velocity(arc, g, f, mid) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("boundary velocities: symmetric closed form without forcing") {
    const ForcingFunction f0;
    const double g = 2.0, gap = 2.0;
    const auto arc = solve_dirichlet(g, f0, 0.3, 0.3 + gap);
    const auto [w_dep, w_arr] = boundary_velocities(g, f0, arc);
    CHECK(w_dep == doctest::Approx(g * gap / 2.0).epsilon(1e-13));
    CHECK(w_arr == doctest::Approx(g * gap / 2.0).epsilon(1e-13));
    CHECK(w_dep == doctest::Approx(arc_velocity(arc, g, f0, arc.t0)).epsilon(1e-12));
    CHECK(w_arr == doctest::Approx(-arc_velocity(arc, g, f0, arc.t1)).epsilon(1e-12));
}

TEST_CASE("positivity check accepts real arcs and flags forced dips") {
    const ForcingFunction f0;
    const double g = 1.0;
    CHECK(positivity_check(g, f0, solve_dirichlet(g, f0, 0.0, 2.0)));
    // same parabola shifted down: endpoint clearance gone
    FlightArc bad = solve_dirichlet(g, f0, 0.0, 2.0);
    bad.B -= 0.1;
    CHECK_FALSE(positivity_check(g, f0, bad));
    // wrong slope: the arc re-enters the wall inside the interval
    FlightArc tilted = solve_dirichlet(g, f0, 0.0, 2.0);
    tilted.A -= 0.6;
    CHECK_FALSE(positivity_check(g, f0, tilted));
}

TEST_CASE("velocity and gap thresholds reproduce the certified formulas") {
    const ForcingFunction f(0.0, {{0.0, 0.05}});
    const double b1 = 0.05 * 2.0 * std::numbers::pi;
    CHECK(gap_threshold(1.0, f) == doctest::Approx(8.0 * b1).epsilon(1e-14));
    CHECK(velocity_threshold(1.0, f) ==
          doctest::Approx(2.0 * b1 + 0.5 * 8.0 * b1).epsilon(1e-14));
    CHECK(velocity_threshold(1.0, f) == doctest::Approx(0.6 * std::numbers::pi).epsilon(1e-14));
    // weak forcing: the gap floor saturates at 1
    const ForcingFunction weak(0.0, {{0.0, 0.001}});
    CHECK(gap_threshold(9.8, weak) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("impact map without forcing is the exact shear") {
    const ForcingFunction f0;
    for (double g : {1.0, 2.0, 9.8}) {
        const ImpactState s0(0.3, 2.5 * g);
        const auto s1 = map_forward(g, f0, s0);
        CHECK(s1.t() == doctest::Approx(0.3 + 2.0 * s0.w() / g).epsilon(1e-13));
        CHECK(s1.w() == doctest::Approx(s0.w()).epsilon(1e-13));
    }
}

TEST_CASE("impact map agrees with the event-driven simulation step by step") {
    // The dynamics is chaotic (local expansion a few x per bounce), so the two
    // solvers are compared per step from the same state; trajectory-wise
    // differences would be dominated by amplified rounding, not by either solver.
    const auto f = canonical();
    const double g = 1.0;
    const auto window = simulate_continuous(g, f, ImpactState(0.2, 6.5), 20);
    for (int i = 0; i < 20; ++i) {
        const auto& cur = window[static_cast<std::size_t>(i)];
        const auto s = map_forward(g, f, ImpactState(cur.t(), cur.w()));
        CHECK(std::abs(s.t() - window[static_cast<std::size_t>(i) + 1].t()) < 1e-11);
        CHECK(std::abs(s.w() - window[static_cast<std::size_t>(i) + 1].w()) < 1e-11);
    }
}

TEST_CASE("impact map is deterministic") {
    const auto f = canonical();
    const ImpactState s0(0.77, 9.3);
    const auto a = map_forward(1.0, f, s0);
    const auto b = map_forward(1.0, f, s0);
    CHECK(a.t() == b.t());
    CHECK(a.w() == b.w());
}

TEST_CASE("impact map refuses launches below the certified threshold") {
    const ForcingFunction f(0.0, {{0.0, 0.05}});
    CHECK_THROWS_AS((void)map_forward(1.0, f, ImpactState(0.1, 1.0)), std::domain_error);
}

TEST_CASE("event-driven simulation raises chatter on vanishing gaps") {
    const ForcingFunction f0;
    CHECK_THROWS_AS((void)simulate_continuous(1.0, f0, ImpactState(0.5, 1e-7), 3),
                    ChatterError);
}

TEST_CASE("one map step conserves phase-space area") {
    const auto f = canonical();
    for (double t0 : {0.1, 0.45, 0.9})
        for (double w0 : {4.0, 8.0, 15.0})
            CHECK(symplectic_defect(1.0, f, ImpactState(t0, w0)) < 1e-8);
}
