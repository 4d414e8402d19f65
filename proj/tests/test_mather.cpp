#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "bounce/extension.hpp"
#include "bounce/genfun.hpp"
#include "bounce/mather.hpp"
#include "oracles.hpp"

using namespace bounce;

namespace {

const ExtensionContext& ctx_free_g2() {
    static const ExtensionContext ext =
        make_extension_context(make_generating_context(2.0, ForcingFunction{}));
    return ext;
}

const ExtensionContext& ctx_canonical_g2() {
    static const ExtensionContext ext = make_extension_context(
        make_generating_context(2.0, ForcingFunction(0.0, {{0.0, 0.03}, {0.01, 0.0}})));
    return ext;
}

const ExtensionContext& ctx_sine_g1() {
    static const ExtensionContext ext = make_extension_context(
        make_generating_context(1.0, ForcingFunction(0.0, {{0.0, 0.05}})));
    return ext;
}

SolveOptions quick_opt(std::uint64_t seed = 4242, int starts = 8) {
    SolveOptions opt;
    opt.multistarts = starts;
    opt.seed = seed;
    return opt;
}

} // namespace

TEST_CASE("periodic action without forcing: the documented one-bounce value") {
    PeriodicConfiguration cfg;
    cfg.p = 3;
    cfg.q = 1;
    cfg.times = {0.81};
    CHECK(action(ctx_free_g2(), cfg) == doctest::Approx(4.5).epsilon(1e-14));
    CHECK(el_residual(ctx_free_g2(), cfg) < 1e-13);
}

TEST_CASE("free minimizers carry equal gaps and the exact orbit energies") {
    const auto cfg = minimize_periodic(ctx_free_g2(), 4, 1, quick_opt());
    CHECK(cfg.action == doctest::Approx(4.0 * 64.0 / 24.0).epsilon(1e-13));
    const auto orbit = reconstruct_orbit(ctx_free_g2(), cfg);
    CHECK(orbit.alpha == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(orbit.window[0].E() == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(orbit.window[0].w() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(orbit.cert.spacing_band);
    CHECK(orbit.cert.deviation_band);
    CHECK(orbit.cert.gaps_above_k);
    CHECK(orbit.cert.map_consistent);
    CHECK(orbit.cert.map_defect < 1e-10);
}

TEST_CASE("refinement commutes with translation by one period") {
    const auto& ext = ctx_canonical_g2();
    std::vector<double> start{0.31, 4.77};
    const auto a = refine_configuration(ext, 9, 2, start);
    for (auto& t : start) t += 1.0;
    const auto b = refine_configuration(ext, 9, 2, start);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t i = 0; i < a.times.size(); ++i)
        CHECK(b.times[i] == doctest::Approx(a.times[i] + 1.0).epsilon(1e-9));
}

TEST_CASE("minimization is deterministic for a fixed seed") {
    const auto& ext = ctx_canonical_g2();
    const auto a = minimize_periodic(ext, 9, 2, quick_opt(777));
    const auto b = minimize_periodic(ext, 9, 2, quick_opt(777));
    CHECK(a.action == b.action);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t i = 0; i < a.times.size(); ++i) CHECK(a.times[i] == b.times[i]);
}

TEST_CASE("doubling the multistart budget never worsens the minimum") {
    const auto& ext = ctx_canonical_g2();
    const auto small = minimize_periodic(ext, 13, 3, quick_opt(55, 4));
    const auto large = minimize_periodic(ext, 13, 3, quick_opt(55, 8));
    CHECK(large.action <= small.action + 1e-12);
}

TEST_CASE("ratio validation: lowest terms and the admissibility floor") {
    const auto& ext = ctx_canonical_g2();
    CHECK_THROWS_AS((void)minimize_periodic(ext, 4, 2, quick_opt()), std::invalid_argument);
    CHECK_THROWS_AS((void)minimize_periodic(ext, 6, 2, quick_opt()), std::invalid_argument);
    // k = 1.2566 here, so rotation number 3 sits below the floor k + 2
    CHECK_THROWS_AS((void)minimize_periodic(ext, 3, 1, quick_opt()), std::domain_error);
}

TEST_CASE("one-bounce minimizer matches a dense scan of the period map") {
    const auto& ext = ctx_canonical_g2();
    const auto cfg = minimize_periodic(ext, 4, 1, quick_opt());
    auto fun = [&](double t) { return h_value(ext.base, t, t + 4.0); };
    const double t_star = oracles::grid_argmin(fun, 0.0, 1.0);
    CHECK(cfg.action == doctest::Approx(fun(t_star)).epsilon(1e-10));
    CHECK(std::abs(cfg.times[0] - t_star) < 1e-6);
    CHECK(cfg.el_residual < 1e-12);
}

TEST_CASE("pointwise order of configurations") {
    const std::vector<double> a{0.0, 1.0};
    const std::vector<double> b{0.5, 1.5};
    const std::vector<double> crossing{-0.5, 1.5};
    CHECK(order_compare(a, b) == OrderRelation::ALessB);
    CHECK(order_compare(b, a) == OrderRelation::BLessA);
    CHECK(order_compare(a, a) == OrderRelation::Equal);
    CHECK(order_compare(a, crossing) == OrderRelation::Incomparable);
}

TEST_CASE("band certificates flag constructed violations") {
    const double alpha = 4.0, k = 1.0;
    const std::vector<double> good{0.0, 4.1, 7.9, 12.0};
    const auto ok = certify_bounds(good, alpha, k);
    CHECK(ok.spacing_band);
    CHECK(ok.deviation_band);
    CHECK(ok.gaps_above_k);
    // deviation exactly 1 is not strictly inside the band
    const std::vector<double> drifted{0.0, 4.0, 9.0};
    CHECK_FALSE(certify_bounds(drifted, alpha, k).deviation_band);
    // a sub-threshold gap violates both the spacing band and the gap floor
    const std::vector<double> clustered{0.0, 0.5, 8.0};
    const auto bad = certify_bounds(clustered, alpha, k);
    CHECK_FALSE(bad.spacing_band);
    CHECK_FALSE(bad.gaps_above_k);
}

TEST_CASE("the stationarity gradient is the two-sided energy mismatch") {
    const auto& ext = ctx_canonical_g2();
    PeriodicConfiguration cfg;
    cfg.p = 9;
    cfg.q = 2;
    cfg.times = {0.27, 4.9};
    const auto grad = el_gradient(ext, cfg);
    const auto edge0 = h_partials(ext.base, 0.27, 4.9);
    const auto edge1 = h_partials(ext.base, 4.9, 0.27 + 9.0);
    CHECK(grad[0] == doctest::Approx(h_partials(ext.base, 4.9 - 9.0, 0.27).d2 + edge0.d1)
                         .epsilon(1e-12));
    CHECK(grad[1] == doctest::Approx(edge0.d2 + edge1.d1).epsilon(1e-12));
}

TEST_CASE("at a minimizer the off-diagonal second variation stays uniformly negative") {
    const auto& ext = ctx_canonical_g2();
    const auto cfg = minimize_periodic(ext, 9, 2, quick_opt());
    const double eps_tilde = *ext.base.cert.epsilon_tilde;
    for (int i = 0; i < 2; ++i) {
        const double a = cfg.times[static_cast<std::size_t>(i)];
        const double b = (i + 1 < 2) ? cfg.times[static_cast<std::size_t>(i + 1)]
                                     : cfg.times[0] + 9.0;
        CHECK(extended_cross(ext, a, b) <= eps_tilde);
    }
}

TEST_CASE("compact perturbations of a minimizer increase the action") {
    const auto& ext = ctx_canonical_g2();
    const auto cfg = minimize_periodic(ext, 13, 3, quick_opt());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double delta : {1e-3, 1e-2}) {
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> dir(cfg.times.size());
            double mean = 0.0;
            for (auto& d : dir) { d = u(rng); mean += d; }
            mean /= static_cast<double>(dir.size());
            double norm = 0.0;
            for (auto& d : dir) { d -= mean; norm = std::max(norm, std::abs(d)); }
            if (norm < 1e-3) continue; // translation direction carries no signal
            PeriodicConfiguration pert = cfg;
            for (std::size_t i = 0; i < dir.size(); ++i)
                pert.times[i] += delta * dir[i] / norm;
            CHECK(action(ext, pert) > cfg.action + 1e-13);
        }
    }
}

TEST_CASE("self-connection sanity mode stays on the periodic orbit") {
    const auto anchor = minimize_periodic(ctx_free_g2(), 4, 1, quick_opt());
    const auto conn = heteroclinic(ctx_free_g2(), anchor, anchor, 12, quick_opt(), true);
    CHECK(conn.anchor_order == OrderRelation::Equal);
    CHECK(conn.interior_residual < 1e-8);
    CHECK(conn.tail_defect_from < 1e-8);
    CHECK(conn.tail_defect_to < 1e-8);
    for (std::size_t i = 0; i + 1 < conn.times.size(); ++i)
        CHECK(conn.times[i] < conn.times[i + 1]);
}

TEST_CASE("a connection between neighboring translates leaves one and reaches the other") {
    const auto& ext = ctx_sine_g1();
    const auto from = minimize_periodic(ext, 5, 1, quick_opt(99));
    auto to = from;
    for (auto& t : to.times) t += 1.0;
    const auto conn = heteroclinic(ext, from, to, 16, quick_opt(99));
    CHECK(conn.anchor_order == OrderRelation::ALessB);
    CHECK(conn.interior_residual < 1e-8);
    CHECK(conn.tail_defect_from < 1e-3);
    CHECK(conn.tail_defect_to < 1e-3);
    for (std::size_t i = 0; i + 1 < conn.times.size(); ++i) {
        const double gap = conn.times[i + 1] - conn.times[i];
        CHECK(gap > 3.0);
        CHECK(gap < 7.0);
    }
    // the window is pinned to the anchors at its ends
    CHECK(conn.times.front() ==
          doctest::Approx(from.times[0] - 16.0 * 5.0).epsilon(1e-9));
    CHECK(conn.times.back() == doctest::Approx(to.times[0] + 16.0 * 5.0).epsilon(1e-9));
}

TEST_CASE("convergent probe: levels follow the continued fraction, gaps stay rigid") {
    const double alpha = 5.0 + (std::sqrt(5.0) - 1.0) / 2.0;
    const auto probe = cantor_probe(ctx_free_g2(), alpha, 5, quick_opt(31, 4));
    REQUIRE(probe.rows.size() == 5);
    // independent continued-fraction recurrence
    int pm2 = 0, qm2 = 1, pm1 = 1, qm1 = 0;
    double x = alpha;
    for (const auto& row : probe.rows) {
        const int a = static_cast<int>(std::floor(x));
        const int p = a * pm1 + pm2, q = a * qm1 + qm2;
        CHECK(row.p == p);
        CHECK(row.q == q);
        pm2 = pm1; qm2 = qm1; pm1 = p; qm1 = q;
        x = 1.0 / (x - a);
        if (!row.skipped) {
            CHECK(row.max_gap == doctest::Approx(1.0 / row.q).epsilon(1e-6));
            CHECK(row.gap_times_q == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
    for (double s : probe.stability) CHECK(s <= 0.05);
}

TEST_CASE("convergent probe skips ratios at or below the admissibility floor") {
    // alpha_star = 3.2566 here; the first convergent of 3.4 is 3/1
    const auto probe = cantor_probe(ctx_canonical_g2(), 3.4, 4, quick_opt(31, 4));
    REQUIRE(probe.rows.size() >= 2);
    CHECK(probe.rows[0].p == 3);
    CHECK(probe.rows[0].q == 1);
    CHECK(probe.rows[0].skipped);
    CHECK(probe.rows[1].p == 7);
    CHECK(probe.rows[1].q == 2);
    CHECK_FALSE(probe.rows[1].skipped);
    CHECK_THROWS_AS((void)cantor_probe(ctx_canonical_g2(), 2.0, 4, quick_opt()),
                    std::domain_error);
    CHECK_THROWS_AS((void)cantor_probe(ctx_canonical_g2(), 5.6, 9, quick_opt()),
                    std::invalid_argument);
}

TEST_CASE("orbit reconstruction demands a genuinely critical configuration") {
    PeriodicConfiguration arbitrary;
    arbitrary.p = 4;
    arbitrary.q = 1;
    arbitrary.times = {0.3};
    arbitrary.el_residual = el_residual(ctx_canonical_g2(), arbitrary);
    CHECK(arbitrary.el_residual > 1e-6);
    CHECK_THROWS_AS((void)reconstruct_orbit(ctx_canonical_g2(), arbitrary),
                    std::invalid_argument);
}
