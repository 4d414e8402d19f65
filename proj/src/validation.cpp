#include "bounce/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "bounce/dynamics.hpp"
#include "bounce/errors.hpp"
#include "bounce/experiments.hpp"
#include "bounce/extension.hpp"
#include "bounce/genfun.hpp"
#include "bounce/mather.hpp"

namespace bounce {

namespace {

// Pinned tolerances of the acceptance suite. Every sub-check below is stored
// as value/tolerance, so a run passes when the worst ratio stays <= 1.
constexpr double kTolShear = 1e-12;      // free-flight closed forms, relative
constexpr double kTolGenRel = 1e-8;      // h partials vs map energies, relative
constexpr double kTolGenFd = 1e-7;       // finite-difference cross-check of h
constexpr double kTolSymp = 1e-8;        // |det J - 1| on the admissible grid
constexpr double kTolTwistFrac = 0.02;   // |d/gap + g^2/4| as fraction of g^2/4
constexpr double kTolElResidual = 1e-10; // periodic minimizer stationarity
constexpr double kTolMapDefect = 1e-8;   // impact-map reproduction of minimizers
constexpr double kTolOracle = 1e-9;      // action agreement with the dense grid
constexpr double kTolImpactTimes = 1e-7; // continuous vs discrete, 200 bounces
constexpr double kTolInterior = 1e-8;    // connection interior residual
constexpr double kTolTail = 1e-3;        // connection tail defects
constexpr double kTolDoubling = 1e-8;    // center drift when the window doubles
constexpr double kTolGapTimesQ = 2.0;    // projected-gap bound, rigid rotation
constexpr double kTolGapTrend = 0.1;     // gap stability across solver budgets
constexpr double kGrowthTarget = 10.0;   // velocity growth factor
constexpr int kGrowthBounces = 10000;

/// Collects sub-checks as value/tolerance ratios plus a compact detail string.
class Tally {
public:
    void add(const char* name, double value, double tol) {
        worst_ = std::max(worst_, value / tol);
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s=%.3g (tol %.3g)", name, value, tol);
        push(buf);
    }
    void flag(const char* name, bool ok) {
        if (!ok) worst_ = std::max(worst_, 2.0);
        push(std::string(name) + (ok ? "=ok" : "=FAIL"));
    }
    void note(const std::string& text) { push(text); }
    double worst() const { return worst_; }
    const std::string& detail() const { return detail_; }

private:
    void push(const std::string& piece) {
        if (!detail_.empty()) detail_ += "; ";
        detail_ += piece;
    }
    double worst_ = 0.0;
    std::string detail_;
};

CriterionResult finish(int id, const char* name, const Tally& tally, double tighten) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    r.measured = tally.worst();
    r.threshold = 1.0 / tighten;
    r.pass = tally.worst() <= r.threshold;
    r.detail = tally.detail();
    return r;
}

ForcingFunction canonical_forcing() {
    return ForcingFunction(0.0, {{0.0, 0.03}, {0.01, 0.0}});
}

ForcingFunction sine_forcing(double amplitude) {
    return ForcingFunction(0.0, {{0.0, amplitude}});
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// Richardson-extrapolated central differences; steps chosen so truncation and
// roundoff both sit well under the 1e-7 cross-check tolerance.
template <class F>
double fd_first(F&& f, double x, double step) {
    auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
    return (4.0 * central(step / 2) - central(step)) / 3.0;
}

template <class F>
double fd_second(F&& f, double x, double step) {
    auto second = [&](double s) { return (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s); };
    return (4.0 * second(step / 2) - second(step)) / 3.0;
}

template <class F>
double fd_mixed(F&& f, double x, double y, double step) {
    auto mixed = [&](double s) {
        return (f(x + s, y + s) - f(x + s, y - s) - f(x - s, y + s) + f(x - s, y - s)) /
               (4.0 * s * s);
    };
    return (4.0 * mixed(step / 2) - mixed(step)) / 3.0;
}

/// Parabolic line refinement with shrinking probe width; derivative-free.
double refine_1d(const std::function<double(double)>& fun, double x, double delta0) {
    double best = x;
    for (double d = delta0; d > 1e-12; d *= 0.5) {
        const double fm = fun(best - d), f0 = fun(best), fp = fun(best + d);
        const double denom = fp - 2.0 * f0 + fm;
        double step;
        if (denom > 0.0)
            step = std::clamp(-d * (fp - fm) / (2.0 * denom), -d, d);
        else
            step = (fp < fm) ? d : -d;
        if (fun(best + step) <= f0) best += step;
    }
    return best;
}

/// Dense-grid action minimum for q = 1: scan one period, then refine.
double brute_force_action_q1(const GeneratingContext& ctx, int p) {
    auto fun = [&](double t) { return h_value(ctx, t, t + p); };
    const int n = 4096;
    int besti = 0;
    double bestv = fun(0.0);
    for (int i = 1; i < n; ++i) {
        const double v = fun(static_cast<double>(i) / n);
        if (v < bestv) { bestv = v; besti = i; }
    }
    return fun(refine_1d(fun, static_cast<double>(besti) / n, 1.0 / n));
}

/// Dense-grid action minimum for q = 2: 2-D scan, then coordinate refinement.
double brute_force_action_q2(const GeneratingContext& ctx, int p) {
    const double k = ctx.cert.k;
    const double lo = k + 0.2, hi = p - k - 0.2;
    auto fun = [&](double t0, double u) {
        return h_value(ctx, t0, t0 + u) + h_value(ctx, t0 + u, t0 + p);
    };
    const int nt = 96, nu = 160;
    double bt = 0.0, bu = lo, bv = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nt; ++i) {
        const double t0 = static_cast<double>(i) / nt;
        for (int j = 0; j < nu; ++j) {
            const double u = lo + (hi - lo) * j / (nu - 1);
            const double v = fun(t0, u);
            if (v < bv) { bv = v; bt = t0; bu = u; }
        }
    }
    double delta = 2.0 * (hi - lo) / nu;
    for (int sweep = 0; sweep < 40; ++sweep) {
        bt = refine_1d([&](double t) { return fun(t, bu); }, bt, delta);
        bu = refine_1d([&](double u) { return fun(bt, u); }, bu, delta);
        delta = std::max(delta * 0.5, 1e-11);
    }
    return fun(bt, bu);
}

CriterionResult criterion_shear(double tighten) {
    Tally tally;
    const ForcingFunction f0;
    double worst_h = 0, worst_d1 = 0, worst_d = 0, worst_st = 0, worst_sw = 0, worst_map = 0;
    for (double g : {1.0, 2.0, 9.8}) {
        auto ctx = make_generating_context(g, f0);
        for (double gap : {0.5, 1.0, 5.0}) {
            const double t0 = 0.3, t1 = t0 + gap;
            worst_h = std::max(worst_h, rel(h_value(ctx, t0, t1), g * g * gap * gap * gap / 24.0));
            worst_d1 = std::max(worst_d1, rel(h_partials(ctx, t0, t1).d1, -g * g * gap * gap / 8.0));
            worst_d = std::max(worst_d, rel(cross_derivative(ctx, t0, t1), -g * g * gap / 4.0));
            // event-driven bounce covers S below the map's velocity threshold
            const double w = g * gap / 2.0;
            auto window = simulate_continuous(g, f0, ImpactState(t0, w), 1);
            worst_st = std::max(worst_st, std::abs(window[1].t() - t1) / gap);
            worst_sw = std::max(worst_sw, std::abs(window[1].w() - w) / w);
        }
        // the fixed-point map itself, on its admissible domain
        const double gap = 5.0, w = g * gap / 2.0;
        auto s1 = map_forward(g, f0, ImpactState(0.3, w));
        worst_map = std::max({worst_map, std::abs(s1.t() - (0.3 + gap)) / gap,
                              std::abs(s1.w() - w) / w});
    }
    tally.add("h", worst_h, kTolShear);
    tally.add("dh_dt0", worst_d1, kTolShear);
    tally.add("cross", worst_d, kTolShear);
    tally.add("bounce_time", worst_st, kTolShear);
    tally.add("bounce_velocity", worst_sw, kTolShear);
    tally.add("map", worst_map, kTolShear);
    return finish(1, "shear_exactness", tally, tighten);
}

CriterionResult criterion_generating_relation(double tighten) {
    Tally tally;
    const double g = 1.0;
    auto ctx = make_generating_context(g, canonical_forcing());
    std::mt19937_64 rng(20260819ULL);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst_rel = 0.0, worst_fd = 0.0;
    std::vector<std::pair<double, double>> fd_pairs;
    for (int i = 0; i < 100; ++i) {
        const double t0 = u01(rng), w0 = 5.0 + 15.0 * u01(rng);
        const ImpactState s0(t0, w0);
        const ImpactState s1 = map_forward(g, ctx.f, s0);
        const auto p = h_partials(ctx, s0.t(), s1.t());
        worst_rel = std::max({worst_rel, std::abs(p.d1 + s0.E()) / s0.E(),
                              std::abs(p.d2 - s1.E()) / s1.E()});
        if (i < 10) fd_pairs.emplace_back(s0.t(), s1.t());
    }
    tally.add("partials_vs_energies", worst_rel, kTolGenRel);

    for (auto [t0, t1] : fd_pairs) {
        const auto p = h_partials(ctx, t0, t1);
        const auto s = h_second_partials(ctx, t0, t1);
        const double d = cross_derivative(ctx, t0, t1);
        auto h2 = [&](double a, double b) { return h_value(ctx, a, b); };
        const double e1 = rel(fd_first([&](double x) { return h2(x, t1); }, t0, 1e-3), p.d1);
        const double e2 = rel(fd_first([&](double x) { return h2(t0, x); }, t1, 1e-3), p.d2);
        // Second-derivative stencils act on the forcing part only: h itself
        // reaches ~3e3 on this state distribution, and its rounding noise
        // through a /step² stencil would bury the check. The forcing-free
        // cubic is restored through its exact second derivatives, which a
        // central stencil reproduces identically anyway.
        auto hf = [&](double a, double b) { return h_forcing_part(ctx, a, b); };
        const double cubic2 = g * g * (t1 - t0) / 4.0;
        const double e11 = std::abs(cubic2 + fd_second([&](double x) { return hf(x, t1); }, t0, 2e-3) -
                                    s.d11) /
                           (1.0 + std::abs(s.d11));
        const double e22 = std::abs(cubic2 + fd_second([&](double x) { return hf(t0, x); }, t1, 2e-3) -
                                    s.d22) /
                           (1.0 + std::abs(s.d22));
        const double e12 = std::abs(-cubic2 + fd_mixed(hf, t0, t1, 2e-3) - d) / (1.0 + std::abs(d));
        worst_fd = std::max({worst_fd, e1, e2, e11, e22, e12});
    }
    tally.add("fd_crosscheck", worst_fd, kTolGenFd);
    return finish(2, "generating_relation", tally, tighten);
}

CriterionResult criterion_symplecticity(double tighten) {
    Tally tally;
    const double g = 1.0;
    auto f = canonical_forcing();
    double worst = 0.0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const double t0 = static_cast<double>(i) / 10;
            const double w0 = 3.0 + 9.0 * j / 9.0;
            worst = std::max(worst, symplectic_defect(g, f, ImpactState(t0, w0)));
        }
    tally.add("det_defect", worst, kTolSymp);
    return finish(3, "symplecticity", tally, tighten);
}

CriterionResult criterion_twist_asymptote(double tighten) {
    Tally tally;
    const double g = 1.0, gap = 100.0;
    auto ctx = make_generating_context(g, canonical_forcing());
    double worst = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double t0 = static_cast<double>(i) / 11;
        worst = std::max(worst, std::abs(cross_derivative(ctx, t0, t0 + gap) / gap + g * g / 4.0));
    }
    tally.add("asymptote_dev", worst, kTolTwistFrac * g * g / 4.0);
    return finish(4, "twist_asymptote", tally, tighten);
}

CriterionResult criterion_extension(double tighten) {
    Tally tally;
    auto ext = make_extension_context(make_generating_context(1.0, canonical_forcing()));
    tally.flag("epsilon_tilde_negative", ext.c.epsilon_tilde < 0.0);
    const auto report = verify_extension(ext);
    for (const auto& check : report.checks)
        tally.add(check.name.c_str(), check.measured, check.threshold);
    return finish(5, "extension_certificate", tally, tighten);
}

CriterionResult criterion_mather(double tighten) {
    Tally tally;
    auto ext = make_extension_context(make_generating_context(2.0, canonical_forcing()));
    SolveOptions opt;
    opt.multistarts = 16;
    opt.seed = 777;
    const std::pair<int, int> cases[] = {{4, 1}, {9, 2}, {13, 3}};
    double worst_res = 0.0, worst_map = 0.0, worst_oracle = 0.0;
    bool monotone = true, bands = true;
    for (auto [p, q] : cases) {
        const auto cfg = minimize_periodic(ext, p, q, opt);
        worst_res = std::max(worst_res, cfg.el_residual);
        for (int i = 0; i + 1 < q; ++i) monotone = monotone && cfg.times[i] < cfg.times[i + 1];
        monotone = monotone && cfg.times.front() + p > cfg.times.back();
        const auto orbit = reconstruct_orbit(ext, cfg);
        bands = bands && orbit.cert.spacing_band && orbit.cert.deviation_band &&
                orbit.cert.gaps_above_k && orbit.cert.map_consistent;
        worst_map = std::max(worst_map, orbit.cert.map_defect);
        if (q == 1)
            worst_oracle = std::max(worst_oracle,
                                    std::abs(cfg.action - brute_force_action_q1(ext.base, p)) /
                                        (1.0 + std::abs(cfg.action)));
        if (q == 2)
            worst_oracle = std::max(worst_oracle,
                                    std::abs(cfg.action - brute_force_action_q2(ext.base, p)) /
                                        (1.0 + std::abs(cfg.action)));
    }
    tally.add("el_residual", worst_res, kTolElResidual);
    tally.flag("monotone", monotone);
    tally.flag("bands", bands);
    tally.add("map_defect", worst_map, kTolMapDefect);
    tally.add("action_vs_bruteforce", worst_oracle, kTolOracle);
    return finish(6, "mather_orbits", tally, tighten);
}

CriterionResult criterion_continuous_agreement(double tighten) {
    // Per-step comparison along one 200-bounce trajectory: from each impact
    // state of the event-driven run, the discrete map must reproduce the next
    // impact. The dynamics is chaotic, so a trajectory-wise comparison would
    // measure amplified rounding instead of solver agreement.
    Tally tally;
    const double g = 1.0;
    auto f = canonical_forcing();
    const int n = 200;
    const auto window = simulate_continuous(g, f, ImpactState(0.137, 8.0), n);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& cur = window[static_cast<std::size_t>(i)];
        const ImpactState next = map_forward(g, f, ImpactState(cur.t(), cur.w()));
        worst = std::max(worst,
                         std::abs(next.t() - window[static_cast<std::size_t>(i) + 1].t()));
    }
    tally.add("impact_time_dev", worst, kTolImpactTimes);
    return finish(7, "continuous_discrete", tally, tighten);
}

CriterionResult criterion_heteroclinic(double tighten) {
    Tally tally;
    auto ext = make_extension_context(make_generating_context(1.0, sine_forcing(0.05)));
    SolveOptions opt;
    opt.multistarts = 16;
    opt.seed = 99;
    const auto crits = find_critical_configurations(ext, 5, 1, opt);
    if (crits.empty()) {
        tally.note("anchors not found: multistart located no critical configuration");
        tally.flag("anchor_pair", false);
        return finish(8, "heteroclinic", tally, tighten);
    }

    PeriodicConfiguration from = crits[0];
    PeriodicConfiguration to;
    if (crits.size() >= 2) {
        to = crits[1]; // adjacent distinct classes; nothing found between them
    } else {
        to = from; // the translate by one period is the neighboring class
        for (auto& t : to.times) t += 1.0;
        to.action = from.action;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "anchor_classes=%zu", crits.size());
    tally.note(buf);

    bool degraded = false;
    ConnectionWindow c40, c80;
    try {
        c40 = heteroclinic(ext, from, to, 40, opt);
        c80 = heteroclinic(ext, from, to, 80, opt);
    } catch (const std::exception& e) {
        degraded = true;
        tally.note(std::string("anchors not found usable: ") + e.what() +
                   "; degraded to the self-connection sanity mode");
        c40 = heteroclinic(ext, from, from, 40, opt, true);
        c80 = heteroclinic(ext, from, from, 80, opt, true);
    }
    tally.flag("anchor_pair", !degraded);
    tally.add("interior_residual", std::max(c40.interior_residual, c80.interior_residual),
              kTolInterior);
    tally.add("tail_defect",
              std::max({c40.tail_defect_from, c40.tail_defect_to, c80.tail_defect_from,
                        c80.tail_defect_to}),
              kTolTail);
    double drift = 0.0;
    for (int i = -40; i <= 40; ++i)
        drift = std::max(drift, std::abs(c40.times[static_cast<std::size_t>(i + 40)] -
                                         c80.times[static_cast<std::size_t>(i + 80)]));
    tally.add("doubling_drift", drift, kTolDoubling);
    return finish(8, "heteroclinic", tally, tighten);
}

CriterionResult criterion_cantor(double tighten) {
    Tally tally;
    const double alpha = 5.0 + (std::sqrt(5.0) - 1.0) / 2.0;
    SolveOptions opt;
    opt.multistarts = 8;
    opt.seed = 31;

    auto ext0 = make_extension_context(make_generating_context(1.0, ForcingFunction{}));
    const auto rigid = cantor_probe(ext0, alpha, 6, opt);
    double worst_gap = 0.0;
    for (const auto& row : rigid.rows)
        if (!row.skipped) worst_gap = std::max(worst_gap, row.gap_times_q);
    tally.add("rigid_gap_times_q", worst_gap, kTolGapTimesQ);

    const double amplitude = 0.15 * 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
    auto extf = make_extension_context(make_generating_context(1.0, sine_forcing(amplitude)));
    const auto forced = cantor_probe(extf, alpha, 6, opt);
    double worst_trend = 0.0;
    for (std::size_t i = 0; i < forced.rows.size(); ++i)
        if (!forced.rows[i].skipped) worst_trend = std::max(worst_trend, forced.stability[i]);
    tally.add("gap_trend_stability", worst_trend, kTolGapTrend);
    return finish(9, "cantor_probe", tally, tighten);
}

CriterionResult criterion_coexistence(double tighten) {
    Tally tally;
    SolveOptions opt;
    opt.multistarts = 12;
    opt.seed = 2026;
    const auto rep = coexistence_report(1.0, sine_forcing(0.05), opt);
    tally.flag("bounded_certified", rep.bounded_ok);
    if (!rep.bounded_note.empty()) tally.note("bounded: " + rep.bounded_note);
    tally.flag("acceleration_found", rep.accelerating_ok);
    double growth = 0.0;
    int bounces = 0;
    bool monotone = false;
    if (rep.accelerating.best_index >= 0) {
        const auto& best =
            rep.accelerating.candidates[static_cast<std::size_t>(rep.accelerating.best_index)];
        growth = best.growth;
        bounces = best.bounces;
        monotone = best.monotone;
    }
    tally.add("target_over_growth", growth > 0.0 ? kGrowthTarget / growth : 2.0, 1.0);
    tally.flag("monotone_growth", monotone);
    tally.flag("within_bounce_budget", bounces > 0 && bounces <= kGrowthBounces);
    return finish(10, "coexistence", tally, tighten);
}

} // namespace

std::vector<CriterionResult> run_acceptance_suite(double tighten) {
    struct Entry {
        int id;
        const char* name;
        CriterionResult (*fn)(double);
    };
    const Entry entries[] = {
        {1, "shear_exactness", criterion_shear},
        {2, "generating_relation", criterion_generating_relation},
        {3, "symplecticity", criterion_symplecticity},
        {4, "twist_asymptote", criterion_twist_asymptote},
        {5, "extension_certificate", criterion_extension},
        {6, "mather_orbits", criterion_mather},
        {7, "continuous_discrete", criterion_continuous_agreement},
        {8, "heteroclinic", criterion_heteroclinic},
        {9, "cantor_probe", criterion_cantor},
        {10, "coexistence", criterion_coexistence},
    };
    std::vector<CriterionResult> results;
    for (const auto& entry : entries) {
        try {
            results.push_back(entry.fn(tighten));
        } catch (const std::exception& e) {
            CriterionResult r;
            r.id = entry.id;
            r.name = entry.name;
            r.pass = false;
            r.measured = std::numeric_limits<double>::infinity();
            r.threshold = 1.0 / tighten;
            r.detail = std::string("exception: ") + e.what();
            results.push_back(std::move(r));
        }
    }
    return results;
}

bool all_pass(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CriterionResult& r) { return r.pass; });
}

std::string format_criterion_line(const CriterionResult& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "[%s] %2d %-22s worst %.3e of allowed %.3e",
                  r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.measured, r.threshold);
    return buf;
}

double periodicity_defect(const std::function<double(double)>& fun, int samples) {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        worst = std::max(worst, std::abs(fun(t + 1.0) - fun(t)));
    }
    return worst;
}

} // namespace bounce
