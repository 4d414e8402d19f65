#include "bounce/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bounce/extension.hpp"
#include "bounce/genfun.hpp"

namespace bounce {

namespace {

constexpr int kPilotBounces = 256;
constexpr int kPhaseGrid = 64;
constexpr int kOffsetGrid = 8;

struct RunStats {
    std::vector<double> w;
    int bounces = 0;
    double growth = 0.0;
    bool monotone = true;
    bool domain_stop = false;
};

/// Iterate the impact map from (t0, w0). Track the best increasing span
/// (max over n of w_n / min-prefix) and monotonicity. Stops early when the
/// growth target is reached or monotonicity is lost beyond slack.
RunStats run_launch(double g, const ForcingFunction& f, double t0, double w0,
                    int max_bounces, double target, bool stop_on_nonmonotone) {
    RunStats rs;
    rs.w.push_back(w0);
    double run_min = w0;
    double t_frac = t0 - std::floor(t0); // integer offsets are symmetry shifts
    double w = w0;
    for (int n = 0; n < max_bounces; ++n) {
        ImpactState next{0.0, 1.0};
        try {
            next = map_forward(g, f, ImpactState(t_frac, w));
        } catch (const std::exception&) {
            rs.domain_stop = true;
            break;
        }
        const double wn = next.w();
        if (wn < w * (1.0 - 1e-12)) {
            rs.monotone = false;
            if (stop_on_nonmonotone) {
                rs.w.push_back(wn);
                ++rs.bounces;
                break;
            }
        }
        w = wn;
        t_frac = next.t() - std::floor(next.t());
        rs.w.push_back(w);
        ++rs.bounces;
        run_min = std::min(run_min, w);
        rs.growth = std::max(rs.growth, w / run_min);
        if (rs.growth >= target) break;
    }
    return rs;
}

/// Roots of f'(t) = c on [0, 1): scan plus bisection.
std::vector<double> derivative_level_roots(const ForcingFunction& f, double c) {
    std::vector<double> roots;
    const int n = 4096;
    double prev_t = 0.0;
    double prev_v = f.eval_derivative(1, 0.0) - c;
    for (int i = 1; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        const double v = f.eval_derivative(1, t) - c;
        if (prev_v == 0.0) roots.push_back(prev_t);
        if (prev_v * v < 0.0) {
            double a = prev_t, b = t, va = prev_v;
            for (int k = 0; k < 80; ++k) {
                const double m = 0.5 * (a + b);
                const double vm = f.eval_derivative(1, m) - c;
                if ((vm < 0.0) == (va < 0.0)) {
                    a = m;
                    va = vm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_t = t;
        prev_v = v;
    }
    return roots;
}

} // namespace

std::vector<double> replay_candidate(double g, const ForcingFunction& f, double t0,
                                     double w0, int max_bounces, double growth_target) {
    return run_launch(g, f, t0, w0, max_bounces, growth_target, false).w;
}

AccelerationReport accelerate_search(double g, const ForcingFunction& f,
                                     int max_candidates, int max_bounces,
                                     double growth_target) {
    if (!(g > 0.0)) throw std::invalid_argument("accelerate_search: g must be positive");
    if (max_candidates < 1 || max_bounces < 1)
        throw std::invalid_argument("accelerate_search: budgets must be positive");

    AccelerationReport report;
    report.growth_target = growth_target;
    report.threshold_velocity = velocity_threshold(g, f);
    const double b1 = f.sup_bound(1);

    if (!(b1 >= 0.25 * g)) {
        report.note = "no candidate phases: sup|f'| = " + std::to_string(b1) +
                      " is below the resonance scale g/4 = " + std::to_string(0.25 * g) +
                      "; no accelerating orbit found (existence not excluded)";
        return report;
    }

    // launch seeds: (phase, velocity, level); velocity chosen so the first
    // flight time is near an integer L plus a fractional offset
    struct Seed {
        double t0, w0;
        int level;
    };
    std::vector<Seed> seeds;
    const double wbar = report.threshold_velocity;
    // lowest flight level whose launch velocity can clear the threshold, and a
    // padded ceiling; lower levels maximize relative growth per bounce
    const int l_low = std::max(1, static_cast<int>(std::floor(2.0 * wbar / g)));
    const int l_min = static_cast<int>(std::ceil((2.0 * (wbar + b1)) / g)) + 1;

    const auto push_seed = [&](double phase, double frac_offset, int level, int L) {
        const double fd = f.eval_derivative(1, phase);
        const double w0 = 0.5 * g * (L + frac_offset) - fd;
        if (w0 > wbar) seeds.push_back({phase, w0, level});
    };

    // phase-locked seeds. The lock is unstable, so its lifetime is set by the
    // rounding of the seed phase; one-ulp jitter hedges that rounding.
    for (int m = 1; m * 0.25 * g <= b1; ++m)
        for (double root : derivative_level_roots(f, m * 0.25 * g))
            for (int L = l_low; L <= l_min + 1; ++L)
                for (int j = -2; j <= 2; ++j) {
                    double phase = root;
                    for (int s = 0; s < std::abs(j); ++s)
                        phase = std::nextafter(phase, j > 0 ? 2.0 : -1.0);
                    push_seed(phase, 0.0, m, L);
                }

    for (int i = 0; i < kPhaseGrid; ++i)
        for (int j = 0; j < kOffsetGrid; ++j)
            for (int L = l_low; L <= l_min; L += std::max(1, l_min - l_low))
                push_seed(static_cast<double>(i) / kPhaseGrid,
                          static_cast<double>(j) / kOffsetGrid, 0, L);

    // pilot pass: short runs, rank by growth
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const RunStats rs = run_launch(g, f, seeds[i].t0, seeds[i].w0,
                                       std::min(kPilotBounces, max_bounces), growth_target,
                                       true);
        const double score = rs.monotone ? rs.growth : rs.growth * 0.1;
        ranked.emplace_back(-score, i);
    }
    std::sort(ranked.begin(), ranked.end());

    const int n_full = std::min<int>(max_candidates, static_cast<int>(ranked.size()));
    double best_score = -1.0;
    for (int r = 0; r < n_full; ++r) {
        const Seed& seed = seeds[ranked[r].second];
        const RunStats rs =
            run_launch(g, f, seed.t0, seed.w0, max_bounces, growth_target, true);
        AccelerationCandidate cand;
        cand.t0 = seed.t0;
        cand.w0 = seed.w0;
        cand.level = seed.level;
        cand.bounces = rs.bounces;
        cand.w_final = rs.w.back();
        cand.growth = rs.growth;
        cand.monotone = rs.monotone;
        cand.domain_stop = rs.domain_stop;
        report.candidates.push_back(cand);
        const double score = (rs.monotone ? 1.0 : 0.1) * rs.growth;
        if (score > best_score) {
            best_score = score;
            report.best_index = static_cast<int>(report.candidates.size()) - 1;
            report.best_velocities = rs.w;
        }
        if (rs.monotone && rs.growth >= growth_target) {
            report.found = true;
            break;
        }
    }

    if (report.found) {
        const AccelerationCandidate& b = report.candidates[report.best_index];
        report.note = "accelerating orbit found: velocity grew from " +
                      std::to_string(b.w0) + " to " + std::to_string(b.w_final) + " over " +
                      std::to_string(b.bounces) + " bounces (monotone)";
    } else {
        report.note = "no accelerating orbit found within the budget; "
                      "existence is not excluded";
    }
    return report;
}

CoexistenceReport coexistence_report(double g, const ForcingFunction& f,
                                     const SolveOptions& opt) {
    CoexistenceReport report;
    try {
        const GeneratingContext gc = make_generating_context(g, f);
        const ExtensionContext xc = make_extension_context(gc);
        const int p = static_cast<int>(std::ceil(xc.c.k + 3.0));
        report.bounded_p = p;
        const PeriodicConfiguration cfg = minimize_periodic(xc, p, 1, opt);
        report.bounded = reconstruct_orbit(xc, cfg);
        const OrbitCertificates& c = report.bounded.cert;
        report.bounded_ok = c.spacing_band && c.deviation_band && c.gaps_above_k &&
                            c.map_consistent;
        report.bounded_note =
            report.bounded_ok
                ? "certified periodic minimizer at rotation number " + std::to_string(p)
                : "minimizer found but certification failed";
    } catch (const std::exception& e) {
        report.bounded_ok = false;
        report.bounded_note = std::string("bounded side failed: ") + e.what();
    }
    report.accelerating = accelerate_search(g, f);
    report.accelerating_ok = report.accelerating.found;
    return report;
}

} // namespace bounce
