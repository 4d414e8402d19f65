#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bounce/dynamics.hpp"
#include "bounce/errors.hpp"
#include "bounce/experiments.hpp"
#include "bounce/extension.hpp"
#include "bounce/genfun.hpp"
#include "bounce/io.hpp"
#include "bounce/mather.hpp"
#include "bounce/validation.hpp"

namespace {

using namespace bounce;

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitValidation = 2;

/// Options shared by every command. Explicit flags override the config file.
struct CommonOpts {
    std::string config_path;
    RunConfig cli;
    std::vector<std::string> harmonic_args;
    std::string ratio_text;

    CLI::Option* o_g = nullptr;
    CLI::Option* o_mean = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_ratio = nullptr;
    CLI::Option* o_window = nullptr;
    CLI::Option* o_depth = nullptr;
    CLI::Option* o_multi = nullptr;
    CLI::Option* o_bounces = nullptr;
    CLI::Option* o_accel = nullptr;
    CLI::Option* o_t0 = nullptr;
    CLI::Option* o_w0 = nullptr;
    CLI::Option* o_alpha = nullptr;
    CLI::Option* o_tol_root = nullptr;
    CLI::Option* o_tol_quad = nullptr;
    CLI::Option* o_tol_el = nullptr;
    CLI::Option* o_out = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "flat key-value config file");
        o_g = cmd->add_option("-g,--gravity", cli.g, "gravitational acceleration (> 0)");
        o_mean = cmd->add_option("--mean-offset", cli.mean_offset,
                                 "constant term of the racket motion");
        cmd->add_option("--harmonic", harmonic_args,
                        "forcing term j:a:b meaning a cos(2 pi j t) + b sin(2 pi j t); repeatable")
            ->type_name("J:A:B");
        o_seed = cmd->add_option("--seed", cli.seed, "seed for every randomized start");
        o_ratio = cmd->add_option("--ratio", ratio_text, "rotation number p/q in lowest terms");
        o_window = cmd->add_option("--window", cli.window, "connection half-window N");
        o_depth = cmd->add_option("--depth", cli.depth, "continued-fraction depth");
        o_multi = cmd->add_option("--multistarts", cli.multistarts, "solver starts per ratio");
        o_bounces = cmd->add_option("--bounces", cli.bounces, "impacts for orbit runs");
        o_accel = cmd->add_option("--accel-bounces", cli.accel_bounces,
                                  "impact budget for the acceleration search");
        o_t0 = cmd->add_option("--t0", cli.t0, "launch impact time");
        o_w0 = cmd->add_option("--w0", cli.w0, "launch velocity (> 0)");
        o_alpha = cmd->add_option("--alpha", cli.alpha, "target rotation number for the probe");
        o_tol_root = cmd->add_option("--tol-root", cli.tol_root, "impact-map root tolerance");
        o_tol_quad = cmd->add_option("--tol-quad", cli.tol_quad, "extension quadrature tolerance");
        o_tol_el = cmd->add_option("--tol-el", cli.tol_el, "stationarity tolerance");
        o_out = cmd->add_option("-o,--out", cli.out_dir, "output directory");
    }

    RunConfig merge() const {
        RunConfig cfg = config_path.empty() ? RunConfig{} : parse_config_file(config_path);
        if (o_g->count()) cfg.g = cli.g;
        if (o_mean->count()) cfg.mean_offset = cli.mean_offset;
        if (o_seed->count()) cfg.seed = cli.seed;
        if (o_window->count()) cfg.window = cli.window;
        if (o_depth->count()) cfg.depth = cli.depth;
        if (o_multi->count()) cfg.multistarts = cli.multistarts;
        if (o_bounces->count()) cfg.bounces = cli.bounces;
        if (o_accel->count()) cfg.accel_bounces = cli.accel_bounces;
        if (o_t0->count()) cfg.t0 = cli.t0;
        if (o_w0->count()) cfg.w0 = cli.w0;
        if (o_alpha->count()) cfg.alpha = cli.alpha;
        if (o_tol_root->count()) cfg.tol_root = cli.tol_root;
        if (o_tol_quad->count()) cfg.tol_quad = cli.tol_quad;
        if (o_tol_el->count()) cfg.tol_el = cli.tol_el;
        if (o_out->count()) cfg.out_dir = cli.out_dir;
        if (!harmonic_args.empty()) {
            cfg.harmonics.clear();
            for (const auto& arg : harmonic_args) {
                const auto c1 = arg.find(':');
                const auto c2 = arg.find(':', c1 == std::string::npos ? c1 : c1 + 1);
                if (c1 == std::string::npos || c2 == std::string::npos)
                    throw std::invalid_argument("--harmonic expects j:a:b, got \"" + arg + "\"");
                const int j = std::stoi(arg.substr(0, c1));
                if (j < 1 || j > 64)
                    throw std::invalid_argument("--harmonic index must lie in 1..64");
                if (cfg.harmonics.size() < static_cast<std::size_t>(j))
                    cfg.harmonics.resize(static_cast<std::size_t>(j));
                cfg.harmonics[static_cast<std::size_t>(j) - 1] = {
                    std::stod(arg.substr(c1 + 1, c2 - c1 - 1)), std::stod(arg.substr(c2 + 1))};
            }
        }
        if (o_ratio->count()) {
            const auto slash = ratio_text.find('/');
            if (slash == std::string::npos)
                throw std::invalid_argument("--ratio expects p/q, got \"" + ratio_text + "\"");
            cfg.p = std::stoi(ratio_text.substr(0, slash));
            cfg.q = std::stoi(ratio_text.substr(slash + 1));
            if (cfg.q < 1) throw std::invalid_argument("--ratio denominator must be >= 1");
        }
        return cfg;
    }
};

struct Emitted {
    ordered_json results = ordered_json::object();
    ordered_json defects = ordered_json::object();
    std::vector<std::string> csv_header;
    std::vector<std::vector<double>> csv_rows;
};

class WallClock {
public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(const RunConfig& cfg, const std::string& command, const Emitted& out,
          const WallClock& clock) {
    const std::string base = cfg.out_dir + "/" + command;
    if (!out.csv_header.empty())
        write_text_file(base + ".csv", csv_text(out.csv_header, out.csv_rows));
    write_text_file(base + "_manifest.json",
                    make_manifest(cfg, out.results, out.defects, clock.ms()).dump(2) + "\n");
    std::printf("wrote %s_manifest.json\n", base.c_str());
}

SolveOptions solve_options(const RunConfig& cfg) {
    SolveOptions opt;
    opt.multistarts = cfg.multistarts;
    opt.seed = cfg.seed;
    opt.el_tol = cfg.tol_el;
    return opt;
}

int do_orbit(const RunConfig& cfg) {
    WallClock clock;
    const auto f = make_forcing(cfg);
    Emitted out;
    out.csv_header = {"n", "t_n", "w_n", "E_n"};
    ImpactState s(cfg.t0, cfg.w0);
    double w_min = s.w(), w_max = s.w();
    out.csv_rows.push_back({0.0, s.t(), s.w(), s.E()});
    int rc = kExitOk;
    for (int n = 1; n <= cfg.bounces; ++n) {
        try {
            s = map_forward(cfg.g, f, s, cfg.tol_root);
        } catch (const std::exception& e) {
            out.defects["map_error"] = e.what();
            std::fprintf(stderr, "orbit stopped at bounce %d: %s\n", n, e.what());
            rc = kExitSolver;
            break;
        }
        w_min = std::min(w_min, s.w());
        w_max = std::max(w_max, s.w());
        out.csv_rows.push_back({static_cast<double>(n), s.t(), s.w(), s.E()});
    }
    out.results = {{"bounces_completed", static_cast<int>(out.csv_rows.size()) - 1},
                   {"t_final", s.t()},
                   {"w_final", s.w()},
                   {"w_min", w_min},
                   {"w_max", w_max},
                   {"threshold_velocity", velocity_threshold(cfg.g, f)}};
    emit(cfg, "orbit", out, clock);
    return rc;
}

int do_genfun(const RunConfig& cfg) {
    WallClock clock;
    const auto ctx = make_generating_context(cfg.g, make_forcing(cfg));
    Emitted out;
    out.csv_header = {"t0", "t1", "h", "dh_dt0", "dh_dt1", "cross"};
    const double k = ctx.cert.k;
    for (int i = 0; i < 17; ++i)
        for (int j = 0; j < 9; ++j) {
            const double t0 = static_cast<double>(i) / 17;
            const double t1 = t0 + k + 4.0 * j / 8.0;
            const auto p = h_partials(ctx, t0, t1);
            out.csv_rows.push_back({t0, t1, h_value(ctx, t0, t1), p.d1, p.d2,
                                    cross_derivative(ctx, t0, t1)});
        }
    // audit the partials against map energies on a random admissible sample
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double w_floor = velocity_threshold(cfg.g, ctx.f) * 1.5;
    double worst = 0.0;
    for (int i = 0; i < 32; ++i) {
        const ImpactState s0(u01(rng), w_floor + 10.0 * u01(rng));
        const ImpactState s1 = map_forward(cfg.g, ctx.f, s0, cfg.tol_root);
        const auto p = h_partials(ctx, s0.t(), s1.t());
        worst = std::max({worst, std::abs(p.d1 + s0.E()) / s0.E(),
                          std::abs(p.d2 - s1.E()) / s1.E()});
    }
    out.results = {{"k", k},
                   {"epsilon", ctx.cert.epsilon},
                   {"grid_points", static_cast<int>(out.csv_rows.size())}};
    out.defects = {{"generating_relation_rel", worst}};
    emit(cfg, "genfun", out, clock);
    return kExitOk;
}

int do_extend(const RunConfig& cfg) {
    WallClock clock;
    const auto ext = make_extension_context(make_generating_context(cfg.g, make_forcing(cfg)),
                                            cfg.tol_quad);
    const auto report = verify_extension(ext);
    Emitted out;
    out.csv_header = {"t0", "phi", "psi", "phi_prime"};
    for (int i = 0; i <= 32; ++i) {
        const double t0 = static_cast<double>(i) / 32;
        const auto b = boundary_data(ext, t0);
        out.csv_rows.push_back({t0, b.phi, b.psi, b.phi_prime});
    }
    ordered_json checks = ordered_json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"name", c.name},
                          {"measured", c.measured},
                          {"threshold", c.threshold},
                          {"pass", c.pass}});
        if (!c.pass) out.defects[c.name] = c.measured;
    }
    out.results = {{"k", ext.c.k},
                   {"epsilon", ext.c.epsilon},
                   {"epsilon_tilde", ext.c.epsilon_tilde},
                   {"A", ext.c.A},
                   {"C", ext.c.C},
                   {"I", ext.c.I},
                   {"H", ext.c.H},
                   {"checks", checks},
                   {"all_pass", report.all_pass}};
    emit(cfg, "extend", out, clock);
    if (!report.all_pass) {
        std::fprintf(stderr, "extension verification failed\n");
        return kExitValidation;
    }
    return kExitOk;
}

int do_mather(const RunConfig& cfg) {
    WallClock clock;
    const auto ext = make_extension_context(make_generating_context(cfg.g, make_forcing(cfg)),
                                            cfg.tol_quad);
    const auto opt = solve_options(cfg);
    const auto config = minimize_periodic(ext, cfg.p, cfg.q, opt);
    const auto orbit = reconstruct_orbit(ext, config);
    Emitted out;
    out.csv_header = {"i", "t_i", "gap_i", "E_i"};
    for (int i = 0; i < cfg.q; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        out.csv_rows.push_back({static_cast<double>(i), orbit.window[idx].t(),
                                orbit.window[idx + 1].t() - orbit.window[idx].t(),
                                orbit.window[idx].E()});
    }
    out.results = {{"p", cfg.p},
                   {"q", cfg.q},
                   {"alpha", orbit.alpha},
                   {"action", config.action},
                   {"el_residual", config.el_residual},
                   {"deviation_band", orbit.cert.deviation_band},
                   {"spacing_band", orbit.cert.spacing_band},
                   {"gaps_above_k", orbit.cert.gaps_above_k},
                   {"s_orbit_defect", orbit.cert.map_defect}};
    out.defects = {{"el_residual", config.el_residual},
                   {"s_orbit_defect", orbit.cert.map_defect}};
    emit(cfg, "mather", out, clock);
    const bool certified = orbit.cert.deviation_band && orbit.cert.spacing_band &&
                           orbit.cert.gaps_above_k && orbit.cert.map_consistent;
    if (!certified) {
        std::fprintf(stderr, "minimizer found but certification failed\n");
        return kExitValidation;
    }
    return kExitOk;
}

int do_hetero(const RunConfig& cfg) {
    WallClock clock;
    const auto ext = make_extension_context(make_generating_context(cfg.g, make_forcing(cfg)),
                                            cfg.tol_quad);
    const auto opt = solve_options(cfg);
    const auto crits = find_critical_configurations(ext, cfg.p, cfg.q, opt);
    Emitted out;
    if (crits.empty()) {
        out.results = {{"anchor_classes", 0}};
        out.defects = {{"anchors", "not found: multistart located no critical configuration"}};
        emit(cfg, "hetero", out, clock);
        std::fprintf(stderr, "anchors not found\n");
        return kExitSolver;
    }
    PeriodicConfiguration from = crits[0];
    PeriodicConfiguration to;
    if (crits.size() >= 2) {
        to = crits[1];
    } else {
        to = from;
        for (auto& t : to.times) t += 1.0;
    }
    bool degraded = false;
    std::string degraded_why;
    ConnectionWindow conn;
    try {
        conn = heteroclinic(ext, from, to, cfg.window, opt);
    } catch (const std::exception& e) {
        degraded = true;
        degraded_why = e.what();
        conn = heteroclinic(ext, from, from, cfg.window, opt, true);
    }
    out.csv_header = {"i", "t_i"};
    for (int i = -conn.N; i <= conn.N; ++i)
        out.csv_rows.push_back(
            {static_cast<double>(i), conn.times[static_cast<std::size_t>(i + conn.N)]});
    out.results = {{"N", conn.N},
                   {"anchor_classes", crits.size()},
                   {"degraded_to_self_connection", degraded},
                   {"interior_residual", conn.interior_residual},
                   {"tail_defect_from", conn.tail_defect_from},
                   {"tail_defect_to", conn.tail_defect_to},
                   {"from_times", conn.from.times},
                   {"to_times", conn.to.times}};
    if (degraded) {
        out.defects["anchors"] = "pair not usable (" + degraded_why + "); ran self-connection";
        std::fprintf(stderr, "anchors not found usable: %s\n", degraded_why.c_str());
    }
    emit(cfg, "hetero", out, clock);
    return kExitOk;
}

int do_cantor(const RunConfig& cfg) {
    WallClock clock;
    const auto ext = make_extension_context(make_generating_context(cfg.g, make_forcing(cfg)),
                                            cfg.tol_quad);
    const auto probe = cantor_probe(ext, cfg.alpha, cfg.depth, solve_options(cfg));
    Emitted out;
    out.csv_header = {"level", "p", "q", "max_gap", "gap_times_q", "stability", "skipped"};
    for (std::size_t i = 0; i < probe.rows.size(); ++i) {
        const auto& row = probe.rows[i];
        out.csv_rows.push_back({static_cast<double>(row.level), static_cast<double>(row.p),
                                static_cast<double>(row.q), row.max_gap, row.gap_times_q,
                                probe.stability[i], row.skipped ? 1.0 : 0.0});
    }
    out.results = {{"alpha", probe.alpha},
                   {"alpha_star", probe.alpha_star},
                   {"levels", static_cast<int>(probe.rows.size())}};
    emit(cfg, "cantor", out, clock);
    return kExitOk;
}

int do_accelerate(const RunConfig& cfg) {
    WallClock clock;
    const auto f = make_forcing(cfg);
    const auto rep = accelerate_search(cfg.g, f, 24, cfg.accel_bounces);
    Emitted out;
    out.csv_header = {"n", "w_n"};
    for (std::size_t n = 0; n < rep.best_velocities.size(); ++n)
        out.csv_rows.push_back({static_cast<double>(n), rep.best_velocities[n]});
    ordered_json best = ordered_json::object();
    if (rep.best_index >= 0) {
        const auto& b = rep.candidates[static_cast<std::size_t>(rep.best_index)];
        best = {{"t0", b.t0},         {"w0", b.w0},           {"level", b.level},
                {"bounces", b.bounces}, {"w_final", b.w_final}, {"growth", b.growth},
                {"monotone", b.monotone}};
    }
    out.results = {{"found", rep.found},
                   {"note", rep.note},
                   {"threshold_velocity", rep.threshold_velocity},
                   {"growth_target", rep.growth_target},
                   {"candidates_tried", static_cast<int>(rep.candidates.size())},
                   {"best", best}};
    emit(cfg, "accelerate", out, clock);
    std::printf("%s\n", rep.note.c_str());
    return kExitOk;
}

int do_coexist(const RunConfig& cfg) {
    WallClock clock;
    const auto f = make_forcing(cfg);
    const auto rep = coexistence_report(cfg.g, f, solve_options(cfg));
    Emitted out;
    out.csv_header = {"n", "w_n"};
    for (std::size_t n = 0; n < rep.accelerating.best_velocities.size(); ++n)
        out.csv_rows.push_back({static_cast<double>(n), rep.accelerating.best_velocities[n]});
    ordered_json bounded = {{"ok", rep.bounded_ok},
                            {"note", rep.bounded_note},
                            {"p", rep.bounded_p}};
    if (rep.bounded_ok) {
        bounded["action"] = rep.bounded.config.action;
        bounded["el_residual"] = rep.bounded.config.el_residual;
        bounded["s_orbit_defect"] = rep.bounded.cert.map_defect;
    }
    ordered_json accel = {{"ok", rep.accelerating_ok}, {"note", rep.accelerating.note}};
    if (rep.accelerating.best_index >= 0) {
        const auto& b =
            rep.accelerating.candidates[static_cast<std::size_t>(rep.accelerating.best_index)];
        accel["growth"] = b.growth;
        accel["bounces"] = b.bounces;
        accel["t0"] = b.t0;
        accel["w0"] = b.w0;
    }
    out.results = {{"bounded", bounded}, {"accelerating", accel}};
    if (!rep.bounded_ok) out.defects["bounded"] = rep.bounded_note;
    if (!rep.accelerating_ok) out.defects["accelerating"] = rep.accelerating.note;
    emit(cfg, "coexist", out, clock);
    if (!(rep.bounded_ok && rep.accelerating_ok)) {
        std::fprintf(stderr, "coexistence not demonstrated for this forcing\n");
        return kExitValidation;
    }
    return kExitOk;
}

int do_validate(const RunConfig& cfg, double tighten) {
    WallClock clock;
    const auto results = run_acceptance_suite(tighten);
    Emitted out;
    out.csv_header = {"id", "pass", "measured", "threshold"};
    ordered_json rows = ordered_json::array();
    for (const auto& r : results) {
        std::printf("%s\n", format_criterion_line(r).c_str());
        out.csv_rows.push_back({static_cast<double>(r.id), r.pass ? 1.0 : 0.0, r.measured,
                                r.threshold});
        rows.push_back({{"id", r.id},
                        {"name", r.name},
                        {"pass", r.pass},
                        {"measured", r.measured},
                        {"threshold", r.threshold},
                        {"detail", r.detail}});
        if (!r.pass) out.defects[r.name] = r.detail;
    }
    out.results = {{"tighten", tighten}, {"criteria", rows}, {"all_pass", all_pass(results)}};
    emit(cfg, "validate", out, clock);
    return all_pass(results) ? kExitOk : kExitValidation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "bounce: a ball bouncing elastically on a vertically vibrating racket.\n"
        "The racket motion is a 1-periodic trigonometric polynomial\n"
        "  f(t) = mean + sum_j a_j cos(2 pi j t) + b_j sin(2 pi j t),\n"
        "impacts follow the exact elastic map in the racket frame, and the\n"
        "variational commands minimize the impact-time action.\n"
        "Config file grammar: one 'key value' per line, '#' comments; keys\n"
        "g, mean_offset, harmonic <j> <a> <b>, seed, tol_root, tol_quad,\n"
        "tol_el, ratio <p>/<q>, window, depth, multistarts, bounces,\n"
        "accel_bounces, t0, w0, alpha, out_dir.\n"
        "Exit codes: 0 success, 1 solver error, 2 validation failure."};
    app.require_subcommand(1);
    int rc = kExitOk;

    CommonOpts o_orbit, o_genfun, o_extend, o_mather, o_hetero, o_cantor, o_accel, o_coexist,
        o_validate;
    double tighten = 1.0;

    auto* c_orbit = app.add_subcommand(
        "orbit", "iterate the impact map from (t0, w0); CSV: n,t_n,w_n,E_n");
    o_orbit.attach(c_orbit);
    c_orbit->callback([&] { rc = do_orbit(o_orbit.merge()); });

    auto* c_genfun = app.add_subcommand(
        "genfun", "tabulate the generating function and audit its partials; "
                  "CSV: t0,t1,h,dh_dt0,dh_dt1,cross");
    o_genfun.attach(c_genfun);
    c_genfun->callback([&] { rc = do_genfun(o_genfun.merge()); });

    auto* c_extend = app.add_subcommand(
        "extend", "build the below-threshold extension and verify it; "
                  "CSV: t0,phi,psi,phi_prime (seam Cauchy data)");
    o_extend.attach(c_extend);
    c_extend->callback([&] { rc = do_extend(o_extend.merge()); });

    auto* c_mather = app.add_subcommand(
        "mather", "minimize the periodic action at rotation number p/q; CSV: i,t_i,gap_i,E_i");
    o_mather.attach(c_mather);
    c_mather->callback([&] { rc = do_mather(o_mather.merge()); });

    auto* c_hetero = app.add_subcommand(
        "hetero", "connect two neighboring periodic minimizers on a clamped window; CSV: i,t_i");
    o_hetero.attach(c_hetero);
    c_hetero->callback([&] { rc = do_hetero(o_hetero.merge()); });

    auto* c_cantor = app.add_subcommand(
        "cantor", "probe an irrational rotation number along convergents; "
                  "CSV: level,p,q,max_gap,gap_times_q,stability,skipped");
    o_cantor.attach(c_cantor);
    c_cantor->callback([&] { rc = do_cantor(o_cantor.merge()); });

    auto* c_accel = app.add_subcommand(
        "accelerate", "search for velocity-growing orbits; CSV: n,w_n of the best candidate");
    o_accel.attach(c_accel);
    c_accel->callback([&] { rc = do_accelerate(o_accel.merge()); });

    auto* c_coexist = app.add_subcommand(
        "coexist", "bounded minimizer plus acceleration search for one forcing; CSV: n,w_n");
    o_coexist.attach(c_coexist);
    c_coexist->callback([&] { rc = do_coexist(o_coexist.merge()); });

    auto* c_validate = app.add_subcommand(
        "validate", "run the full acceptance suite; CSV: id,pass,measured,threshold");
    o_validate.attach(c_validate);
    c_validate->add_option("--tighten", tighten,
                           "divide every numeric tolerance by this factor (margin study)");
    c_validate->callback([&] { rc = do_validate(o_validate.merge(), tighten); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSolver;
    }
    return rc;
}
