#include "bounce/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "quadrature.hpp"

namespace bounce {

namespace {

constexpr int kSweepTimeSamples = 41;
constexpr int kSweepGapSamples = 81;
constexpr double kSweepGapBelow = 2.0; // sweep gaps down to -2
constexpr double kSweepGapAbove = 2.0; // and up to k+2
constexpr double kSafetyInflation = 1.5;

double d2_extended(const ExtensionContext& ctx, double t0, double t1) {
    const BoundaryData bd = boundary_data(ctx, t1 - ctx.c.k);
    const double seam_d2 = 0.5 * (bd.phi_prime + bd.psi);
    const double integral = detail::gauss_adaptive(
        [&](double s) { return extended_cross(ctx, s, t1); }, t1 - ctx.c.k, t0,
        ctx.c.base_nodes_per_unit, ctx.c.quad_tol);
    return seam_d2 + integral;
}

double d1_extended(const ExtensionContext& ctx, double t0, double t1) {
    const BoundaryData bd = boundary_data(ctx, t0);
    const double seam_d1 = 0.5 * (bd.phi_prime - bd.psi);
    const double integral = detail::gauss_adaptive(
        [&](double s) { return extended_cross(ctx, t0, s); }, t0 + ctx.c.k, t1,
        ctx.c.base_nodes_per_unit, ctx.c.quad_tol);
    return seam_d1 + integral;
}

} // namespace

double phi_infimum(double A, double C, double x0) {
    (void)x0; // the infimum depends only on the distance to x0
    if (!(A > 0.0) || C < 0.0)
        throw std::invalid_argument("phi_infimum: need A > 0 and C >= 0");
    if (C == 0.0) return 0.0;
    return -C * C / (4.0 * A);
}

ExtensionContext make_extension_context(const GeneratingContext& base, double quad_tol) {
    if (!(quad_tol > 0.0))
        throw std::invalid_argument("make_extension_context: quad_tol must be positive");
    ExtensionContext ctx{base, {}};
    ExtensionConstants& c = ctx.c;
    c.k = base.cert.k;
    c.epsilon = base.cert.epsilon;
    c.epsilon_tilde = 0.5 * base.cert.epsilon;
    c.A = c.epsilon_tilde - c.epsilon; // = |epsilon|/2 > 0
    c.quad_tol = quad_tol;

    double tdd_max = 0.5 * base.g * base.g; // the forcing-free value
    for (int i = 0; i < kSweepTimeSamples; ++i) {
        const double t0 = static_cast<double>(i) / (kSweepTimeSamples - 1);
        for (int j = 0; j < kSweepGapSamples; ++j) {
            const double gap = -kSweepGapBelow +
                               (c.k + kSweepGapAbove + kSweepGapBelow) * j /
                                   (kSweepGapSamples - 1);
            tdd_max = std::max(tdd_max,
                               std::abs(third_derivative_difference(base, t0, t0 + gap)));
        }
    }
    c.C = 0.5 * kSafetyInflation * tdd_max;
    c.I = phi_infimum(c.A, c.C, c.k);
    c.H = c.I - 1.0;
    ctx.base.cert.epsilon_tilde = c.epsilon_tilde;
    return ctx;
}

double extended_cross(const ExtensionContext& ctx, double t0, double t1) {
    const double v = (t1 - t0) - ctx.c.k;
    if (v >= 0.0) return cross_derivative(ctx.base, t0, t1);
    const double mid = 0.5 * (t0 + t1);
    const double seam_d = cross_derivative(ctx.base, mid - 0.5 * ctx.c.k, mid + 0.5 * ctx.c.k);
    const double tdd = third_derivative_difference(ctx.base, t0, t1);
    return seam_d + 0.5 * tdd * v + ctx.c.H * v * v;
}

BoundaryData boundary_data(const ExtensionContext& ctx, double t0) {
    const double t1 = t0 + ctx.c.k;
    const HPartials p = h_partials(ctx.base, t0, t1);
    BoundaryData bd;
    bd.phi = h_value(ctx.base, t0, t1);
    bd.psi = p.d2 - p.d1;
    bd.phi_prime = p.d1 + p.d2;
    return bd;
}

double extended_h(const ExtensionContext& ctx, double t0, double t1) {
    if (t1 - t0 >= ctx.c.k) return h_value(ctx.base, t0, t1);
    return wave_h(ctx, t0, t1);
}

HPartials extended_partials(const ExtensionContext& ctx, double t0, double t1) {
    if (t1 - t0 >= ctx.c.k) return h_partials(ctx.base, t0, t1);
    HPartials out;
    out.d1 = d1_extended(ctx, t0, t1);
    out.d2 = d2_extended(ctx, t0, t1);
    return out;
}

HSecondPartials extended_second_partials(const ExtensionContext& ctx, double t0, double t1) {
    if (t1 - t0 >= ctx.c.k) return h_second_partials(ctx.base, t0, t1);
    // central differences of the quadrature-built first partials
    const double step = 1e-6 * std::max(1.0, std::abs(t1 - t0));
    HSecondPartials out;
    out.d11 = (d1_extended(ctx, t0 + step, t1) - d1_extended(ctx, t0 - step, t1)) /
              (2.0 * step);
    out.d22 = (d2_extended(ctx, t0, t1 + step) - d2_extended(ctx, t0, t1 - step)) /
              (2.0 * step);
    return out;
}

double wave_h(const ExtensionContext& ctx, double t0, double t1) {
    const BoundaryData bd = boundary_data(ctx, t0);
    const double integral = detail::gauss_adaptive(
        [&](double s) { return d2_extended(ctx, t0, s); }, t0 + ctx.c.k, t1,
        ctx.c.base_nodes_per_unit, ctx.c.quad_tol);
    return bd.phi + integral;
}

HPartials wave_partials(const ExtensionContext& ctx, double t0, double t1) {
    HPartials out;
    out.d1 = d1_extended(ctx, t0, t1);
    out.d2 = d2_extended(ctx, t0, t1);
    return out;
}

ExtensionReport verify_extension(const ExtensionContext& ctx) {
    ExtensionReport report;
    const double k = ctx.c.k;

    {
        // (a) global bound
        double worst = -std::numeric_limits<double>::infinity();
        const int nt = 101, ng = 161;
        for (int i = 0; i < nt; ++i) {
            const double t0 = static_cast<double>(i) / (nt - 1);
            for (int j = 0; j < ng; ++j) {
                const double gap = -2.0 + (k + 4.0) * j / (ng - 1);
                worst = std::max(worst, extended_cross(ctx, t0, t0 + gap) -
                                            ctx.c.epsilon_tilde);
            }
        }
        report.checks.push_back(
            {"cross_bound_margin", worst, 1e-12, worst <= 1e-12});
    }

    {
        // (b) C¹ seam glue: one-sided derivatives across the seam. The
        // stencils must be second order; a first-order quotient carries a
        // curvature bias of (delta/2)|d²| that masks the actual C¹ jump.
        const double delta = 1e-5;
        double worst = 0.0;
        const int nt = 50;
        for (int i = 0; i < nt; ++i) {
            const double t0 = static_cast<double>(i) / nt;
            const double t1 = t0 + k;
            const auto sided = [&](auto&& line) {
                const double mid = line(0.0);
                const double up = (-3.0 * mid + 4.0 * line(delta) - line(2.0 * delta)) /
                                  (2.0 * delta);
                const double dn = (3.0 * mid - 4.0 * line(-delta) + line(-2.0 * delta)) /
                                  (2.0 * delta);
                return std::abs(up - dn);
            };
            worst = std::max(
                {worst,
                 sided([&](double s) { return extended_cross(ctx, t0, t1 + s); }),
                 sided([&](double s) { return extended_cross(ctx, t0 + s, t1); })});
        }
        report.checks.push_back({"seam_c1_mismatch", worst, 1e-6, worst < 1e-6});
    }

    {
        // (c) rebuilt h̃ reproduces h above the seam
        double worst = 0.0;
        const int nt = 7, ng = 5;
        for (int i = 0; i < nt; ++i) {
            const double t0 = static_cast<double>(i) / nt;
            for (int j = 0; j < ng; ++j) {
                const double gap = k + 2.0 * (j + 1) / ng;
                const double exact = h_value(ctx.base, t0, t0 + gap);
                const double rebuilt = wave_h(ctx, t0, t0 + gap);
                worst = std::max(worst, std::abs(rebuilt - exact));
            }
        }
        report.checks.push_back({"wave_vs_closed_form", worst, 1e-8, worst <= 1e-8});
    }

    {
        // (d) mixed differences of h̃ against extended_cross below the seam.
        // Below-seam h̃ values come from adaptive quadrature, so the stencil
        // noise scales like quad_tol/delta²; a wide base step with two
        // Richardson levels keeps noise and truncation both below 1e-6.
        const double delta = 4e-2;
        double worst = 0.0;
        const int nt = 7, ng = 7;
        for (int i = 0; i < nt; ++i) {
            const double t0 = static_cast<double>(i) / nt;
            for (int j = 0; j < ng; ++j) {
                const double gap = -1.0 + (k - 0.1 + 1.0) * j / (ng - 1);
                const double t1 = t0 + gap;
                const auto mixed = [&](double d) {
                    return (extended_h(ctx, t0 + d, t1 + d) -
                            extended_h(ctx, t0 + d, t1 - d) -
                            extended_h(ctx, t0 - d, t1 + d) +
                            extended_h(ctx, t0 - d, t1 - d)) /
                           (4.0 * d * d);
                };
                const double m1 = mixed(delta), m2 = mixed(0.5 * delta),
                             m4 = mixed(0.25 * delta);
                const double extrapolated = (64.0 * m4 - 20.0 * m2 + m1) / 45.0;
                worst = std::max(worst, std::abs(extrapolated - extended_cross(ctx, t0, t1)));
            }
        }
        report.checks.push_back({"mixed_fd_vs_cross", worst, 1e-5, worst <= 1e-5});
    }

    report.all_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                  [](const ExtensionCheck& c) { return c.pass; });
    return report;
}

} // namespace bounce
