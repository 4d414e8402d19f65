#pragma once

#include <optional>

#include "bounce/errors.hpp"
#include "bounce/forcing.hpp"

namespace bounce {

/**
 * Twist certificate for the exact generating function:
 * the cross derivative satisfies d(t0, t1) <= epsilon < 0 whenever
 * t1 - t0 >= k. The extended bound epsilon_tilde (valid for all gaps)
 * is filled in by the extension stage.
 */
struct TwistCertificate {
    double k = 1.0;
    double epsilon = 0.0;
    std::optional<double> epsilon_tilde;
};

/// Gravity, forcing, and the audited twist certificate, bundled for reuse.
struct GeneratingContext {
    double g;
    ForcingFunction f;
    TwistCertificate cert;
};

struct HPartials {
    double d1 = 0.0; ///< derivative in the first argument (equals -E_depart)
    double d2 = 0.0; ///< derivative in the second argument (equals +E_arrive)
};

struct HSecondPartials {
    double d11 = 0.0;
    double d22 = 0.0;
};

/**
 * Certify k and epsilon from the forcing bounds:
 *     k = max(1, 8·bound|f'|∞ / g),   epsilon = -k g² / 16,
 * then audit d <= epsilon on a grid over one period x gap in [k, k+10].
 * Throws CertificationError if the audit fails.
 */
TwistCertificate twist_certificate(double g, const ForcingFunction& f);

/// Build a context (validates g, runs the certificate audit).
GeneratingContext make_generating_context(double g, ForcingFunction f);

/**
 * Exact action of the flight arc from (t0, 0) to (t1, 0):
 *     h = g²Δ³/24 + (g/2)(f(t1)+f(t0))Δ - f[t1,t0]²Δ/2 - g∫f + (1/2)∫(f')²
 * with Δ = t1 - t0. Requires t1 > t0.
 */
double h_value(const GeneratingContext& ctx, double t0, double t1);

/**
 * The forcing-dependent part of h: everything after the g²Δ³/24 term above.
 * Finite differences of h itself lose digits to that cubic's magnitude on
 * long flights; difference this part instead and add the cubic's derivatives
 * back analytically.
 */
double h_forcing_part(const GeneratingContext& ctx, double t0, double t1);

/// (∂h/∂t0, ∂h/∂t1) in closed form via the boundary velocities.
HPartials h_partials(const GeneratingContext& ctx, double t0, double t1);

/// Pure second derivatives ∂²h/∂t0² and ∂²h/∂t1², closed form.
HSecondPartials h_second_partials(const GeneratingContext& ctx, double t0, double t1);

/**
 * Cross derivative d = ∂²h/∂t0∂t1 = -Δ·(g/2 + f[t0,t0,t1])·(g/2 + f[t0,t1,t1]),
 * smooth through Δ = 0 (confluent divided differences).
 */
double cross_derivative(const GeneratingContext& ctx, double t0, double t1);

/// ∂d/∂t1 - ∂d/∂t0 in closed form; drives the below-threshold correction.
double third_derivative_difference(const GeneratingContext& ctx, double t0, double t1);

} // namespace bounce
