#pragma once

#include <string>
#include <vector>

#include "bounce/genfun.hpp"

namespace bounce {

/**
 * Constants of the below-threshold extension. The cross derivative is
 * replaced, for gaps below k, by
 *
 *     D(t0,t1) = d(m-k/2, m+k/2) + (1/2)·(∂₁d-∂₀d)(t0,t1)·v + H·v²,
 *     m = (t0+t1)/2,  v = (t1-t0) - k,
 *
 * which glues C¹ at the seam and stays below epsilon_tilde because
 * H < I = inf_{x<k} (A + C(x-k))/(x-k)², A = epsilon_tilde - epsilon,
 * C half the sup of |∂₁d-∂₀d| over the working strip.
 */
struct ExtensionConstants {
    double k = 1.0;
    double epsilon = 0.0;
    double epsilon_tilde = 0.0;
    double A = 0.0;
    double C = 0.0;
    double I = 0.0;
    double H = 0.0;
    double quad_tol = 1e-10;
    int base_nodes_per_unit = 32;
};

/// Cauchy data on the seam t1 = t0 + k: trace, normal and tangential derivative.
struct BoundaryData {
    double phi = 0.0;       ///< h(t0, t0+k)
    double psi = 0.0;       ///< (∂₂h - ∂₁h)(t0, t0+k)
    double phi_prime = 0.0; ///< (∂₁h + ∂₂h)(t0, t0+k), the derivative of phi
};

struct ExtensionContext {
    GeneratingContext base;
    ExtensionConstants c;
};

/// inf over x < x0 of (A + C(x-x0))/(x-x0)². Requires A > 0, C >= 0.
double phi_infimum(double A, double C, double x0);

/**
 * Measure the extension constants (grid sweep for C, closed form for I),
 * fix H = I - 1, and fill the certificate's epsilon_tilde = epsilon/2 slot.
 */
ExtensionContext make_extension_context(const GeneratingContext& base,
                                        double quad_tol = 1e-10);

/// d for gaps >= k, the C¹ quadratic correction D below. Globally <= epsilon_tilde.
double extended_cross(const ExtensionContext& ctx, double t0, double t1);

BoundaryData boundary_data(const ExtensionContext& ctx, double t0);

/**
 * The extended generating function: exactly h for gaps >= k; below the seam
 * it is rebuilt from the seam Cauchy data by integrating extended_cross along
 * characteristics, so that ∂²h̃/∂t0∂t1 = extended_cross everywhere.
 */
double extended_h(const ExtensionContext& ctx, double t0, double t1);

/// First partials of extended_h (closed form above the seam, else quadrature).
HPartials extended_partials(const ExtensionContext& ctx, double t0, double t1);

/// Second partials of extended_h (closed form above the seam, else differenced).
HSecondPartials extended_second_partials(const ExtensionContext& ctx, double t0, double t1);

/**
 * The characteristic-integration formula without the closed-form shortcut,
 * valid on both sides of the seam. Above the seam it must reproduce h; that
 * agreement is the uniqueness check of the rebuild.
 */
double wave_h(const ExtensionContext& ctx, double t0, double t1);
HPartials wave_partials(const ExtensionContext& ctx, double t0, double t1);

struct ExtensionCheck {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct ExtensionReport {
    std::vector<ExtensionCheck> checks;
    bool all_pass = false;
};

/**
 * Audit the extension: (a) global bound extended_cross <= epsilon_tilde,
 * (b) C¹ seam glue, (c) wave_h reproduces h above the seam, (d) mixed finite
 * differences of extended_h reproduce extended_cross below the seam.
 */
ExtensionReport verify_extension(const ExtensionContext& ctx);

} // namespace bounce
