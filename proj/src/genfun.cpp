#include "bounce/genfun.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bounce {

namespace {

constexpr int kAuditTimeSamples = 65;  // over one period of t0
constexpr int kAuditGapSamples = 201;  // over gaps in [k, k+10]
constexpr double kAuditGapSpan = 10.0;

struct CrossFactors {
    double delta;
    double p; ///< g/2 + f[t0,t0,t1]
    double q; ///< g/2 + f[t0,t1,t1]
};

CrossFactors cross_factors(const GeneratingContext& ctx, double t0, double t1) {
    const double n001[3] = {t0, t0, t1};
    const double n011[3] = {t0, t1, t1};
    CrossFactors cf;
    cf.delta = t1 - t0;
    cf.p = 0.5 * ctx.g + ctx.f.divided_difference(n001);
    cf.q = 0.5 * ctx.g + ctx.f.divided_difference(n011);
    return cf;
}

} // namespace

TwistCertificate twist_certificate(double g, const ForcingFunction& f) {
    if (!(g > 0.0)) throw std::invalid_argument("twist_certificate: g must be positive");
    TwistCertificate cert;
    cert.k = std::max(1.0, 8.0 * f.sup_bound(1) / g);
    cert.epsilon = -cert.k * g * g / 16.0;

    GeneratingContext probe{g, f, cert};
    const double slack = 1e-12 * (1.0 + std::abs(cert.epsilon));
    for (int i = 0; i < kAuditTimeSamples; ++i) {
        const double t0 = static_cast<double>(i) / (kAuditTimeSamples - 1);
        for (int j = 0; j < kAuditGapSamples; ++j) {
            const double gap = cert.k + kAuditGapSpan * j / (kAuditGapSamples - 1);
            const double d = cross_derivative(probe, t0, t0 + gap);
            if (!(d <= cert.epsilon + slack))
                throw CertificationError(
                    "twist_certificate: audit failed at t0=" + std::to_string(t0) +
                    " gap=" + std::to_string(gap) + " d=" + std::to_string(d) +
                    " bound=" + std::to_string(cert.epsilon));
        }
    }
    return cert;
}

GeneratingContext make_generating_context(double g, ForcingFunction f) {
    TwistCertificate cert = twist_certificate(g, f);
    return GeneratingContext{g, std::move(f), cert};
}

double h_value(const GeneratingContext& ctx, double t0, double t1) {
    const double delta = t1 - t0;
    return ctx.g * ctx.g * delta * delta * delta / 24.0 + h_forcing_part(ctx, t0, t1);
}

double h_forcing_part(const GeneratingContext& ctx, double t0, double t1) {
    if (!(t1 > t0)) throw std::invalid_argument("h_forcing_part: need t1 > t0");
    const double g = ctx.g;
    const ForcingFunction& f = ctx.f;
    const double delta = t1 - t0;
    const double dd = f.slope(t0, t1);
    return 0.5 * g * (f(t1) + f(t0)) * delta - 0.5 * dd * dd * delta -
           g * f.definite_integral(t0, t1) + 0.5 * f.velocity_square_integral(t0, t1);
}

HPartials h_partials(const GeneratingContext& ctx, double t0, double t1) {
    const double g = ctx.g;
    const ForcingFunction& f = ctx.f;
    const double delta = t1 - t0;
    const double dd = f.slope(t0, t1);
    const double w_dep = 0.5 * g * delta + dd - f.eval_derivative(1, t0);
    const double w_arr = 0.5 * g * delta - dd + f.eval_derivative(1, t1);
    HPartials out;
    out.d1 = -0.5 * w_dep * w_dep;
    out.d2 = 0.5 * w_arr * w_arr;
    return out;
}

HSecondPartials h_second_partials(const GeneratingContext& ctx, double t0, double t1) {
    const double g = ctx.g;
    const ForcingFunction& f = ctx.f;
    const double delta = t1 - t0;
    const double dd = f.slope(t0, t1);
    const double w_dep = 0.5 * g * delta + dd - f.eval_derivative(1, t0);
    const double w_arr = 0.5 * g * delta - dd + f.eval_derivative(1, t1);
    const CrossFactors cf = cross_factors(ctx, t0, t1);
    // dw_dep/dt0 = -g/2 + f[t0,t0,t1] - f''(t0); dw_arr/dt1 = g/2 - f[t0,t1,t1] + f''(t1)
    const double dwdep_dt0 = -0.5 * g + (cf.p - 0.5 * g) - f.eval_derivative(2, t0);
    const double dwarr_dt1 = 0.5 * g - (cf.q - 0.5 * g) + f.eval_derivative(2, t1);
    HSecondPartials out;
    out.d11 = -w_dep * dwdep_dt0;
    out.d22 = w_arr * dwarr_dt1;
    return out;
}

double cross_derivative(const GeneratingContext& ctx, double t0, double t1) {
    const CrossFactors cf = cross_factors(ctx, t0, t1);
    return -cf.delta * cf.p * cf.q;
}

double third_derivative_difference(const GeneratingContext& ctx, double t0, double t1) {
    const CrossFactors cf = cross_factors(ctx, t0, t1);
    const ForcingFunction& f = ctx.f;
    const double n0001[4] = {t0, t0, t0, t1};
    const double n0011[4] = {t0, t0, t1, t1};
    const double n0111[4] = {t0, t1, t1, t1};
    const double f0001 = f.divided_difference(n0001);
    const double f0011 = f.divided_difference(n0011);
    const double f0111 = f.divided_difference(n0111);
    // dP/dt1 - dP/dt0 = f[0011] - 2 f[0001]; dQ/dt1 - dQ/dt0 = 2 f[0111] - f[0011]
    return -2.0 * cf.p * cf.q -
           cf.delta * ((f0011 - 2.0 * f0001) * cf.q + cf.p * (2.0 * f0111 - f0011));
}

} // namespace bounce
