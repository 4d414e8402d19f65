#pragma once

#include <cmath>
#include <cstdlib>

#include "bounce/errors.hpp"

namespace bounce::detail {

// 16-point Gauss-Legendre rule on [-1, 1] (positive half; symmetric).
inline constexpr double kGlNode[8] = {
    0.0950125098376374402, 0.2816035507792589132, 0.4580167776572273863,
    0.6178762444026437484, 0.7554044083550030339, 0.8656312023878317439,
    0.9445750230732325761, 0.9894009349916499326};
inline constexpr double kGlWeight[8] = {
    0.1894506104550684963, 0.1826034150449235888, 0.1691565193950025382,
    0.1495959888165767320, 0.1246289712555338720, 0.0951585116824927848,
    0.0622535239386478929, 0.0271524594117540949};

/// Composite 16-point Gauss-Legendre with at least nodes_per_unit nodes per
/// unit length (signed interval allowed).
template <class F>
double gauss_composite(F&& fun, double a, double b, int nodes_per_unit) {
    const double len = std::abs(b - a);
    if (len == 0.0) return 0.0;
    const int panels = std::max(1, static_cast<int>(std::ceil(len * nodes_per_unit / 16.0)));
    const double hw = (b - a) / (2.0 * panels);
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (2 * p + 1) * hw;
        for (int i = 0; i < 8; ++i) {
            sum += kGlWeight[i] * (fun(mid + hw * kGlNode[i]) + fun(mid - hw * kGlNode[i]));
        }
    }
    return sum * hw;
}

/**
 * Composite rule with panel doubling until two successive refinements agree
 * to tol relative; throws AccuracyError when the budget is exhausted.
 */
template <class F>
double gauss_adaptive(F&& fun, double a, double b, int base_nodes_per_unit, double tol) {
    double prev = gauss_composite(fun, a, b, base_nodes_per_unit);
    int npu = base_nodes_per_unit;
    for (int pass = 0; pass < 6; ++pass) {
        npu *= 2;
        const double cur = gauss_composite(fun, a, b, npu);
        const double diff = std::abs(cur - prev);
        if (diff <= tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    const double cur = gauss_composite(fun, a, b, 2 * npu);
    const double achieved = std::abs(cur - prev);
    if (achieved <= tol * (1.0 + std::abs(cur))) return cur;
    throw AccuracyError("quadrature failed to reach tolerance", achieved);
}

} // namespace bounce::detail
