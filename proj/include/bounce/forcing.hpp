#pragma once

#include <span>
#include <vector>

namespace bounce {

/// One pair of coefficients at integer frequency j:  a·cos(2πjt) + b·sin(2πjt).
struct Harmonic {
    double a = 0.0;
    double b = 0.0;
};

/**
 * Finite trigonometric polynomial with period 1,
 *
 *     p(t) = mean + Σ_{j=1..J} a_j cos(2πjt) + b_j sin(2πjt).
 *
 * The class is closed under differentiation and multiplication, and has an
 * exact antiderivative, so every downstream integral and derivative can be
 * evaluated without quadrature. Immutable after construction.
 */
class TrigPoly {
public:
    TrigPoly() = default;
    TrigPoly(double mean, std::vector<Harmonic> harmonics);

    double operator()(double t) const { return derivative_value(0, t); }

    /// Exact value of the order-th derivative at t, any order >= 0.
    double derivative_value(int order, double t) const;

    /// Termwise derivative, again a TrigPoly.
    TrigPoly derivative() const;

    /// Product via the product-to-sum identities; degree adds.
    TrigPoly operator*(const TrigPoly& other) const;

    /// Exact signed integral over [t0, t1] (t1 < t0 allowed).
    double integral(double t0, double t1) const;

    /**
     * Divided difference over 1..8 nodes, repeats allowed.
     * Near-coincident nodes switch to a Taylor form about the node centroid
     * so the result is smooth through every confluence:
     *   p[t,t] = p'(t),  p[t,t,s] = (p[t,s] - p'(t))/(s-t),  p[t,t,t] = p''(t)/2.
     */
    double divided_difference(std::span<const double> nodes) const;

    /// Certified sup-norm upper bound of the order-th derivative (coefficient sums).
    double sup_bound(int order) const;

    double mean() const { return mean_; }
    const std::vector<Harmonic>& harmonics() const { return harms_; }
    int degree() const { return static_cast<int>(harms_.size()); }

private:
    double mean_ = 0.0;
    std::vector<Harmonic> harms_;
};

/**
 * The 1-periodic racket motion f(t), restricted to finite trigonometric
 * polynomials so that derivatives of orders 0..4, the antiderivative, and
 * the energy integral ∫ ḟ² are all exact.
 *
 * Thread safety: immutable after construction; all member functions are pure.
 */
class ForcingFunction {
public:
    ForcingFunction() : ForcingFunction(TrigPoly{}) {}
    explicit ForcingFunction(TrigPoly poly);
    ForcingFunction(double mean_offset, std::vector<Harmonic> harmonics);

    /// Exact order-th derivative at t. order must lie in 0..4.
    double eval_derivative(int order, double t) const;

    /// f(t), shorthand for eval_derivative(0, t).
    double operator()(double t) const { return f_.derivative_value(0, t); }

    /// Exact signed ∫_{t0}^{t1} f(t) dt.
    double definite_integral(double t0, double t1) const;

    /// Exact ∫_{t0}^{t1} ḟ(t)² dt via product-to-sum expansion of ḟ².
    double velocity_square_integral(double t0, double t1) const;

    /// Divided difference over 2..4 nodes (repeats allowed). More nodes -> error.
    double divided_difference(std::span<const double> nodes) const;

    /// Convenience for the two-node case f[t1, t0].
    double slope(double t0, double t1) const;

    /// Certified upper bound of |f^(order)|_inf from coefficient sums, orders 0..4.
    double sup_bound(int order) const;

    const TrigPoly& poly() const { return f_; }

private:
    TrigPoly f_;
    TrigPoly fdot_sq_; // cached ḟ², used by the energy integral
};

} // namespace bounce
