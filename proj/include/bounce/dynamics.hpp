#pragma once

#include <utility>
#include <vector>

#include "bounce/errors.hpp"
#include "bounce/forcing.hpp"

namespace bounce {

/// One impact: time, post-impact relative velocity w > 0, energy E = w²/2.
class ImpactState {
public:
    ImpactState(double t, double w);

    double t() const { return t_; }
    double w() const { return w_; }
    double E() const { return E_; }

private:
    double t_;
    double w_;
    double E_;
};

/**
 * Ballistic arc between two wall contacts in the co-moving frame,
 *
 *     x(t) = -g t²/2 - f(t) + A t + B,   x(t0) = x(t1) = 0.
 */
struct FlightArc {
    double t0 = 0.0;
    double t1 = 0.0;
    double A = 0.0;
    double B = 0.0;
};

double arc_position(const FlightArc& arc, double g, const ForcingFunction& f, double t);
double arc_velocity(const FlightArc& arc, double g, const ForcingFunction& f, double t);

/// Finite window of an orbit: strictly increasing impact times.
class OrbitWindow {
public:
    OrbitWindow() = default;
    explicit OrbitWindow(std::vector<ImpactState> states);

    void append(const ImpactState& s);

    const std::vector<ImpactState>& states() const { return states_; }
    std::size_t size() const { return states_.size(); }
    const ImpactState& operator[](std::size_t i) const { return states_[i]; }

    std::vector<double> times() const;
    std::vector<double> gaps() const;

private:
    std::vector<ImpactState> states_;
};

/// Solve the two-point boundary problem ẍ = -(g + f̈), x(t0) = x(t1) = 0.
FlightArc solve_dirichlet(double g, const ForcingFunction& f, double t0, double t1);

/// (w_depart, w_arrive) = (ẋ(t0), -ẋ(t1)) of the arc, in closed form.
std::pair<double, double> boundary_velocities(double g, const ForcingFunction& f,
                                              const FlightArc& arc);

/// True iff x(t) > 0 on the open flight interval (dense sampling plus
/// refinement of every sampled local minimum).
bool positivity_check(double g, const ForcingFunction& f, const FlightArc& arc);

/**
 * Velocity threshold above which the impact map is certified well defined:
 *     w̄ = 2·bound|ḟ|∞ + (g/2)·k_F,   k_F = max(1, 8·bound|ḟ|∞ / g).
 * For w0 > w̄ the implicit equation for the next impact has a unique root
 * with gap > k_F and slope bounded away from zero.
 */
double velocity_threshold(double g, const ForcingFunction& f);

/// The gap threshold k_F above (also the twist threshold k of the generating function).
double gap_threshold(double g, const ForcingFunction& f);

/**
 * One step of the impact map S(t0, w0) = (t1, w1): next impact time from the
 * implicit flight condition (safeguarded Newton within a certified bracket),
 * then the elastic velocity update.
 *
 * Requires s.w above velocity_threshold; throws std::domain_error otherwise,
 * ConvergenceError if the root solve exhausts its budget.
 */
ImpactState map_forward(double g, const ForcingFunction& f, const ImpactState& s,
                        double tol_root = 1e-12);

/**
 * Event-driven continuous simulation of n impacts from s0: closed-form arcs,
 * bracketing plus safeguarded refinement of each wall contact, elastic
 * reflection, positivity enforced per arc. Gaps below the chatter cutoff
 * (1e-6) raise ChatterError.
 */
OrbitWindow simulate_continuous(double g, const ForcingFunction& f, const ImpactState& s0,
                                int n);

/// |det J - 1| for the finite-difference Jacobian of (t0, E0) -> (t1, E1).
double symplectic_defect(double g, const ForcingFunction& f, const ImpactState& s);

} // namespace bounce
