#pragma once

#include <string>
#include <vector>

#include "bounce/dynamics.hpp"
#include "bounce/mather.hpp"

namespace bounce {

/// One launch tried by the acceleration detector.
struct AccelerationCandidate {
    double t0 = 0.0;     ///< launch impact time (phase in [0,1))
    double w0 = 0.0;     ///< launch velocity
    int level = 0;       ///< resonance index m of the seeding phase, 0 for grid seeds
    int bounces = 0;     ///< impacts actually simulated
    double w_final = 0.0;
    double growth = 0.0; ///< best increasing-subsequence span over the running minimum
    bool monotone = false; ///< velocity nondecreasing over the whole run
    bool domain_stop = false; ///< run ended by dropping below the map threshold
};

struct AccelerationReport {
    bool found = false; ///< some candidate reached the growth target monotonically
    std::string note;
    double threshold_velocity = 0.0;
    double growth_target = 10.0;
    std::vector<AccelerationCandidate> candidates;
    int best_index = -1;
    std::vector<double> best_velocities; ///< velocity series of the best candidate
};

/**
 * Heuristic search for velocity-growing orbits. Seeds launches at roots of
 * f'(t) = m g/4 (phase locking: with integer flight times the gain per bounce
 * is f'(t_n) + f'(t_{n+1})) and at a coarse phase/offset grid, pilots each
 * briefly, then extends the most promising ones up to max_bounces. Reports
 * the best orbit found; a negative verdict never claims nonexistence.
 */
AccelerationReport accelerate_search(double g, const ForcingFunction& f,
                                     int max_candidates = 24, int max_bounces = 10000,
                                     double growth_target = 10.0);

/// Run one candidate to a given budget and return its velocity series.
std::vector<double> replay_candidate(double g, const ForcingFunction& f, double t0,
                                     double w0, int max_bounces, double growth_target);

struct CoexistenceReport {
    bool bounded_ok = false;
    std::string bounded_note;
    MinimalOrbit bounded;
    int bounded_p = 0;
    bool accelerating_ok = false;
    AccelerationReport accelerating;
};

/**
 * For one forcing, produce both regimes: a certified periodic minimizer at
 * the smallest integer rotation number above k+3, and the acceleration
 * search verdict. Partial success is reported per side.
 */
CoexistenceReport coexistence_report(double g, const ForcingFunction& f,
                                     const SolveOptions& opt = {});

} // namespace bounce
