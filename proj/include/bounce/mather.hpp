#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bounce/dynamics.hpp"
#include "bounce/extension.hpp"

namespace bounce {

/// Critical configuration of the periodic action: q impact times advancing
/// by p per period, t_{i+q} = t_i + p.
struct PeriodicConfiguration {
    int p = 0;
    int q = 1;
    std::vector<double> times;
    double action = 0.0;
    double el_residual = 0.0;
};

enum class OrderRelation { ALessB, Equal, BLessA, Incomparable };

struct SolveOptions {
    int multistarts = 16;
    std::uint64_t seed = 12345;
    double el_tol = 1e-12;  ///< sup-norm target for the Euler-Lagrange gradient
    int max_iterations = 200;
};

struct OrbitCertificates {
    bool spacing_band = false;   ///< every gap inside (alpha-2, alpha+2)
    bool deviation_band = false; ///< |t_n - t_0 - n*alpha| < 1 over the window
    bool gaps_above_k = false;   ///< every gap above the twist threshold
    bool map_consistent = false; ///< impact-map iteration reproduces the window
    double map_defect = 0.0;
};

/// A certified minimizing orbit: configuration, one closed period of impacts,
/// rotation number, and the audit results.
struct MinimalOrbit {
    PeriodicConfiguration config;
    OrbitWindow window;
    double alpha = 0.0;
    OrbitCertificates cert;
};

/// Discrete connecting orbit between two periodic anchors on a clamped window.
struct ConnectionWindow {
    int N = 0;
    std::vector<double> times; ///< indices -N..N, size 2N+1
    PeriodicConfiguration from; ///< anchor clamped at index -N
    PeriodicConfiguration to;   ///< anchor clamped at index +N
    OrderRelation anchor_order = OrderRelation::Incomparable;
    double interior_residual = 0.0;
    double tail_defect_from = 0.0;
    double tail_defect_to = 0.0;
};

struct CantorRow {
    int level = 0;
    int p = 0;
    int q = 1;
    double max_gap = 0.0;      ///< largest circular gap of the projected times
    double gap_times_q = 0.0;  ///< rigidity indicator, 1 for a rigid rotation
    bool skipped = false;      ///< ratio at or below the admissible threshold
};

struct CantorReport {
    double alpha = 0.0;
    double alpha_star = 0.0;
    std::vector<CantorRow> rows;
    /// relative change of max_gap per row when the multistart budget doubles
    std::vector<double> stability;
};

/// Periodic action: sum of extended_h over one period (wrap edge included).
double action(const ExtensionContext& ctx, const PeriodicConfiguration& cfg);

/// Euler-Lagrange gradient of the periodic action, one entry per time.
std::vector<double> el_gradient(const ExtensionContext& ctx,
                                const PeriodicConfiguration& cfg);

/// Sup norm of the Euler-Lagrange gradient.
double el_residual(const ExtensionContext& ctx, const PeriodicConfiguration& cfg);

/**
 * Damped Newton descent of the periodic action from a given start (strictly
 * increasing, positive wrap gap). Returns the converged configuration without
 * canonicalization. Throws ConvergenceError / OrderingError.
 */
PeriodicConfiguration refine_configuration(const ExtensionContext& ctx, int p, int q,
                                           std::vector<double> start,
                                           const SolveOptions& opt = {});

/**
 * Multistart minimization of the periodic action for rotation number p/q in
 * lowest terms, p/q above the admissible threshold k+2. Returns the canonical
 * representative (first time in [0,1), cyclic rotation and integer shift fixed
 * by smallest first time, ties broken lexicographically).
 */
PeriodicConfiguration minimize_periodic(const ExtensionContext& ctx, int p, int q,
                                        const SolveOptions& opt = {});

/// All distinct critical configurations reached by the multistart descent.
std::vector<PeriodicConfiguration> find_critical_configurations(
    const ExtensionContext& ctx, int p, int q, const SolveOptions& opt = {});

/// (t_last - t_first) / (n - 1) over a window of n >= 2 impacts.
double rotation_number(const OrbitWindow& window);

/// Exhaustive band checks over a window of times (fills the three band fields).
OrbitCertificates certify_bounds(std::span<const double> times, double alpha, double k);

/**
 * Rebuild the orbit of a converged configuration: per-impact energies from
 * the arrival derivative of h, then certify by iterating the impact map and
 * by the deviation/spacing/gap bands over three periods.
 * Requires every gap above the twist threshold.
 */
MinimalOrbit reconstruct_orbit(const ExtensionContext& ctx,
                               const PeriodicConfiguration& cfg);

/// Pointwise order of two equal-length time sequences, with tolerance band.
OrderRelation order_compare(std::span<const double> a, std::span<const double> b,
                            double tol = 1e-9);

/**
 * Discrete connecting orbit on the clamped window [-N, N]: endpoints pinned
 * to the two anchor orbits, interior solved to stationarity. Anchors must
 * share (p, q), be critical to 1e-9, and be strictly ordered (or equal when
 * allow_equal_anchors, the self-connection sanity mode).
 */
ConnectionWindow heteroclinic(const ExtensionContext& ctx,
                              const PeriodicConfiguration& from,
                              const PeriodicConfiguration& to, int N,
                              const SolveOptions& opt = {},
                              bool allow_equal_anchors = false);

/**
 * Probe the invariant-set structure at an irrational rotation number: minimize
 * along continued-fraction convergents p_n/q_n, project the times mod 1, and
 * report the largest circular gap per level plus its stability when the
 * multistart budget doubles. depth <= 8.
 */
CantorReport cantor_probe(const ExtensionContext& ctx, double alpha, int depth,
                          const SolveOptions& opt = {});

} // namespace bounce
