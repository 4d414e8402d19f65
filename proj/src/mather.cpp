#include "bounce/mather.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace bounce {

namespace {

constexpr double kMinGap = 1e-9;          // hard floor for gaps during descent
constexpr double kQuadraticPhase = 1e-6;  // residual below which full steps are taken
constexpr double kDedupTol = 1e-7;
constexpr double kAnchorResidualTol = 1e-9;
constexpr double kStartJitterFraction = 0.3;

struct EdgePartials {
    double d1 = 0.0, d2 = 0.0, d11 = 0.0, d22 = 0.0, d12 = 0.0;
};

EdgePartials edge_partials(const ExtensionContext& ctx, double a, double b) {
    EdgePartials e;
    if (b - a >= ctx.c.k) {
        const HPartials p = h_partials(ctx.base, a, b);
        const HSecondPartials s = h_second_partials(ctx.base, a, b);
        e.d1 = p.d1;
        e.d2 = p.d2;
        e.d11 = s.d11;
        e.d22 = s.d22;
        e.d12 = cross_derivative(ctx.base, a, b);
    } else {
        const HPartials p = extended_partials(ctx, a, b);
        const HSecondPartials s = extended_second_partials(ctx, a, b);
        e.d1 = p.d1;
        e.d2 = p.d2;
        e.d11 = s.d11;
        e.d22 = s.d22;
        e.d12 = extended_cross(ctx, a, b);
    }
    return e;
}

double linf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Dense symmetric solve with partial pivoting; Tikhonov escalation on
/// breakdown (the translation zero mode of the periodic action is benign:
/// the gradient is orthogonal to it).
bool solve_regularized(std::vector<double> A, std::vector<double> b, int n,
                       std::vector<double>& out) {
    double diag_scale = 0.0;
    for (int i = 0; i < n; ++i) diag_scale = std::max(diag_scale, std::abs(A[i * n + i]));
    double lambda = 0.0;
    for (int attempt = 0; attempt < 5; ++attempt) {
        std::vector<double> M = A;
        std::vector<double> rhs = b;
        if (lambda > 0.0)
            for (int i = 0; i < n; ++i) M[i * n + i] += lambda;
        bool ok = true;
        for (int col = 0; col < n && ok; ++col) {
            int piv = col;
            for (int r = col + 1; r < n; ++r)
                if (std::abs(M[r * n + col]) > std::abs(M[piv * n + col])) piv = r;
            if (std::abs(M[piv * n + col]) < 1e-13 * std::max(1.0, diag_scale)) {
                ok = false;
                break;
            }
            if (piv != col) {
                for (int c = col; c < n; ++c) std::swap(M[piv * n + c], M[col * n + c]);
                std::swap(rhs[piv], rhs[col]);
            }
            for (int r = col + 1; r < n; ++r) {
                const double m = M[r * n + col] / M[col * n + col];
                if (m == 0.0) continue;
                for (int c = col; c < n; ++c) M[r * n + c] -= m * M[col * n + c];
                rhs[r] -= m * rhs[col];
            }
        }
        if (ok) {
            out.assign(n, 0.0);
            for (int r = n - 1; r >= 0; --r) {
                double s = rhs[r];
                for (int c = r + 1; c < n; ++c) s -= M[r * n + c] * out[c];
                out[r] = s / M[r * n + r];
            }
            bool finite = true;
            for (double v : out)
                if (!std::isfinite(v)) finite = false;
            if (finite) return true;
        }
        lambda = (lambda == 0.0) ? 1e-10 * std::max(1.0, diag_scale) : lambda * 100.0;
    }
    return false;
}

bool strictly_ordered(const std::vector<double>& times, int p) {
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] - times[i - 1] > kMinGap)) return false;
    return times.front() + p - times.back() > kMinGap;
}

double action_of(const ExtensionContext& ctx, const std::vector<double>& times, int p) {
    const int q = static_cast<int>(times.size());
    double s = 0.0;
    for (int i = 0; i < q; ++i) {
        const double b = (i + 1 < q) ? times[i + 1] : times[0] + p;
        s += extended_h(ctx, times[i], b);
    }
    return s;
}

void assemble_periodic(const ExtensionContext& ctx, const std::vector<double>& times, int p,
                       std::vector<double>& grad, std::vector<double>* K) {
    const int q = static_cast<int>(times.size());
    std::vector<EdgePartials> edges(q);
    for (int i = 0; i < q; ++i) {
        const double b = (i + 1 < q) ? times[i + 1] : times[0] + p;
        edges[i] = edge_partials(ctx, times[i], b);
    }
    grad.assign(q, 0.0);
    for (int i = 0; i < q; ++i)
        grad[i] = edges[(i + q - 1) % q].d2 + edges[i].d1;
    if (K) {
        K->assign(static_cast<std::size_t>(q) * q, 0.0);
        for (int i = 0; i < q; ++i) {
            const int j = (i + 1) % q;
            (*K)[i * q + i] += edges[i].d11;
            (*K)[j * q + j] += edges[i].d22;
            (*K)[i * q + j] += edges[i].d12;
            (*K)[j * q + i] += edges[i].d12;
        }
    }
}

void canonicalize(PeriodicConfiguration& cfg) {
    const int q = cfg.q;
    const int p = cfg.p;
    std::vector<double> best;
    for (int r = 0; r < q; ++r) {
        std::vector<double> y(q);
        for (int i = 0; i < q; ++i) {
            const int idx = (r + i) % q;
            y[i] = cfg.times[idx] + ((r + i) >= q ? p : 0);
        }
        const double shift = std::floor(y[0]);
        for (double& v : y) v -= shift;
        if (best.empty() || y < best) best = y;
    }
    cfg.times = std::move(best);
}

/// Extend a periodic configuration to an arbitrary integer index.
double config_time(const PeriodicConfiguration& cfg, long long i) {
    const long long q = cfg.q;
    long long m = i / q;
    long long r = i % q;
    if (r < 0) {
        r += q;
        m -= 1;
    }
    return cfg.times[static_cast<std::size_t>(r)] + static_cast<double>(m) * cfg.p;
}

std::vector<PeriodicConfiguration> multistart_descent(const ExtensionContext& ctx, int p,
                                                      int q, const SolveOptions& opt,
                                                      int* attempted, int* converged) {
    const double alpha = static_cast<double>(p) / q;
    std::vector<PeriodicConfiguration> found;
    if (attempted) *attempted = 0;
    if (converged) *converged = 0;
    for (int s = 0; s < opt.multistarts; ++s) {
        std::mt19937_64 rng(opt.seed ^ (0x9e3779b97f4a7c15ULL * (s + 1)));
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::uniform_real_distribution<double> jitter(-kStartJitterFraction * alpha,
                                                      kStartJitterFraction * alpha);
        std::vector<double> start(q);
        const double t0 = u01(rng);
        for (int i = 0; i < q; ++i)
            start[i] = t0 + i * alpha + (i > 0 ? jitter(rng) : 0.0);
        if (attempted) ++*attempted;
        PeriodicConfiguration cfg;
        try {
            cfg = refine_configuration(ctx, p, q, std::move(start), opt);
        } catch (const ConvergenceError&) {
            continue;
        } catch (const OrderingError&) {
            continue;
        }
        if (converged) ++*converged;
        canonicalize(cfg);
        cfg.action = action_of(ctx, cfg.times, p);
        cfg.el_residual = el_residual(ctx, cfg);
        bool merged = false;
        for (auto& other : found) {
            double dist = 0.0;
            for (int i = 0; i < q; ++i)
                dist = std::max(dist, std::abs(other.times[i] - cfg.times[i]));
            if (dist < kDedupTol) {
                if (cfg.el_residual < other.el_residual) other = cfg;
                merged = true;
                break;
            }
        }
        if (!merged) found.push_back(std::move(cfg));
    }
    std::sort(found.begin(), found.end(),
              [](const PeriodicConfiguration& a, const PeriodicConfiguration& b) {
                  return a.times < b.times;
              });
    return found;
}

double max_circular_gap(const std::vector<double>& times) {
    std::vector<double> u;
    u.reserve(times.size());
    for (double t : times) u.push_back(t - std::floor(t));
    std::sort(u.begin(), u.end());
    double gap = 1.0 - u.back() + u.front();
    for (std::size_t i = 1; i < u.size(); ++i) gap = std::max(gap, u[i] - u[i - 1]);
    return gap;
}

} // namespace

double action(const ExtensionContext& ctx, const PeriodicConfiguration& cfg) {
    if (cfg.times.size() != static_cast<std::size_t>(cfg.q))
        throw std::invalid_argument("action: times size must equal q");
    return action_of(ctx, cfg.times, cfg.p);
}

std::vector<double> el_gradient(const ExtensionContext& ctx,
                                const PeriodicConfiguration& cfg) {
    if (cfg.times.size() != static_cast<std::size_t>(cfg.q))
        throw std::invalid_argument("el_gradient: times size must equal q");
    std::vector<double> grad;
    assemble_periodic(ctx, cfg.times, cfg.p, grad, nullptr);
    return grad;
}

double el_residual(const ExtensionContext& ctx, const PeriodicConfiguration& cfg) {
    return linf(el_gradient(ctx, cfg));
}

PeriodicConfiguration refine_configuration(const ExtensionContext& ctx, int p, int q,
                                           std::vector<double> start,
                                           const SolveOptions& opt) {
    if (q < 1 || p < 1) throw std::invalid_argument("refine_configuration: need p, q >= 1");
    if (start.size() != static_cast<std::size_t>(q))
        throw std::invalid_argument("refine_configuration: start size must equal q");
    if (!strictly_ordered(start, p))
        throw std::invalid_argument("refine_configuration: start must be cyclically ordered");

    std::vector<double> x = std::move(start);
    std::vector<double> grad, K, delta, trial(q);

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        assemble_periodic(ctx, x, p, grad, &K);
        const double res = linf(grad);
        if (!std::isfinite(res))
            throw ConvergenceError("refine_configuration: non-finite gradient");
        if (res < opt.el_tol) {
            if (!strictly_ordered(x, p))
                throw OrderingError("refine_configuration: converged out of cyclic order");
            PeriodicConfiguration cfg;
            cfg.p = p;
            cfg.q = q;
            cfg.times = x;
            cfg.action = action_of(ctx, x, p);
            cfg.el_residual = res;
            return cfg;
        }

        std::vector<double> rhs(grad);
        for (double& v : rhs) v = -v;
        bool have_newton = solve_regularized(K, rhs, q, delta);
        if (have_newton && dot(grad, delta) >= 0.0) have_newton = false;
        if (!have_newton) {
            delta.assign(grad.begin(), grad.end());
            for (double& v : delta) v = -v;
        }

        const double dir_deriv = dot(grad, delta);
        const bool quadratic = res < kQuadraticPhase;
        const double a0 = quadratic ? 0.0 : action_of(ctx, x, p);
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 45; ++ls) {
            for (int i = 0; i < q; ++i) trial[i] = x[i] + step * delta[i];
            if (strictly_ordered(trial, p)) {
                if (quadratic ||
                    action_of(ctx, trial, p) <= a0 + 1e-4 * step * dir_deriv) {
                    x = trial;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted)
            throw ConvergenceError("refine_configuration: line search stalled at residual " +
                                   std::to_string(res));
    }
    throw ConvergenceError("refine_configuration: iteration budget exhausted");
}

PeriodicConfiguration minimize_periodic(const ExtensionContext& ctx, int p, int q,
                                        const SolveOptions& opt) {
    if (q < 1 || p < 1) throw std::invalid_argument("minimize_periodic: need p, q >= 1");
    if (std::gcd(p, q) != 1)
        throw std::invalid_argument("minimize_periodic: p/q must be in lowest terms");
    const double alpha = static_cast<double>(p) / q;
    const double alpha_star = ctx.c.k + 2.0;
    if (!(alpha > alpha_star))
        throw std::domain_error("minimize_periodic: rotation number " + std::to_string(alpha) +
                                " not above the admissible threshold " +
                                std::to_string(alpha_star));

    int attempted = 0, converged = 0;
    const auto found = multistart_descent(ctx, p, q, opt, &attempted, &converged);
    if (found.empty())
        throw ConvergenceError("minimize_periodic: no start converged (" +
                               std::to_string(attempted) + " attempted)");

    const PeriodicConfiguration* best = &found.front();
    for (const auto& cfg : found) {
        const double tie = 1e-12 * (1.0 + std::abs(best->action));
        if (cfg.action < best->action - tie)
            best = &cfg;
        else if (std::abs(cfg.action - best->action) <= tie && cfg.times < best->times)
            best = &cfg;
    }
    return *best;
}

std::vector<PeriodicConfiguration> find_critical_configurations(const ExtensionContext& ctx,
                                                                int p, int q,
                                                                const SolveOptions& opt) {
    if (q < 1 || p < 1)
        throw std::invalid_argument("find_critical_configurations: need p, q >= 1");
    if (std::gcd(p, q) != 1)
        throw std::invalid_argument("find_critical_configurations: p/q must be in lowest terms");
    const double alpha = static_cast<double>(p) / q;
    if (!(alpha > ctx.c.k + 2.0))
        throw std::domain_error("find_critical_configurations: rotation number not admissible");
    return multistart_descent(ctx, p, q, opt, nullptr, nullptr);
}

double rotation_number(const OrbitWindow& window) {
    if (window.size() < 2)
        throw std::invalid_argument("rotation_number: need at least two impacts");
    const auto& s = window.states();
    return (s.back().t() - s.front().t()) / static_cast<double>(window.size() - 1);
}

OrbitCertificates certify_bounds(std::span<const double> times, double alpha, double k) {
    if (times.size() < 2) throw std::invalid_argument("certify_bounds: window too short");
    OrbitCertificates cert;
    cert.spacing_band = true;
    cert.deviation_band = true;
    cert.gaps_above_k = true;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double dev = times[i] - times[0] - static_cast<double>(i) * alpha;
        if (!(std::abs(dev) < 1.0)) cert.deviation_band = false;
        if (i == 0) continue;
        const double gap = times[i] - times[i - 1];
        if (!(gap > alpha - 2.0 && gap < alpha + 2.0)) cert.spacing_band = false;
        if (!(gap > k)) cert.gaps_above_k = false;
    }
    return cert;
}

MinimalOrbit reconstruct_orbit(const ExtensionContext& ctx,
                               const PeriodicConfiguration& cfg) {
    const int q = cfg.q;
    const int p = cfg.p;
    if (cfg.times.size() != static_cast<std::size_t>(q))
        throw std::invalid_argument("reconstruct_orbit: times size must equal q");
    const double res = el_residual(ctx, cfg);
    if (!(res < 1e-9))
        throw std::invalid_argument("reconstruct_orbit: configuration not critical, residual " +
                                    std::to_string(res));
    for (int i = 0; i < q; ++i) {
        const double b = (i + 1 < q) ? cfg.times[i + 1] : cfg.times[0] + p;
        if (!(b - cfg.times[i] > ctx.c.k))
            throw CertificationError(
                "reconstruct_orbit: gap at or below the twist threshold; orbit not certified");
    }

    // arrival energies: E_i = ∂₂h(t_{i-1}, t_i); the wrap edge supplies E_0
    std::vector<double> energy(q);
    for (int i = 0; i < q; ++i) {
        const double b = (i + 1 < q) ? cfg.times[i + 1] : cfg.times[0] + p;
        energy[(i + 1) % q] = h_partials(ctx.base, cfg.times[i], b).d2;
    }

    MinimalOrbit orbit;
    orbit.config = cfg;
    orbit.alpha = static_cast<double>(p) / q;
    for (int i = 0; i <= q; ++i) {
        const double t = (i < q) ? cfg.times[i] : cfg.times[0] + p;
        const double E = energy[i % q];
        orbit.window.append(ImpactState(t, std::sqrt(2.0 * E)));
    }

    std::vector<double> three_periods(3 * q + 1);
    for (int i = 0; i <= 3 * q; ++i)
        three_periods[i] = cfg.times[i % q] + p * (i / q);
    orbit.cert = certify_bounds(three_periods, orbit.alpha, ctx.c.k);

    orbit.cert.map_defect = std::numeric_limits<double>::infinity();
    orbit.cert.map_consistent = false;
    try {
        ImpactState s = orbit.window[0];
        double defect = 0.0;
        for (int i = 1; i <= q; ++i) {
            s = map_forward(ctx.base.g, ctx.base.f, s);
            defect = std::max(defect, std::abs(s.t() - orbit.window[i].t()));
            defect = std::max(defect, std::abs(s.E() - orbit.window[i].E()));
        }
        orbit.cert.map_defect = defect;
        orbit.cert.map_consistent = defect <= 1e-8;
    } catch (const std::exception&) {
        // below-threshold or unconverged step: leave the certificate failed
    }
    return orbit;
}

OrderRelation order_compare(std::span<const double> a, std::span<const double> b,
                            double tol) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("order_compare: windows must be nonempty, equal length");
    bool any_less = false, any_greater = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        if (diff < -tol) any_less = true;
        if (diff > tol) any_greater = true;
    }
    if (any_less && any_greater) return OrderRelation::Incomparable;
    if (any_less) return OrderRelation::ALessB;
    if (any_greater) return OrderRelation::BLessA;
    return OrderRelation::Equal;
}

ConnectionWindow heteroclinic(const ExtensionContext& ctx,
                              const PeriodicConfiguration& from,
                              const PeriodicConfiguration& to, int N,
                              const SolveOptions& opt, bool allow_equal_anchors) {
    if (from.p != to.p || from.q != to.q)
        throw std::invalid_argument("heteroclinic: anchors must share (p, q)");
    if (N < 4) throw std::invalid_argument("heteroclinic: window too short (need N >= 4)");
    const double res_from = el_residual(ctx, from);
    const double res_to = el_residual(ctx, to);
    if (!(res_from < kAnchorResidualTol && res_to < kAnchorResidualTol))
        throw std::invalid_argument("heteroclinic: anchors must be critical to 1e-9");

    const int n = 2 * N + 1;
    std::vector<double> F(n), T(n);
    for (int i = -N; i <= N; ++i) {
        F[i + N] = config_time(from, i);
        T[i + N] = config_time(to, i);
    }
    const OrderRelation rel = order_compare(F, T, 1e-9);
    if (rel == OrderRelation::Incomparable)
        throw std::invalid_argument("heteroclinic: anchors are not ordered");
    if (rel == OrderRelation::Equal && !allow_equal_anchors)
        throw std::invalid_argument("heteroclinic: anchors coincide (enable the sanity mode "
                                    "to solve the self-connection)");

    // Transition layer seeded at index 0 with a width fixed in index units:
    // refining the window (larger N) must not change which member of the
    // shift family of connections the iteration converges to.
    std::vector<double> x(n);
    for (int i = -N; i <= N; ++i) {
        const double blend = 1.0 / (1.0 + std::exp(-0.5 * static_cast<double>(i)));
        x[i + N] = F[i + N] + (T[i + N] - F[i + N]) * blend;
    }
    x[0] = F[0];
    x[n - 1] = T[n - 1];

    const int m = n - 2; // interior unknowns
    std::vector<EdgePartials> edges(n - 1);
    std::vector<double> grad(m), diag(m), off(m - 1), delta(m), trial(n);

    const auto window_ordered = [&](const std::vector<double>& y) {
        for (int i = 1; i < n; ++i)
            if (!(y[i] - y[i - 1] > kMinGap)) return false;
        return true;
    };
    const auto window_action = [&](const std::vector<double>& y) {
        double s = 0.0;
        for (int i = 0; i + 1 < n; ++i) s += extended_h(ctx, y[i], y[i + 1]);
        return s;
    };

    double res = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        for (int i = 0; i + 1 < n; ++i) edges[i] = edge_partials(ctx, x[i], x[i + 1]);
        res = 0.0;
        for (int j = 0; j < m; ++j) {
            grad[j] = edges[j].d2 + edges[j + 1].d1;
            res = std::max(res, std::abs(grad[j]));
        }
        if (!std::isfinite(res)) throw ConvergenceError("heteroclinic: non-finite gradient");
        if (res < opt.el_tol) {
            converged = true;
            break;
        }

        for (int j = 0; j < m; ++j) diag[j] = edges[j].d22 + edges[j + 1].d11;
        for (int j = 0; j + 1 < m; ++j) off[j] = edges[j + 1].d12;

        // Thomas solve of (tridiag) delta = -grad, Tikhonov escalation on breakdown
        bool solved = false;
        double lambda = 0.0;
        for (int attempt = 0; attempt < 5 && !solved; ++attempt) {
            std::vector<double> c(m - 1), d(m);
            bool ok = true;
            double denom = diag[0] + lambda;
            if (std::abs(denom) < 1e-14) ok = false;
            if (ok) {
                if (m > 1) c[0] = off[0] / denom;
                d[0] = -grad[0] / denom;
                for (int j = 1; j < m && ok; ++j) {
                    denom = diag[j] + lambda - off[j - 1] * c[j - 1];
                    if (std::abs(denom) < 1e-14) {
                        ok = false;
                        break;
                    }
                    if (j + 1 < m) c[j] = off[j] / denom;
                    d[j] = (-grad[j] - off[j - 1] * d[j - 1]) / denom;
                }
            }
            if (ok) {
                delta[m - 1] = d[m - 1];
                for (int j = m - 2; j >= 0; --j) delta[j] = d[j] - c[j] * delta[j + 1];
                solved = true;
                for (double v : delta)
                    if (!std::isfinite(v)) solved = false;
            }
            lambda = (lambda == 0.0) ? 1e-8 : lambda * 100.0;
        }
        double dir = 0.0;
        if (solved)
            for (int j = 0; j < m; ++j) dir += grad[j] * delta[j];
        if (!solved || dir >= 0.0) {
            for (int j = 0; j < m; ++j) delta[j] = -grad[j];
            dir = -dot(grad, grad);
        }

        const bool quadratic = res < kQuadraticPhase;
        const double a0 = quadratic ? 0.0 : window_action(x);
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 45; ++ls) {
            trial = x;
            for (int j = 0; j < m; ++j) trial[j + 1] = x[j + 1] + step * delta[j];
            if (window_ordered(trial)) {
                if (quadratic || window_action(trial) <= a0 + 1e-4 * step * dir) {
                    x = trial;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted)
            throw ConvergenceError("heteroclinic: line search stalled at residual " +
                                   std::to_string(res));
    }
    if (!converged)
        throw ConvergenceError("heteroclinic: iteration budget exhausted at residual " +
                               std::to_string(res));

    ConnectionWindow cw;
    cw.N = N;
    cw.times = x;
    cw.from = from;
    cw.to = to;
    cw.anchor_order = rel;
    cw.interior_residual = res;
    const int third = (N + 2) / 3;
    for (int i = -N; i <= -third; ++i)
        cw.tail_defect_from = std::max(cw.tail_defect_from, std::abs(x[i + N] - F[i + N]));
    for (int i = third; i <= N; ++i)
        cw.tail_defect_to = std::max(cw.tail_defect_to, std::abs(x[i + N] - T[i + N]));
    return cw;
}

CantorReport cantor_probe(const ExtensionContext& ctx, double alpha, int depth,
                          const SolveOptions& opt) {
    if (!(depth >= 1 && depth <= 8))
        throw std::invalid_argument("cantor_probe: depth must lie in 1..8");
    const double alpha_star = ctx.c.k + 2.0;
    if (!(alpha > alpha_star))
        throw std::domain_error("cantor_probe: rotation number not above the admissible "
                                "threshold");

    CantorReport report;
    report.alpha = alpha;
    report.alpha_star = alpha_star;

    // continued-fraction convergents p_n/q_n
    long long pm1 = 1, qm1 = 0, pm2 = 0, qm2 = 1;
    double x = alpha;
    for (int level = 0; level < depth; ++level) {
        const double a_floor = std::floor(x);
        const long long a = static_cast<long long>(a_floor);
        const long long pn = a * pm1 + pm2;
        const long long qn = a * qm1 + qm2;
        pm2 = pm1;
        qm2 = qm1;
        pm1 = pn;
        qm1 = qn;

        CantorRow row;
        row.level = level + 1;
        row.p = static_cast<int>(pn);
        row.q = static_cast<int>(qn);
        row.skipped = !(static_cast<double>(pn) / qn > alpha_star);
        if (!row.skipped) {
            const PeriodicConfiguration cfg =
                minimize_periodic(ctx, row.p, row.q, opt);
            row.max_gap = max_circular_gap(cfg.times);
            row.gap_times_q = row.max_gap * row.q;

            SolveOptions doubled = opt;
            doubled.multistarts = 2 * opt.multistarts;
            const PeriodicConfiguration cfg2 =
                minimize_periodic(ctx, row.p, row.q, doubled);
            const double gap2 = max_circular_gap(cfg2.times);
            report.stability.push_back(std::abs(gap2 - row.max_gap) /
                                       std::max(row.max_gap, 1e-300));
        } else {
            report.stability.push_back(0.0);
        }
        report.rows.push_back(row);

        const double frac = x - a_floor;
        if (frac < 1e-12) break; // rational: expansion terminated
        x = 1.0 / frac;
    }
    return report;
}

} // namespace bounce
