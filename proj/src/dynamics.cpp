#include "bounce/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bounce {

namespace {

constexpr double kChatterCutoff = 1e-6;
constexpr int kRootBudget = 100;
constexpr int kMarchRootBudget = 200;

double sq(double x) { return x * x; }

/// Safeguarded Newton on a bracketed sign change: keeps [a, b] with
/// fun(a) <= 0 <= fun(b), falls back to bisection when the Newton step
/// leaves the bracket, stops at machine-level step size.
template <class F, class DF>
double refine_root(F&& fun, DF&& dfun, double a, double b, double fa, double fb, int budget) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    double x = 0.5 * (a + b);
    for (int iter = 0; iter < budget; ++iter) {
        const double fx = fun(x);
        if (fx == 0.0) return x;
        if ((fx < 0.0) == (fa < 0.0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        const double dfx = dfun(x);
        double next;
        if (dfx != 0.0) {
            next = x - fx / dfx;
            if (!(next > a && next < b)) next = 0.5 * (a + b);
        } else {
            next = 0.5 * (a + b);
        }
        const double step = std::abs(next - x);
        x = next;
        const double scale = std::max(1.0, std::abs(x));
        if (step <= 4.0 * std::numeric_limits<double>::epsilon() * scale) return x;
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * scale) return 0.5 * (a + b);
    }
    return x;
}

} // namespace

ImpactState::ImpactState(double t, double w) : t_(t), w_(w), E_(0.5 * w * w) {
    if (!(w > 0.0)) throw std::domain_error("ImpactState: velocity must be positive, got " +
                                            std::to_string(w));
    if (!std::isfinite(t)) throw std::domain_error("ImpactState: non-finite time");
}

double arc_position(const FlightArc& arc, double g, const ForcingFunction& f, double t) {
    return -0.5 * g * t * t - f(t) + arc.A * t + arc.B;
}

double arc_velocity(const FlightArc& arc, double g, const ForcingFunction& f, double t) {
    return -g * t - f.eval_derivative(1, t) + arc.A;
}

OrbitWindow::OrbitWindow(std::vector<ImpactState> states) {
    for (const auto& s : states) append(s);
}

void OrbitWindow::append(const ImpactState& s) {
    if (!states_.empty() && !(s.t() > states_.back().t()))
        throw std::invalid_argument("OrbitWindow: impact times must be strictly increasing");
    states_.push_back(s);
}

std::vector<double> OrbitWindow::times() const {
    std::vector<double> out;
    out.reserve(states_.size());
    for (const auto& s : states_) out.push_back(s.t());
    return out;
}

std::vector<double> OrbitWindow::gaps() const {
    std::vector<double> out;
    if (states_.size() < 2) return out;
    out.reserve(states_.size() - 1);
    for (std::size_t i = 1; i < states_.size(); ++i)
        out.push_back(states_[i].t() - states_[i - 1].t());
    return out;
}

FlightArc solve_dirichlet(double g, const ForcingFunction& f, double t0, double t1) {
    if (!(g > 0.0)) throw std::invalid_argument("solve_dirichlet: g must be positive");
    if (!(t1 > t0)) throw std::invalid_argument("solve_dirichlet: need t1 > t0");
    FlightArc arc;
    arc.t0 = t0;
    arc.t1 = t1;
    arc.A = 0.5 * g * (t0 + t1) + f.slope(t0, t1);
    arc.B = 0.5 * g * t0 * t0 + f(t0) - arc.A * t0;
    return arc;
}

std::pair<double, double> boundary_velocities(double g, const ForcingFunction& f,
                                              const FlightArc& arc) {
    const double dd = f.slope(arc.t0, arc.t1);
    const double delta = arc.t1 - arc.t0;
    const double w_dep = 0.5 * g * delta + dd - f.eval_derivative(1, arc.t0);
    const double w_arr = 0.5 * g * delta - dd + f.eval_derivative(1, arc.t1);
    return {w_dep, w_arr};
}

bool positivity_check(double g, const ForcingFunction& f, const FlightArc& arc) {
    const double delta = arc.t1 - arc.t0;
    if (!(delta > 0.0)) throw std::invalid_argument("positivity_check: need t1 > t0");
    if (arc_velocity(arc, g, f, arc.t0) <= 0.0) return false;
    if (arc_velocity(arc, g, f, arc.t1) >= 0.0) return false;

    const int per_unit = 64 * std::max<int>(1, static_cast<int>(f.poly().degree()));
    const int n = std::max(256, per_unit * static_cast<int>(std::ceil(delta)));
    double prev_t = arc.t0;
    double prev_v = arc_velocity(arc, g, f, prev_t);
    for (int i = 1; i < n; ++i) {
        const double t = arc.t0 + delta * i / n;
        const double x = arc_position(arc, g, f, t);
        if (x <= 0.0) return false;
        const double v = arc_velocity(arc, g, f, t);
        if (prev_v < 0.0 && v > 0.0) {
            // local minimum inside (prev_t, t): locate it and test the dip
            double a = prev_t, b = t, va = prev_v;
            for (int k = 0; k < 60 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++k) {
                const double m = 0.5 * (a + b);
                const double vm = arc_velocity(arc, g, f, m);
                if ((vm < 0.0) == (va < 0.0)) {
                    a = m;
                    va = vm;
                } else {
                    b = m;
                }
            }
            if (arc_position(arc, g, f, 0.5 * (a + b)) <= 0.0) return false;
        }
        prev_t = t;
        prev_v = v;
    }
    return true;
}

double gap_threshold(double g, const ForcingFunction& f) {
    if (!(g > 0.0)) throw std::invalid_argument("gap_threshold: g must be positive");
    return std::max(1.0, 8.0 * f.sup_bound(1) / g);
}

double velocity_threshold(double g, const ForcingFunction& f) {
    return 2.0 * f.sup_bound(1) + 0.5 * g * gap_threshold(g, f);
}

ImpactState map_forward(double g, const ForcingFunction& f, const ImpactState& s,
                        double tol_root) {
    if (!(g > 0.0)) throw std::invalid_argument("map_forward: g must be positive");
    const double wbar = velocity_threshold(g, f);
    if (!(s.w() > wbar))
        throw std::domain_error("map_forward: velocity " + std::to_string(s.w()) +
                                " not above threshold " + std::to_string(wbar));

    const double t0 = s.t();
    const double w0 = s.w();
    const double fd0 = f.eval_derivative(1, t0);
    const double b1 = f.sup_bound(1);
    const double ballistic = 2.0 * w0 / g;

    // Flight condition: F(t1) = (t1-t0) - 2 w0/g + (2/g)(f[t1,t0] - f'(t0)).
    const auto F = [&](double t1) {
        return (t1 - t0) - ballistic + (2.0 / g) * (f.slope(t0, t1) - fd0);
    };
    const auto dF = [&](double t1) {
        const double nodes[3] = {t0, t1, t1};
        return 1.0 + (2.0 / g) * f.divided_difference(nodes);
    };

    // All roots lie within 4 b1/g of the ballistic gap and above the gap
    // threshold; above threshold dF >= 1/2, so the root is unique.
    double lo = t0 + std::max(gap_threshold(g, f), ballistic - 4.0 * b1 / g);
    double hi = t0 + ballistic + 4.0 * b1 / g;
    double flo = F(lo);
    double fhi = F(hi);
    if (flo > 0.0 || fhi < 0.0) {
        const double pad = 4.0 * b1 / g + 1e-9 * std::max(1.0, ballistic);
        lo -= pad;
        hi += pad;
        flo = F(lo);
        fhi = F(hi);
        if (flo > 0.0 || fhi < 0.0)
            throw ConvergenceError("map_forward: failed to bracket the next impact");
    }

    const double t1 = refine_root(F, dF, lo, hi, flo, fhi, kRootBudget);
    const double delta = t1 - t0;
    const double residual = std::abs(F(t1));
    if (!(residual <= tol_root * (1.0 + std::abs(delta))))
        throw ConvergenceError("map_forward: flight residual " + std::to_string(residual) +
                               " above tolerance");

    const double w1 = w0 - 2.0 * f.slope(t0, t1) + f.eval_derivative(1, t1) + fd0;
    if (!(w1 > 0.0))
        throw ConvergenceError("map_forward: non-positive post-impact velocity");
    return ImpactState(t1, w1);
}

OrbitWindow simulate_continuous(double g, const ForcingFunction& f, const ImpactState& s0,
                                int n) {
    if (n < 0) throw std::invalid_argument("simulate_continuous: negative impact count");
    OrbitWindow window;
    window.append(s0);

    const double b0 = f.sup_bound(0);
    const double b1 = f.sup_bound(1);
    const int degree = std::max<int>(1, static_cast<int>(f.poly().degree()));

    for (int step = 0; step < n; ++step) {
        const ImpactState& cur = window.states().back();
        const double t = cur.t();
        const double w = cur.w();

        FlightArc arc;
        arc.t0 = t;
        arc.A = w + g * t + f.eval_derivative(1, t);
        arc.B = 0.5 * g * t * t + f(t) - arc.A * t;

        const auto pos = [&](double tau) { return arc_position(arc, g, f, tau); };
        const auto vel = [&](double tau) { return arc_velocity(arc, g, f, tau); };

        if (pos(t + kChatterCutoff) <= 0.0)
            throw ChatterError("simulate_continuous: impact gap below chatter cutoff at t=" +
                               std::to_string(t));

        // upper bound on the flight time: x(t+z) <= -g z^2/2 + (w+b1) z + 2 b0
        const double zmax =
            ((w + b1) + std::sqrt(sq(w + b1) + 4.0 * g * b0)) / g + 1.0;
        const double h_max = std::min(1.0 / (64.0 * degree), (2.0 * w / g) / 16.0);

        double prev = t + kChatterCutoff;
        double fprev = pos(prev);
        double h = kChatterCutoff;
        double root = std::numeric_limits<double>::quiet_NaN();
        while (prev < t + zmax) {
            const double next = prev + h;
            const double fnext = pos(next);
            if (fnext <= 0.0) {
                // refine_root expects fun(a) <= 0 <= fun(b); x is falling here
                root = (fnext == 0.0)
                           ? next
                           : refine_root([&](double x) { return -pos(x); },
                                         [&](double x) { return -vel(x); }, prev, next,
                                         -fprev, -fnext, kMarchRootBudget);
                break;
            }
            prev = next;
            fprev = fnext;
            h = std::min(h * 1.4, h_max);
        }
        if (!std::isfinite(root))
            throw ConvergenceError("simulate_continuous: no wall contact before horizon");

        const double w1 = -vel(root);
        if (!(w1 > kChatterCutoff * g))
            throw ChatterError("simulate_continuous: grazing contact at t=" +
                               std::to_string(root));
        arc.t1 = root;
        window.append(ImpactState(root, w1));
    }
    return window;
}

double symplectic_defect(double g, const ForcingFunction& f, const ImpactState& s) {
    const auto image = [&](double t, double E) {
        const ImpactState next = map_forward(g, f, ImpactState(t, std::sqrt(2.0 * E)));
        return std::pair<double, double>{next.t(), next.E()};
    };

    const double t0 = s.t();
    const double E0 = s.E();

    // Richardson-extrapolated central differences along one coordinate axis.
    // Truncation is the binding error: derivatives of the map compound like
    // powers of the per-bounce stretching, so the base step must stay small;
    // 1e-4 balances that against the eps·|t1|/h rounding floor.
    const auto jac_column = [&](double dir_t, double dir_E, double h) {
        const auto central = [&](double step) {
            const auto [tp, Ep] = image(t0 + step * dir_t, E0 + step * dir_E);
            const auto [tm, Em] = image(t0 - step * dir_t, E0 - step * dir_E);
            return std::pair<double, double>{(tp - tm) / (2.0 * step),
                                             (Ep - Em) / (2.0 * step)};
        };
        const auto full = central(h);
        const auto half = central(0.5 * h);
        return std::pair<double, double>{(4.0 * half.first - full.first) / 3.0,
                                         (4.0 * half.second - full.second) / 3.0};
    };

    const auto [dt_dt, dE_dt] = jac_column(1.0, 0.0, 1e-4);
    const auto [dt_dE, dE_dE] = jac_column(0.0, 1.0, 1e-4 * (1.0 + std::abs(E0)));

    return std::abs(dt_dt * dE_dE - dt_dE * dE_dt - 1.0);
}

} // namespace bounce
