#include "bounce/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bounce {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Relative node spread below which divided differences switch to the
// Taylor form. Keeps both branches within 1e-10 of each other for
// coefficient magnitudes up to ~10.
constexpr double kDdSwitch = 1e-4;

// Extra Taylor terms kept past the leading one in the confluent branch.
constexpr int kDdTaylorTerms = 6;

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

} // namespace

TrigPoly::TrigPoly(double mean, std::vector<Harmonic> harmonics)
    : mean_(mean), harms_(std::move(harmonics)) {
    // Trailing zero harmonics only inflate the degree and every sup bound.
    while (!harms_.empty() && harms_.back().a == 0.0 && harms_.back().b == 0.0)
        harms_.pop_back();
}

double TrigPoly::derivative_value(int order, double t) const {
    if (order < 0) throw std::invalid_argument("TrigPoly: negative derivative order");
    double acc = (order == 0) ? mean_ : 0.0;
    for (std::size_t idx = 0; idx < harms_.size(); ++idx) {
        const double w = kTwoPi * static_cast<double>(idx + 1);
        // Differentiating a cos(wt) + b sin(wt) rotates (a, b) -> (w b, -w a).
        double a = harms_[idx].a;
        double b = harms_[idx].b;
        for (int m = 0; m < order; ++m) {
            const double na = w * b;
            const double nb = -w * a;
            a = na;
            b = nb;
        }
        if (a != 0.0 || b != 0.0) acc += a * std::cos(w * t) + b * std::sin(w * t);
    }
    return acc;
}

TrigPoly TrigPoly::derivative() const {
    std::vector<Harmonic> d(harms_.size());
    for (std::size_t idx = 0; idx < harms_.size(); ++idx) {
        const double w = kTwoPi * static_cast<double>(idx + 1);
        d[idx].a = w * harms_[idx].b;
        d[idx].b = -w * harms_[idx].a;
    }
    return TrigPoly(0.0, std::move(d));
}

TrigPoly TrigPoly::operator*(const TrigPoly& other) const {
    const int J1 = degree();
    const int J2 = other.degree();
    double mean_acc = mean_ * other.mean_;
    std::vector<Harmonic> out(static_cast<std::size_t>(std::max(0, J1 + J2)));

    auto add_cos = [&](int m, double c) {
        if (m == 0) { mean_acc += c; return; }
        out[static_cast<std::size_t>(std::abs(m)) - 1].a += c;
    };
    auto add_sin = [&](int m, double c) {
        if (m == 0) return;
        if (m > 0) out[static_cast<std::size_t>(m) - 1].b += c;
        else out[static_cast<std::size_t>(-m) - 1].b -= c;
    };

    // mean x harmonic cross terms
    for (int j = 1; j <= J2; ++j) {
        add_cos(j, mean_ * other.harms_[j - 1].a);
        add_sin(j, mean_ * other.harms_[j - 1].b);
    }
    for (int i = 1; i <= J1; ++i) {
        add_cos(i, other.mean_ * harms_[i - 1].a);
        add_sin(i, other.mean_ * harms_[i - 1].b);
    }

    // harmonic x harmonic: product-to-sum
    for (int i = 1; i <= J1; ++i) {
        const double ai = harms_[i - 1].a, bi = harms_[i - 1].b;
        for (int j = 1; j <= J2; ++j) {
            const double aj = other.harms_[j - 1].a, bj = other.harms_[j - 1].b;
            const int s = i + j, d = i - j;
            // cos_i cos_j = (cos d + cos s)/2
            add_cos(d, 0.5 * ai * aj);
            add_cos(s, 0.5 * ai * aj);
            // sin_i sin_j = (cos d - cos s)/2
            add_cos(d, 0.5 * bi * bj);
            add_cos(s, -0.5 * bi * bj);
            // cos_i sin_j = (sin s - sin d)/2
            add_sin(s, 0.5 * ai * bj);
            add_sin(d, -0.5 * ai * bj);
            // sin_i cos_j = (sin s + sin d)/2
            add_sin(s, 0.5 * bi * aj);
            add_sin(d, 0.5 * bi * aj);
        }
    }
    return TrigPoly(mean_acc, std::move(out));
}

double TrigPoly::integral(double t0, double t1) const {
    double acc = mean_ * (t1 - t0);
    for (std::size_t idx = 0; idx < harms_.size(); ++idx) {
        const double w = kTwoPi * static_cast<double>(idx + 1);
        const double a = harms_[idx].a, b = harms_[idx].b;
        if (a == 0.0 && b == 0.0) continue;
        acc += (a * (std::sin(w * t1) - std::sin(w * t0))
                - b * (std::cos(w * t1) - std::cos(w * t0))) / w;
    }
    return acc;
}

double TrigPoly::sup_bound(int order) const {
    if (order < 0) throw std::invalid_argument("TrigPoly: negative derivative order");
    double acc = (order == 0) ? std::abs(mean_) : 0.0;
    for (std::size_t idx = 0; idx < harms_.size(); ++idx) {
        const double w = kTwoPi * static_cast<double>(idx + 1);
        acc += std::pow(w, order) * (std::abs(harms_[idx].a) + std::abs(harms_[idx].b));
    }
    return acc;
}

double TrigPoly::divided_difference(std::span<const double> nodes) const {
    const int n = static_cast<int>(nodes.size());
    if (n < 1 || n > 8)
        throw std::invalid_argument("TrigPoly::divided_difference: 1..8 nodes supported");
    if (n == 1) return derivative_value(0, nodes[0]);

    std::vector<double> s(nodes.begin(), nodes.end());
    std::sort(s.begin(), s.end());
    const double spread = s.back() - s.front();
    const double scale = std::max(1.0, std::abs(s.front()) + std::abs(s.back()));

    if (spread < kDdSwitch * scale) {
        // Taylor form about the centroid: for p(t) = Σ_k c_k (t-c)^k,
        //   p[x_0..x_{n-1}] = Σ_{k>=n-1} c_k h_{k-(n-1)}(x_i - c)
        // with h_j the complete homogeneous symmetric polynomial.
        double c = 0.0;
        for (double x : s) c += x;
        c /= n;

        std::vector<double> h(kDdTaylorTerms + 1, 0.0);
        h[0] = 1.0;
        for (double x : s) {
            const double u = x - c;
            for (int j = 1; j <= kDdTaylorTerms; ++j) h[j] += u * h[j - 1];
        }
        double acc = 0.0;
        for (int j = 0; j <= kDdTaylorTerms; ++j) {
            const int k = (n - 1) + j;
            acc += derivative_value(k, c) / factorial(k) * h[j];
        }
        return acc;
    }

    const double lo = divided_difference(std::span<const double>(s.data(), s.size() - 1));
    const double hi = divided_difference(std::span<const double>(s.data() + 1, s.size() - 1));
    return (hi - lo) / spread;
}

ForcingFunction::ForcingFunction(TrigPoly poly) : f_(std::move(poly)) {
    const TrigPoly fdot = f_.derivative();
    fdot_sq_ = fdot * fdot;
}

ForcingFunction::ForcingFunction(double mean_offset, std::vector<Harmonic> harmonics)
    : ForcingFunction(TrigPoly(mean_offset, std::move(harmonics))) {}

double ForcingFunction::eval_derivative(int order, double t) const {
    if (order < 0 || order > 4)
        throw std::invalid_argument("ForcingFunction::eval_derivative: order must be in 0..4");
    return f_.derivative_value(order, t);
}

double ForcingFunction::definite_integral(double t0, double t1) const {
    return f_.integral(t0, t1);
}

double ForcingFunction::velocity_square_integral(double t0, double t1) const {
    return fdot_sq_.integral(t0, t1);
}

double ForcingFunction::divided_difference(std::span<const double> nodes) const {
    if (nodes.size() < 2 || nodes.size() > 4)
        throw std::invalid_argument("ForcingFunction::divided_difference: 2..4 nodes supported");
    return f_.divided_difference(nodes);
}

double ForcingFunction::slope(double t0, double t1) const {
    const double n[2] = {t0, t1};
    return f_.divided_difference(n);
}

double ForcingFunction::sup_bound(int order) const {
    if (order < 0 || order > 4)
        throw std::invalid_argument("ForcingFunction::sup_bound: order must be in 0..4");
    return f_.sup_bound(order);
}

} // namespace bounce
