#include "dirspike/model.hpp"

#include "dirspike/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dirspike {

void ModelParams::validate() const {
    const auto fail = [](const std::string& msg) { throw UsageError("ModelParams: " + msg); };
    if (!(tau > 0.0) || !std::isfinite(tau)) fail("tau must be > 0");
    if (!(tau_s > tau) || !std::isfinite(tau_s)) fail("tau_s must exceed tau");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) fail("alpha must be > 0");
    if (!(beta1 > 0.0) || !std::isfinite(beta1)) fail("beta1 must be > 0");
    if (!(beta2 > 0.0) || !std::isfinite(beta2)) fail("beta2 must be > 0");
    if (!(beta3 >= 0.0) || !std::isfinite(beta3)) fail("beta3 must be >= 0");
}

std::optional<std::string> ModelParams::timescale_warning() const {
    if (tau_s / tau < 5.0) {
        std::ostringstream os;
        os << "weak timescale separation: tau_s/tau = " << tau_s / tau << " < 5";
        return os.str();
    }
    return std::nullopt;
}

double potential(double r, double x_s, const ModelParams& p) noexcept {
    const double r2 = r * r;
    return 0.5 * (1.0 + x_s) * r2 - 0.25 * p.beta1 * r2 * r2 + p.beta2 * r2 * r2 * r2 / 6.0;
}

double radial_grad(double r, double x_s, const ModelParams& p) noexcept {
    const double r2 = r * r;
    return ((1.0 + x_s) - p.beta1 * r2 + p.beta2 * r2 * r2) * r;
}

void full_grad_into(std::span<const double> x, double x_s, const ModelParams& p,
                    std::span<double> out) noexcept {
    const double r2 = inner(x, x);
    const double factor = (1.0 + x_s) - p.beta1 * r2 + p.beta2 * r2 * r2;
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = factor * x[i];
    }
}

StateVec full_grad(const StateVec& x, double x_s, const ModelParams& p) {
    StateVec out(x.size());
    full_grad_into(x.entries(), x_s, p, out.entries());
    return out;
}

double g_eval(double r, const ModelParams& p) noexcept {
    const double r2 = r * r;
    return p.beta3 * r2 * r2;
}

PitchforkWindow pitchfork_thresholds(const ModelParams& p) {
    if (p.beta1 * p.beta1 <= 4.0 * p.beta2) {
        throw UsageError("no subcritical window: beta1^2 <= 4 beta2");
    }
    return {-1.0, p.beta1 * p.beta1 / (4.0 * p.beta2) - 1.0};
}

LowerBoundWitness lower_bound_witness(const ModelParams& p) noexcept {
    // min over r of beta2 r^5 - beta1 r^3 sits at r^2 = 3 beta1 / (5 beta2).
    const double s = 3.0 * p.beta1 / (5.0 * p.beta2);
    return {1.0, 0.4 * p.beta1 * std::pow(s, 1.5)};
}

Assumption1Report check_assumption1(const ModelParams& p, double r_max, double x_s_max) {
    if (!(r_max > 0.0)) throw UsageError("check_assumption1: r_max must be > 0");
    if (!(x_s_max >= 0.0)) throw UsageError("check_assumption1: x_s_max must be >= 0");

    const auto [a, b] = lower_bound_witness(p);
    Assumption1Report rep;
    rep.a = a;
    rep.b = b;
    const double r4 = r_max * r_max * r_max * r_max;
    rep.h_at_rmax = (1.0 + x_s_max) + p.beta2 * r4;
    rep.holds = true;

    constexpr int kRPoints = 2001;
    constexpr int kXsPoints = 201;
    for (int j = 0; j < kXsPoints; ++j) {
        const double x_s = x_s_max * j / (kXsPoints - 1);
        for (int i = 0; i < kRPoints; ++i) {
            const double r = r_max * i / (kRPoints - 1);
            const double grad = radial_grad(r, x_s, p);
            // Slack for rounding in the polynomial evaluation.
            const double slack = 1e-12 * (1.0 + std::abs(grad) + p.beta2 * r4 * r_max);
            const bool lower_ok = a * r - b <= grad + slack;
            const bool upper_ok = grad <= rep.h_at_rmax * r + slack;
            if (!(lower_ok && upper_ok)) {
                rep.holds = false;
                rep.violation_r = r;
                rep.violation_x_s = x_s;
                return rep;
            }
        }
    }
    return rep;
}

namespace {

// dV/dr = r q(r) with q(r) = (1 + x_s) - beta1 r^2 + beta2 r^4.
double radial_factor(double r, double x_s, const ModelParams& p) noexcept {
    const double r2 = r * r;
    return (1.0 + x_s) - p.beta1 * r2 + p.beta2 * r2 * r2;
}

double radial_curvature(double r, double x_s, const ModelParams& p) noexcept {
    const double r2 = r * r;
    return (1.0 + x_s) - 3.0 * p.beta1 * r2 + 5.0 * p.beta2 * r2 * r2;
}

double bisect_factor(double lo, double hi, double x_s, const ModelParams& p) {
    double flo = radial_factor(lo, x_s, p);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = radial_factor(mid, x_s, p);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> positive_roots(double x_s, const ModelParams& p) {
    const double c = std::abs(1.0 + x_s);
    const double r_hi =
        1.1 * std::sqrt((p.beta1 + std::sqrt(p.beta1 * p.beta1 + 4.0 * p.beta2 * c)) / (2.0 * p.beta2)) +
        1e-3;
    constexpr int kScan = 20000;
    std::vector<double> roots;
    double prev_r = 0.0;
    double prev_f = radial_factor(0.0, x_s, p);
    for (int i = 1; i <= kScan; ++i) {
        const double r = r_hi * i / kScan;
        const double f = radial_factor(r, x_s, p);
        if (f == 0.0) {
            roots.push_back(r);
        } else if (prev_f != 0.0 && (f < 0.0) != (prev_f < 0.0)) {
            roots.push_back(bisect_factor(prev_r, r, x_s, p));
        }
        prev_r = r;
        prev_f = f;
    }
    return roots;
}

// Minimum over s = r^2 >= 0 of q, found by golden-section search.
double min_radial_factor(double x_s, const ModelParams& p) {
    double lo = 0.0;
    double hi = 2.0 * p.beta1 / p.beta2 + 1.0;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    const auto q = [&](double s) { return (1.0 + x_s) - p.beta1 * s + p.beta2 * s * s; };
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = q(c);
    double fd = q(d);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = q(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = q(d);
        }
    }
    return std::min({q(lo), q(hi), q(0.0)});
}

double locate_upper_threshold(const ModelParams& p, double start) {
    double lo = start;
    double step = 1.0;
    double hi = lo + step;
    while (min_radial_factor(hi, p) < 0.0) {
        lo = hi;
        step *= 2.0;
        hi = lo + step;
        if (step > 1e12) throw NumericalError("upper pitchfork threshold not bracketed");
    }
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (min_radial_factor(mid, p) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Assumption2Report check_assumption2(const ModelParams& p, const std::vector<double>& x_s_grid) {
    if (x_s_grid.empty()) throw UsageError("check_assumption2: empty x_s grid");
    if (!std::is_sorted(x_s_grid.begin(), x_s_grid.end())) {
        throw UsageError("check_assumption2: x_s grid must be sorted");
    }

    Assumption2Report rep;
    rep.window = pitchfork_thresholds(p);
    rep.counts_ok = true;
    constexpr double kBoundary = 1e-9;

    for (double x_s : x_s_grid) {
        Assumption2Entry e;
        e.x_s = x_s;
        e.equilibria.push_back({0.0, radial_curvature(0.0, x_s, p) > 0.0});
        for (double r : positive_roots(x_s, p)) {
            const bool stable = radial_curvature(r, x_s, p) > 0.0;
            e.equilibria.push_back({r, stable});
            e.equilibria.push_back({-r, stable});
        }
        std::sort(e.equilibria.begin(), e.equilibria.end(),
                  [](const auto& l, const auto& r) { return l.r < r.r; });
        e.stable_count = static_cast<int>(std::count_if(
            e.equilibria.begin(), e.equilibria.end(), [](const auto& q) { return q.stable; }));

        if (std::abs(x_s - rep.window.lower) < kBoundary || std::abs(x_s - rep.window.upper) < kBoundary) {
            e.expected_stable_count = 0;
            e.ok = true;
        } else {
            e.expected_stable_count = x_s < rep.window.lower ? 2 : (x_s < rep.window.upper ? 3 : 1);
            e.ok = e.stable_count == e.expected_stable_count;
            // Below the window the origin must be the unstable one.
            if (x_s < rep.window.lower) e.ok = e.ok && !e.equilibria[e.equilibria.size() / 2].stable;
        }
        rep.counts_ok = rep.counts_ok && e.ok;
        rep.entries.push_back(std::move(e));
    }

    rep.r_star_monotone = true;
    std::optional<double> prev_r_star;
    std::optional<double> prev_x_s;
    for (const auto& e : rep.entries) {
        if (e.x_s <= rep.window.lower + kBoundary || e.x_s >= rep.window.upper - kBoundary) continue;
        if (prev_x_s && e.x_s == *prev_x_s) continue;
        prev_x_s = e.x_s;
        double r_star = 0.0;
        for (const auto& q : e.equilibria) {
            if (q.stable && q.r > r_star) r_star = q.r;
        }
        if (prev_r_star && !(r_star < *prev_r_star)) rep.r_star_monotone = false;
        prev_r_star = r_star;
    }

    rep.x_s_upper_numeric = locate_upper_threshold(p, rep.window.lower);
    return rep;
}

}  // namespace dirspike
