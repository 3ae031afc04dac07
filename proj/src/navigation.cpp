#include "dirspike/navigation.hpp"

#include "dirspike/errors.hpp"
#include "dirspike/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dirspike {

Vec2 act(Vec2 u, double S) noexcept {
    const double r = norm(u);
    if (r < S) return {};
    return {u.x / r, u.y / r};
}

Vec2 act(const StateVec& u, double S) {
    if (u.size() != 2) throw UsageError("act: actuator is two-dimensional");
    return act(Vec2{u[0], u[1]}, S);
}

Vec2 tracking_input(Vec2 z, Vec2 z_star, double k1, double eps) noexcept {
    const Vec2 e = z_star - z;
    return (k1 / (eps + norm(e))) * e;
}

Vec2 obstacle_input(Vec2 z, std::span<const Vec2> obstacles, double k2) {
    Vec2 v;
    for (const Vec2& o : obstacles) {
        const Vec2 d = z - o;
        const double d2 = d.x * d.x + d.y * d.y;
        if (d2 < 1e-18) throw NumericalError("robot reached an obstacle center");
        v += (k2 / d2) * d;
    }
    return v;
}

void NavParams::validate() const {
    ctrl.validate();
    if (!(gamma > 0.0)) throw UsageError("gamma must be > 0");
    if (!(alpha_act > 0.0)) throw UsageError("alpha_act must be > 0");
    if (!(S > 0.0)) throw UsageError("S must be > 0");
    if (!(k1 >= 0.0)) throw UsageError("k1 must be >= 0");
    if (!(k2 >= 0.0)) throw UsageError("k2 must be >= 0");
    if (!(eps > 0.0)) throw UsageError("eps must be > 0");
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        if (!std::isfinite(obstacles[i].x) || !std::isfinite(obstacles[i].y)) {
            throw UsageError("obstacle coordinates must be finite");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (obstacles[i] == obstacles[j]) throw UsageError("obstacle points must be distinct");
        }
    }
}

namespace {

struct Deriv {
    Vec2 z, zdot, u;
    double u_s;
};

Deriv field(const RobotState& s, Vec2 z_star, const NavParams& p) {
    const ModelParams& c = p.ctrl;
    const Vec2 v = tracking_input(s.z, z_star, p.k1, p.eps) + obstacle_input(s.z, p.obstacles, p.k2);
    const double r2 = s.u.x * s.u.x + s.u.y * s.u.y;
    const double q = (1.0 + s.u_s) - c.beta1 * r2 + c.beta2 * r2 * r2;
    Deriv d;
    d.z = s.zdot;
    d.zdot = (-p.gamma) * s.zdot + p.alpha_act * act(s.u, p.S);
    d.u = (1.0 / c.tau) * ((-q) * s.u + c.alpha * v);
    d.u_s = (-s.u_s + c.beta3 * r2 * r2) / c.tau_s;
    return d;
}

RobotState advance(const RobotState& s, const Deriv& d, double h) {
    return {s.z + h * d.z, s.zdot + h * d.zdot, s.u + h * d.u, s.u_s + h * d.u_s};
}

bool finite(const RobotState& s) {
    return std::isfinite(s.z.x) && std::isfinite(s.z.y) && std::isfinite(s.zdot.x) && std::isfinite(s.zdot.y) &&
           std::isfinite(s.u.x) && std::isfinite(s.u.y) && std::isfinite(s.u_s);
}

}  // namespace

RobotState step_nav(const RobotState& s, Vec2 z_star, const NavParams& p, double dt, double t) {
    if (!(dt > 0.0) || dt > max_dt(p.ctrl)) throw UsageError("step_nav: dt must lie in (0, tau/20]");

    const Deriv k1 = field(s, z_star, p);
    const Deriv k2 = field(advance(s, k1, 0.5 * dt), z_star, p);
    const Deriv k3 = field(advance(s, k2, 0.5 * dt), z_star, p);
    const Deriv k4 = field(advance(s, k3, dt), z_star, p);
    const double w = dt / 6.0;
    RobotState out;
    out.z = s.z + w * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    out.zdot = s.zdot + w * (k1.zdot + 2.0 * k2.zdot + 2.0 * k3.zdot + k4.zdot);
    out.u = s.u + w * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    out.u_s = s.u_s + w * (k1.u_s + 2.0 * k2.u_s + 2.0 * k3.u_s + k4.u_s);

    if (!finite(out)) throw BlowupError("non-finite robot state", t + dt);
    // Same envelope as the open-loop guard, with |v| in place of alpha |u|.
    const auto [a, b] = lower_bound_witness(p.ctrl);
    const double v_norm = norm(tracking_input(s.z, z_star, p.k1, p.eps) + obstacle_input(s.z, p.obstacles, p.k2));
    const double envelope = std::max(norm(s.u), (b + p.ctrl.alpha * v_norm) / a);
    if (norm(out.u) > 10.0 * envelope) throw BlowupError("controller state exceeded 10x the amplitude bound", t + dt);
    return out;
}

NavResult run_scenario(const NavScenario& sc) {
    const NavParams& p = sc.params;
    p.validate();
    if (!(sc.t_end > 0.0)) throw UsageError("t_end must be > 0");
    if (!(sc.record_dt > 0.0)) throw UsageError("record_dt must be > 0");
    if (!finite(sc.initial)) throw UsageError("initial robot state must be finite");

    const std::size_t samples = sample_count(sc.dt, sc.t_end);
    const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sc.record_dt / sc.dt)));

    NavResult res;
    NavMetrics& m = res.metrics;
    m.min_clearance.assign(p.obstacles.size(), std::numeric_limits<double>::infinity());
    res.samples.reserve(samples / stride + 1);

    std::size_t duty_total = 0;
    std::size_t duty_on = 0;
    RobotState s = sc.initial;
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) * sc.dt;
        const Vec2 z_star = sc.reference(t);
        const Vec2 a = act(s.u, p.S);
        const double err = norm(z_star - s.z);

        if (t >= sc.duty_start) {
            ++duty_total;
            if (a.x != 0.0 || a.y != 0.0) ++duty_on;
        }
        if (t >= sc.transient) m.max_tracking_error_after_transient = std::max(m.max_tracking_error_after_transient, err);
        for (std::size_t i = 0; i < p.obstacles.size(); ++i) {
            m.min_clearance[i] = std::min(m.min_clearance[i], norm(s.z - p.obstacles[i]));
        }
        if (k % stride == 0) {
            res.samples.push_back({t, s, a, z_star});
            m.tracking_error.push_back(err);
        }
        if (k + 1 < samples) s = step_nav(s, z_star, p, sc.dt, t);
    }
    m.duty_cycle = duty_total > 0 ? static_cast<double>(duty_on) / static_cast<double>(duty_total) : 0.0;
    return res;
}

}  // namespace dirspike
