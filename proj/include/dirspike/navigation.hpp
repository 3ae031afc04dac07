#pragma once

#include "dirspike/model.hpp"
#include "dirspike/vector_space.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace dirspike {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(Vec2 o) noexcept {
        x += o.x;
        y += o.y;
        return *this;
    }
    friend Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2, Vec2) = default;
};

[[nodiscard]] inline double norm(Vec2 v) noexcept { return std::hypot(v.x, v.y); }

/// All-or-none actuator: u/|u| when |u| >= S, zero otherwise.
[[nodiscard]] Vec2 act(Vec2 u, double S) noexcept;
/// Same map for a 2-D StateVec; throws UsageError for other dimensions.
[[nodiscard]] Vec2 act(const StateVec& u, double S);

/// k1 (z* - z) / (eps + |z* - z|)
[[nodiscard]] Vec2 tracking_input(Vec2 z, Vec2 z_star, double k1, double eps) noexcept;

/// k2 sum_i (z - z_i) / |z - z_i|^2. Throws NumericalError when z is within
/// 1e-9 of an obstacle.
[[nodiscard]] Vec2 obstacle_input(Vec2 z, std::span<const Vec2> obstacles, double k2);

struct NavParams {
    double gamma = 1.0;
    double alpha_act = 3.0;
    double S = 0.9;
    double k1 = 0.4;
    double k2 = 0.0;
    double eps = 0.1;
    std::vector<Vec2> obstacles;
    /// The controller input enters without gain, so alpha is 1 here.
    ModelParams ctrl{.tau = 0.01, .tau_s = 1.0, .alpha = 1.0, .beta1 = 3.0, .beta2 = 1.5, .beta3 = 1.5};

    /// Throws UsageError on invalid gains or repeated obstacle points.
    void validate() const;
};

struct RobotState {
    Vec2 z;
    Vec2 zdot;
    Vec2 u;  // controller fast state
    double u_s = 0.0;
};

/// Spiral reference z*(t) = (radius0 + radius_rate t)(cos th, sin th) with
/// th = omega t + phase.
struct ReferencePath {
    double radius0 = 20.0;
    double radius_rate = 1.0 / 25.0;
    double omega = 1.0 / 100.0;
    double phase = std::numbers::pi / 4.0;

    [[nodiscard]] Vec2 operator()(double t) const noexcept {
        const double rho = radius0 + radius_rate * t;
        const double th = omega * t + phase;
        return {rho * std::cos(th), rho * std::sin(th)};
    }
};

/// One RK4 step of the coupled plant/controller system. The actuator is
/// evaluated at every stage; the reference point is held over the step.
/// Throws UsageError when dt > ctrl.tau/20 and BlowupError on runaway states.
[[nodiscard]] RobotState step_nav(const RobotState& s, Vec2 z_star, const NavParams& p, double dt, double t = 0.0);

struct NavScenario {
    NavParams params;
    ReferencePath reference;
    RobotState initial;
    double t_end = 600.0;
    double dt = 2e-4;
    /// Spacing of recorded samples (rounded to a whole number of steps).
    double record_dt = 0.1;
    /// Duty cycle ignores the controller start-up before this time.
    double duty_start = 10.0;
    /// Tracking error is judged only after this time.
    double transient = 100.0;
};

struct NavSample {
    double t = 0.0;
    RobotState state;
    Vec2 act;
    Vec2 z_star;
};

struct NavMetrics {
    double duty_cycle = 0.0;
    /// |z* - z| at the recorded samples.
    std::vector<double> tracking_error;
    double max_tracking_error_after_transient = 0.0;
    /// Smallest distance to each obstacle over every integration step.
    std::vector<double> min_clearance;
};

struct NavResult {
    std::vector<NavSample> samples;
    NavMetrics metrics;
};

[[nodiscard]] NavResult run_scenario(const NavScenario& sc);

}  // namespace dirspike
