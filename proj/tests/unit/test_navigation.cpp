#include "dirspike/errors.hpp"
#include "dirspike/navigation.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace dirspike;
using Catch::Matchers::WithinAbs;

namespace {

NavScenario tracking_only() { return NavScenario{}; }

NavScenario with_obstacles() {
    NavScenario sc;
    sc.params.k2 = 1.3;
    for (double t : {150.0, 300.0, 450.0}) sc.params.obstacles.push_back(sc.reference(t));
    return sc;
}

Vec2 rotate(Vec2 v, double phi) {
    return {std::cos(phi) * v.x - std::sin(phi) * v.y, std::sin(phi) * v.x + std::cos(phi) * v.y};
}

double max_error_between(const NavResult& res, double t0, double t1) {
    double m = 0.0;
    for (std::size_t k = 0; k < res.samples.size(); ++k) {
        if (res.samples[k].t >= t0 && res.samples[k].t <= t1) m = std::max(m, res.metrics.tracking_error[k]);
    }
    return m;
}

}  // namespace

TEST_CASE("all-or-none actuator", "[navigation]") {
    CHECK(act(Vec2{0, 0}, 0.9) == Vec2{0, 0});
    CHECK(act(Vec2{0, 2}, 0.9) == Vec2{0, 1});
    CHECK(act(Vec2{0.9, 0}, 0.9) == Vec2{1, 0});
    CHECK(act(Vec2{0.5, 0.5}, 0.9) == Vec2{0, 0});
    CHECK(act(StateVec{0, 2}, 0.9) == Vec2{0, 1});
    CHECK_THROWS_AS(act(StateVec{0, 2, 0}, 0.9), UsageError);
}

TEST_CASE("tracking input", "[navigation]") {
    CHECK(tracking_input(Vec2{1, 2}, Vec2{1, 2}, 0.4, 0.1) == Vec2{0, 0});
    const auto v = tracking_input(Vec2{0, 0}, Vec2{3, 4}, 0.4, 0.1);
    CHECK_THAT(v.x, WithinAbs(0.4 * 3 / 5.1, 1e-15));
    CHECK_THAT(v.y, WithinAbs(0.4 * 4 / 5.1, 1e-15));
    CHECK_THAT(v.x, WithinAbs(0.2353, 1e-4));
    CHECK_THAT(v.y, WithinAbs(0.3137, 1e-4));
    const auto far = tracking_input(Vec2{0, 0}, Vec2{1e7, -1e7}, 0.4, 0.1);
    CHECK(norm(far) < 0.4);
    CHECK_THAT(norm(far), WithinAbs(0.4, 1e-8));
}

TEST_CASE("obstacle input", "[navigation]") {
    CHECK(obstacle_input(Vec2{3, 3}, {}, 1.3) == Vec2{0, 0});
    const std::vector<Vec2> origin{{0, 0}};
    const auto v = obstacle_input(Vec2{2, 0}, origin, 1.3);
    CHECK_THAT(v.x, WithinAbs(0.65, 1e-15));
    CHECK(v.y == 0.0);
    const std::vector<Vec2> pair{{0, 1}, {0, -1}};
    const auto s = obstacle_input(Vec2{1, 0}, pair, 1.3);
    CHECK(s.x > 0.0);
    CHECK(s.y == 0.0);
    CHECK_THROWS_AS(obstacle_input(Vec2{0, 0}, origin, 1.3), NumericalError);
}

TEST_CASE("navigation parameters are validated", "[navigation]") {
    NavParams p;
    CHECK_NOTHROW(p.validate());
    p.eps = 0.0;
    CHECK_THROWS_AS(p.validate(), UsageError);
    p = NavParams{};
    p.obstacles = {{1, 1}, {1, 1}};
    CHECK_THROWS_AS(p.validate(), UsageError);
}

TEST_CASE("robot at its target with a silent controller stays put", "[navigation]") {
    const NavParams p;
    RobotState s;
    s.z = {3, -4};
    const auto next = step_nav(s, Vec2{3, -4}, p, 2e-4);
    CHECK(next.z == s.z);
    CHECK(next.zdot == Vec2{0, 0});
    CHECK(next.u == Vec2{0, 0});
    CHECK(next.u_s == 0.0);
    CHECK_THROWS_AS(step_nav(s, Vec2{3, -4}, p, 1e-3), UsageError);
}

TEST_CASE("without actuation the velocity decays by drag", "[navigation]") {
    // A silent controller keeps the actuator off, which is the same plant as
    // alpha_act = 0.
    NavParams p;
    p.k1 = 0.0;
    RobotState s;
    s.zdot = {1.0, -0.5};
    const double dt = 2e-4;
    for (int k = 0; k < 5000; ++k) s = step_nav(s, Vec2{0, 0}, p, dt);
    CHECK_THAT(s.zdot.x, WithinAbs(std::exp(-1.0), 1e-12));
    CHECK_THAT(s.zdot.y, WithinAbs(-0.5 * std::exp(-1.0), 1e-12));
    CHECK_THAT(s.z.x, WithinAbs(1.0 - std::exp(-1.0), 1e-12));
}

TEST_CASE("tracking scenario", "[navigation]") {
    const auto res = run_scenario(tracking_only());
    const auto& m = res.metrics;
    CHECK(m.duty_cycle > 0.05);
    CHECK(m.duty_cycle < 0.95);
    // regression bound frozen from the validated pilot run (0.4165)
    CHECK(m.max_tracking_error_after_transient <= 0.5);
    CHECK(m.min_clearance.empty());
    REQUIRE(res.samples.size() == 6001);
    CHECK(res.samples.back().t == Catch::Approx(600.0));

    for (const auto& s : res.samples) {
        const double a = norm(s.act);
        CHECK((a == 0.0 || std::abs(a - 1.0) < 1e-15));
    }
    // Pulses point toward the target.
    for (const auto& s : res.samples) {
        if (s.t < 100.0 || norm(s.act) == 0.0) continue;
        const Vec2 e = s.z_star - s.state.z;
        CHECK((e.x * s.act.x + e.y * s.act.y) / norm(e) > 0.7);
    }
}

TEST_CASE("obstacle scenario", "[navigation]") {
    const auto res = run_scenario(with_obstacles());
    const auto& m = res.metrics;
    REQUIRE(m.min_clearance.size() == 3);
    for (double c : m.min_clearance) CHECK(c > 0.5);
    CHECK(m.duty_cycle > 0.05);
    CHECK(m.duty_cycle < 0.95);
    // regression bound frozen from the validated pilot run (56.01); the robot
    // waits behind the last obstacle until the reference has passed it
    CHECK(m.max_tracking_error_after_transient <= 60.0);
    // tracking is regained between the second and third obstacle (pilot 0.649)
    CHECK(max_error_between(res, 340.0, 420.0) <= 1.0);
}

TEST_CASE("zero tracking gain leaves the robot at the origin", "[navigation]") {
    auto sc = tracking_only();
    sc.params.k1 = 0.0;
    sc.t_end = 50.0;
    const auto res = run_scenario(sc);
    CHECK(res.metrics.duty_cycle == 0.0);
    for (const auto& s : res.samples) {
        CHECK(s.state.z == Vec2{0, 0});
        CHECK(norm(s.state.u) == 0.0);
    }
}

TEST_CASE("duty cycle falls as the actuation threshold rises", "[navigation][property]") {
    double prev = 1.0;
    for (double S : {0.5, 0.7, 0.9}) {
        auto sc = tracking_only();
        sc.params.S = S;
        const double duty = run_scenario(sc).metrics.duty_cycle;
        CHECK(duty < prev);
        prev = duty;
    }
}

TEST_CASE("empty obstacle list reproduces the tracking run exactly", "[navigation][property]") {
    auto sc = with_obstacles();
    sc.params.obstacles.clear();
    const auto a = run_scenario(tracking_only());
    const auto b = run_scenario(sc);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        CHECK(a.samples[k].state.z == b.samples[k].state.z);
        CHECK(a.samples[k].state.u == b.samples[k].state.u);
        CHECK(a.samples[k].state.u_s == b.samples[k].state.u_s);
    }
    CHECK(a.metrics.duty_cycle == b.metrics.duty_cycle);
}

TEST_CASE("closed loop is rotation equivariant", "[navigation][property]") {
    // Over the full horizon, rounding-level differences eventually flip the
    // actuator indicator at a threshold crossing; 200 time units cover the
    // start-up, the first avoidance and the recovery.
    const double phi = 0.7;
    auto base = with_obstacles();
    base.t_end = 200.0;
    auto turned = base;
    turned.reference.phase += phi;
    for (auto& o : turned.params.obstacles) o = rotate(o, phi);
    const auto a = run_scenario(base);
    const auto b = run_scenario(turned);
    double err = 0.0;
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        err = std::max(err, norm(rotate(a.samples[k].state.z, phi) - b.samples[k].state.z));
        err = std::max(err, norm(rotate(a.samples[k].state.u, phi) - b.samples[k].state.u));
    }
    CHECK(err <= 1e-6);
}
