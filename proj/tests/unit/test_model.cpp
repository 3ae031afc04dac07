#include "dirspike/errors.hpp"
#include "dirspike/model.hpp"
#include "helpers.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace dirspike;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ModelParams type1() { return ModelParams{.tau = 0.1, .tau_s = 3.0, .alpha = 0.1, .beta1 = 3.0, .beta2 = 1.5, .beta3 = 1.5}; }

// V(r, x_s) written out independently of the library.
double v_ref(double r, double x_s, double b1, double b2) {
    return 0.5 * (1 + x_s) * r * r - 0.25 * b1 * std::pow(r, 4) + b2 * std::pow(r, 6) / 6.0;
}

}  // namespace

TEST_CASE("parameter validation", "[model]") {
    CHECK_NOTHROW(type1().validate());
    auto p = type1();
    p.tau_s = p.tau;
    CHECK_THROWS_AS(p.validate(), UsageError);
    p = type1();
    p.beta2 = 0.0;
    CHECK_THROWS_AS(p.validate(), UsageError);
    p = type1();
    p.alpha = -1.0;
    CHECK_THROWS_AS(p.validate(), UsageError);
    p = type1();
    p.beta3 = -0.1;
    CHECK_THROWS_AS(p.validate(), UsageError);
}

TEST_CASE("weak timescale separation produces a warning", "[model]") {
    auto p = type1();
    CHECK_FALSE(p.timescale_warning().has_value());
    p.tau_s = 0.4;
    CHECK(p.timescale_warning().has_value());
}

TEST_CASE("radial gradient values", "[model]") {
    const auto p = type1();
    CHECK(radial_grad(0.0, 7.0, p) == 0.0);
    CHECK_THAT(radial_grad(1.0, 0.0, p), WithinAbs(-0.5, 1e-15));
    CHECK_THAT(radial_grad(1.0, 0.5, p), WithinAbs(0.0, 1e-15));
}

TEST_CASE("radial gradient is odd in r", "[model][property]") {
    const auto p = type1();
    for (double r = 0.0; r <= 3.0; r += 0.05) {
        for (double xs : {-2.0, 0.0, 0.7, 4.0}) CHECK(radial_grad(-r, xs, p) == -radial_grad(r, xs, p));
    }
}

TEST_CASE("radial gradient matches finite differences of the potential", "[model][property]") {
    const auto p = type1();
    const double h = 1e-5;
    for (double r = 0.0; r <= 3.0 + 1e-12; r += 0.05) {
        for (double xs = 0.0; xs <= 5.0 + 1e-12; xs += 0.25) {
            const double fd = (v_ref(r + h, xs, p.beta1, p.beta2) - v_ref(r - h, xs, p.beta1, p.beta2)) / (2 * h);
            CHECK_THAT(radial_grad(r, xs, p), WithinAbs(fd, 1e-6));
            CHECK_THAT(potential(r, xs, p), WithinAbs(v_ref(r, xs, p.beta1, p.beta2), 1e-9));
        }
    }
}

TEST_CASE("full gradient values", "[model]") {
    const auto p = type1();
    CHECK(full_grad(StateVec{0, 0}, 3.0, p) == StateVec{0, 0});
    const auto g = full_grad(StateVec{1, 0}, 0.0, p);
    CHECK_THAT(g[0], WithinAbs(-0.5, 1e-15));
    CHECK(g[1] == 0.0);
}

TEST_CASE("full gradient equals the chain-rule form away from the origin", "[model][property]") {
    const auto p = type1();
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> xs(0.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 7;
        const auto x = testing::gaussian_vec(n, rng, 0.8);
        const double s = xs(rng);
        const double r = norm(x);
        const auto chain = (radial_grad(r, s, p) / r) * x;
        CHECK(testing::max_abs_diff(full_grad(x, s, p), chain) <= 1e-12 * (1.0 + norm(chain)));
    }
}

TEST_CASE("full gradient matches finite differences in random directions", "[model][property]") {
    const auto p = type1();
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> xs(0.0, 3.0);
    const double h = 1e-5;
    for (std::size_t n : {2u, 5u}) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto x = testing::gaussian_vec(n, rng, 0.7);
            auto d = testing::gaussian_vec(n, rng);
            d *= 1.0 / norm(d);
            const double s = xs(rng);
            const double fd = (potential(norm(x + h * d), s, p) - potential(norm(x - h * d), s, p)) / (2 * h);
            CHECK_THAT(inner(full_grad(x, s, p), d), WithinAbs(fd, 1e-6));
        }
    }
}

TEST_CASE("full gradient is rotation equivariant", "[model][property]") {
    const auto p = type1();
    std::mt19937_64 rng(23);
    for (std::size_t n : {2u, 3u, 6u}) {
        for (int trial = 0; trial < 30; ++trial) {
            const auto q = testing::random_orthogonal(n, rng);
            const auto x = testing::gaussian_vec(n, rng, 0.8);
            const auto lhs = full_grad(testing::apply(q, x), 0.3, p);
            const auto rhs = testing::apply(q, full_grad(x, 0.3, p));
            CHECK(testing::max_abs_diff(lhs, rhs) <= 1e-12 * (1.0 + norm(rhs)));
        }
    }
}

TEST_CASE("adaptation function values", "[model]") {
    auto p = type1();
    CHECK(g_eval(0.0, p) == 0.0);
    CHECK(g_eval(1.0, p) == 1.5);
    p.beta3 = 5.0;
    CHECK(g_eval(2.0, p) == 80.0);
}

TEST_CASE("pitchfork window", "[model]") {
    const auto w = pitchfork_thresholds(type1());
    CHECK(w.lower == -1.0);
    CHECK_THAT(w.upper, WithinAbs(0.5, 1e-15));
    auto p = type1();
    p.beta1 = 2.0;
    p.beta2 = 1.0;
    CHECK_THROWS_AS(pitchfork_thresholds(p), UsageError);
}

TEST_CASE("outer equilibria at x_s = 0 come from the quadratic in r^2", "[model]") {
    const auto p = type1();
    const double r_hi = std::sqrt((3.0 + std::sqrt(3.0)) / 3.0);
    const double r_lo = std::sqrt((3.0 - std::sqrt(3.0)) / 3.0);
    CHECK_THAT(r_hi, WithinAbs(1.2559, 1e-4));
    CHECK_THAT(r_lo, WithinAbs(0.6501, 1e-4));
    CHECK_THAT(radial_grad(r_hi, 0.0, p), WithinAbs(0.0, 1e-13));
    CHECK_THAT(radial_grad(r_lo, 0.0, p), WithinAbs(0.0, 1e-13));
    // sign changes confirm one root in each bracket
    CHECK(radial_grad(1.2, 0.0, p) < 0.0);
    CHECK(radial_grad(1.3, 0.0, p) > 0.0);
    CHECK(radial_grad(0.6, 0.0, p) > 0.0);
    CHECK(radial_grad(0.7, 0.0, p) < 0.0);
}

TEST_CASE("linear lower bound witness", "[model]") {
    const auto p = type1();
    const auto w = lower_bound_witness(p);
    CHECK(w.a == 1.0);
    CHECK_THAT(w.b, WithinAbs(1.5775, 1e-4));

    // Oracle: brute-force minimum of the gap dV/dr - r over r >= 0.
    double best = 1e300;
    double arg = 0.0;
    for (int i = 0; i <= 300000; ++i) {
        const double r = 3.0 * i / 300000.0;
        const double gap = radial_grad(r, 0.0, p) - r;
        if (gap < best) {
            best = gap;
            arg = r;
        }
    }
    CHECK_THAT(-best, WithinAbs(w.b, 1e-9));
    CHECK_THAT(arg, WithinAbs(1.0954, 1e-4));
}

TEST_CASE("sector bound holds on the reference box", "[model]") {
    for (double b3 : {1.5, 5.0}) {
        auto p = type1();
        p.beta3 = b3;
        const auto rep = check_assumption1(p, 5.0, 10.0);
        CHECK(rep.holds);
        CHECK(rep.a == 1.0);
        CHECK_THAT(rep.b, WithinAbs(1.5775, 1e-4));
        CHECK_THAT(rep.h_at_rmax, WithinAbs(11.0 + 1.5 * 625.0, 1e-9));
        CHECK_FALSE(rep.violation_r.has_value());
    }
    CHECK_THROWS_AS(check_assumption1(type1(), 0.0, 1.0), UsageError);
}

TEST_CASE("three-regime pitchfork structure", "[model]") {
    const auto p = type1();
    std::vector<double> grid;
    for (int i = 0; i <= 200; ++i) grid.push_back(-2.0 + 0.02 * i);
    const auto rep = check_assumption2(p, grid);
    CHECK(rep.holds());
    CHECK_THAT(rep.x_s_upper_numeric, WithinAbs(0.5, 1e-9));

    const auto at = [&](double xs) {
        return *std::find_if(rep.entries.begin(), rep.entries.end(),
                             [&](const Assumption2Entry& e) { return std::abs(e.x_s - xs) < 1e-9; });
    };
    const auto below = at(-2.0);
    CHECK(below.stable_count == 2);
    const auto mid = at(0.0);
    CHECK(mid.stable_count == 3);
    std::vector<double> stable_r;
    for (const auto& e : mid.equilibria) {
        if (e.stable) stable_r.push_back(e.r);
    }
    std::sort(stable_r.begin(), stable_r.end());
    REQUIRE(stable_r.size() == 3);
    CHECK_THAT(stable_r[0], WithinAbs(-1.2559, 1e-4));
    CHECK_THAT(stable_r[1], WithinAbs(0.0, 1e-12));
    CHECK_THAT(stable_r[2], WithinAbs(1.2559, 1e-4));
    CHECK(at(1.0).stable_count == 1);
}

TEST_CASE("pitchfork check rejects bad grids", "[model]") {
    CHECK_THROWS_AS(check_assumption2(type1(), {}), UsageError);
    CHECK_THROWS_AS(check_assumption2(type1(), {1.0, 0.0}), UsageError);
}
