#pragma once

#include "dirspike/vector_space.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dirspike {

/// Parameters of the fast/slow excitable system
///
///   tau   dx/dt   = -dV/dx(|x|, x_s) + alpha u
///   tau_s dx_s/dt = -x_s + g(|x|)
///
/// with V(r, x_s) = (1+x_s) r^2/2 - beta1 r^4/4 + beta2 r^6/6 and
/// g(r) = beta3 r^4.
struct ModelParams {
    double tau = 0.1;
    double tau_s = 3.0;
    double alpha = 0.1;
    double beta1 = 3.0;
    double beta2 = 1.5;
    double beta3 = 1.5;

    /// Throws UsageError unless tau_s > tau > 0, alpha > 0, beta1 > 0,
    /// beta2 > 0 and beta3 >= 0.
    void validate() const;

    /// Non-empty when the timescale separation tau_s/tau is below 5.
    [[nodiscard]] std::optional<std::string> timescale_warning() const;
};

struct FullState {
    StateVec x;
    double x_s = 0.0;
};

[[nodiscard]] double potential(double r, double x_s, const ModelParams& p) noexcept;

/// dV/dr = (1+x_s) r - beta1 r^3 + beta2 r^5.
[[nodiscard]] double radial_grad(double r, double x_s, const ModelParams& p) noexcept;

/// dV/dx in the factored form [(1+x_s) - beta1|x|^2 + beta2|x|^4] x, which is
/// smooth through x = 0.
[[nodiscard]] StateVec full_grad(const StateVec& x, double x_s, const ModelParams& p);

/// Writes the factored gradient into `out` (same length as x).
void full_grad_into(std::span<const double> x, double x_s, const ModelParams& p,
                    std::span<double> out) noexcept;

[[nodiscard]] double g_eval(double r, const ModelParams& p) noexcept;

/// Window (x_s_lower, x_s_upper) of the subcritical pitchfork of
/// dr/dt = -dV/dr: the origin changes stability at x_s_lower = -1 and the
/// outer equilibria vanish in a fold at x_s_upper = beta1^2/(4 beta2) - 1.
struct PitchforkWindow {
    double lower;
    double upper;
};

/// Throws UsageError when beta1^2 <= 4 beta2 (no bistable window).
[[nodiscard]] PitchforkWindow pitchfork_thresholds(const ModelParams& p);

/// Linear lower-bound witness a r - b <= dV/dr (valid for every x_s >= 0).
struct LowerBoundWitness {
    double a;
    double b;
};

/// a = 1, b = (2 beta1/5) (3 beta1 / (5 beta2))^{3/2}.
[[nodiscard]] LowerBoundWitness lower_bound_witness(const ModelParams& p) noexcept;

struct Assumption1Report {
    double a = 0.0;
    double b = 0.0;
    double h_at_rmax = 0.0;
    bool holds = false;
    /// First grid point violating either inequality, if any.
    std::optional<double> violation_r;
    std::optional<double> violation_x_s;
};

/// Checks a r - b <= dV/dr <= h(r_max) r on a dense grid over
/// [0, r_max] x [0, x_s_max], with h(r_max) = (1 + x_s_max) + beta2 r_max^4.
[[nodiscard]] Assumption1Report check_assumption1(const ModelParams& p, double r_max,
                                                  double x_s_max);

struct RadialEquilibrium {
    double r;  // signed position on the real line
    bool stable;
};

struct Assumption2Entry {
    double x_s = 0.0;
    std::vector<RadialEquilibrium> equilibria;
    int stable_count = 0;
    int expected_stable_count = 0;  // 0 marks a grid point sitting on a threshold
    bool ok = false;
};

struct Assumption2Report {
    std::vector<Assumption2Entry> entries;
    bool counts_ok = false;
    bool r_star_monotone = false;
    /// Upper threshold located numerically, independently of the closed form.
    double x_s_upper_numeric = 0.0;
    PitchforkWindow window{};
    [[nodiscard]] bool holds() const noexcept { return counts_ok && r_star_monotone; }
};

/// Counts the (locally asymptotically) stable equilibria of dr/dt = -dV/dr on
/// the whole real line at every grid value of x_s and checks the three-regime
/// structure of the subcritical pitchfork. Grid must be nonempty and sorted.
[[nodiscard]] Assumption2Report check_assumption2(const ModelParams& p,
                                                  const std::vector<double>& x_s_grid);

}  // namespace dirspike
