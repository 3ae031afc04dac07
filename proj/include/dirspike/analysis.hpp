#pragma once

#include "dirspike/errors.hpp"
#include "dirspike/model.hpp"
#include "dirspike/simulate.hpp"

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dirspike {

enum class EquilibriumKind { StableNode, StableFocus, Saddle, UnstableNode, UnstableFocus, CenterDegenerate };

[[nodiscard]] std::string_view to_string(EquilibriumKind kind) noexcept;

struct EquilibriumPoint {
    double r = 0.0;
    double x_s = 0.0;
    std::array<std::complex<double>, 2> eigenvalues{};
    EquilibriumKind kind = EquilibriumKind::CenterDegenerate;
    /// max |component| of the reduced vector field at (r, x_s)
    double residual = 0.0;

    [[nodiscard]] bool stable() const noexcept {
        return kind == EquilibriumKind::StableNode || kind == EquilibriumKind::StableFocus;
    }
};

using Jacobian2 = std::array<std::array<double, 2>, 2>;

/// Analytic Jacobian of the reduced vector field at (r, x_s).
[[nodiscard]] Jacobian2 reduced_jacobian(double r, double x_s, const ModelParams& p) noexcept;

/// Eigenvalues (ascending real part) and their classification. Real parts
/// with magnitude below 1e-8 are reported as CenterDegenerate.
[[nodiscard]] std::pair<std::array<std::complex<double>, 2>, EquilibriumKind> classify_jacobian(
    const Jacobian2& j) noexcept;

struct Curve {
    std::vector<double> r;
    std::vector<double> x_s;
    /// Set for u_tilde == 0, where the whole r = 0 axis is also a nullcline.
    bool axis_branch = false;
};

/// r-nullcline x_s(r) = (beta1 r^3 - beta2 r^5 + alpha u_tilde)/r - 1.
/// Grid values must be positive.
[[nodiscard]] Curve nullcline_r(double u_tilde, const ModelParams& p, std::span<const double> r_grid);

/// x_s-nullcline x_s = g(r).
[[nodiscard]] Curve nullcline_xs(const ModelParams& p, std::span<const double> r_grid);

/// All equilibria of the reduced system for a constant input u_tilde >= 0,
/// sorted by r. Roots of the scalar equilibrium equation are bracketed on a
/// 10^4-point grid over [0, 1 + (b + alpha u_tilde)/a] and bisected to
/// machine precision.
[[nodiscard]] std::vector<EquilibriumPoint> find_equilibria(double u_tilde, const ModelParams& p);

struct ThresholdConfig {
    double u_min = 0.0;
    double u_max = 0.0;
    /// Bisection tolerance on u_tilde.
    double tol = 1e-6;
    std::size_t scan_points = 400;
    /// Simulation settings for the confirmation runs.
    FIConfig sim{};
    bool confirm = true;
};

enum class OnsetKind { SaddleNode, Hopf };

[[nodiscard]] std::string_view to_string(OnsetKind kind) noexcept;

struct ThresholdReport {
    /// Nullcline analysis: inputs at which the x_s-nullcline crosses the
    /// lower and upper knee of the r-nullcline (spiking window in the limit
    /// tau/tau_s -> 0).
    double u_lower = 0.0;
    double u_upper = 0.0;

    /// Finite-timescale bifurcations: the rest state loses stability at
    /// `onset` and a stable equilibrium reappears at `offset`.
    double onset = 0.0;
    OnsetKind onset_kind = OnsetKind::Hopf;
    /// A saddle coexists with the rest state at onset (saddle-node structure).
    bool saddle_at_onset = false;
    std::optional<double> offset;

    /// Simulation cross-checks around the thresholds.
    bool confirmed = false;
    std::size_t spikes_below_lower = 0;
    std::size_t spikes_above_onset = 0;
    std::size_t spikes_above_upper = 0;
};

/// Locates the thresholds by bisection inside [u_min, u_max]. Throws
/// ThresholdBracketError when the spiking window is not bracketed.
[[nodiscard]] ThresholdReport threshold_scan(const ModelParams& p, const ThresholdConfig& cfg);

class ThresholdBracketError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

enum class HodgkinType { TypeI, TypeII, Unclassified };

[[nodiscard]] std::string_view to_string(HodgkinType type) noexcept;

struct FICurveReport {
    std::vector<FIPoint> points;
    double u_lower = 0.0;
    double u_upper = 0.0;
    HodgkinType hodgkin_type = HodgkinType::Unclassified;

    ThresholdReport thresholds;
    double u_mid = 0.0;
    double f_mid = 0.0;
    /// f at onset * (1 + eps) for eps = 0.01, 0.02, 0.05.
    std::array<double, 3> f_near{};
    /// f_near[0] / f_mid
    double near_ratio = 0.0;
};

inline constexpr std::array<double, 3> kNearOnsetOffsets{0.01, 0.02, 0.05};

/// Excitability type from the onset structure and the near-onset f-I
/// response. TypeI: a saddle coexists with the rest state at onset and the
/// frequency near onset is small (ratio to mid-window < 0.3) and increasing.
/// TypeII: the rest state is the only equilibrium at onset and spiking
/// starts at a finite frequency (f(1.01)/f(1.05) > 0.5).
[[nodiscard]] FICurveReport classify_type(const ModelParams& p, const ThresholdConfig& cfg);

class NormVanishedError : public NumericalError {
public:
    NormVanishedError(double time)
        : NumericalError("norm vanished at t=" + std::to_string(time)), time_(time) {}
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

enum class Alignment { Generic, Aligned, AntiAligned };

struct RiccatiReport {
    double max_residual = 0.0;
    double final_cos = 0.0;
    double min_norm = 0.0;
    Alignment alignment = Alignment::Generic;
};

/// Compares the simulated cos(x, u) with the closed form
/// tanh((alpha |u| / tau) int_0^t |x|^{-1} ds + atanh(cos(x0, u))), the
/// integral taken on the trajectory grid by the trapezoid rule with endpoint
/// slope correction (slopes from the vector field), which keeps the quadrature
/// at the order of RK4. When x0 is exactly (anti-)aligned with u the reference
/// is the constant +-1.
[[nodiscard]] RiccatiReport riccati_check(const FullTrajectory& traj, const StateVec& u, const ModelParams& p);

}  // namespace dirspike
