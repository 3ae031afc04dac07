#pragma once

#include "dirspike/model.hpp"
#include "dirspike/vector_space.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dirspike {

/// State of the exact 2-D reduction: r = |x| and the slow variable.
struct ReducedState {
    double r = 0.0;
    double x_s = 0.0;
};

/// Uniformly sampled solution; sample k sits at t0 + k dt and inputs[k] is
/// the input applied from that sample to the next one.
template <class State, class Input>
struct Trajectory {
    double dt = 0.0;
    double t0 = 0.0;
    std::vector<State> states;
    std::vector<Input> inputs;

    [[nodiscard]] std::size_t size() const noexcept { return states.size(); }
    [[nodiscard]] double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
};

using FullTrajectory = Trajectory<FullState, StateVec>;
using ReducedTrajectory = Trajectory<ReducedState, double>;

/// Right-hand side of the reduced system (time derivatives of r and x_s).
struct ReducedField {
    double dr;
    double dx_s;
};

[[nodiscard]] ReducedField reduced_field(double r, double x_s, double u_tilde, const ModelParams& p) noexcept;

using InputFn = std::function<StateVec(double)>;
using ScalarInputFn = std::function<double(double)>;

/// Default step: tau/50. Steps larger than tau/20 are rejected.
[[nodiscard]] inline double default_dt(const ModelParams& p) noexcept { return p.tau / 50.0; }
[[nodiscard]] inline double max_dt(const ModelParams& p) noexcept { return p.tau / 20.0; }

/// ceil(t_end / dt) + 1, with a relative guard against representation error
/// in the quotient.
[[nodiscard]] std::size_t sample_count(double dt, double t_end);

/// One classical RK4 step of the full system with u held constant.
/// Throws BlowupError (stamped with `t`) on a non-finite result.
[[nodiscard]] FullState step_full(const FullState& s, const StateVec& u, const ModelParams& p,
                                  double dt, double t = 0.0);

/// One RK4 step of the reduced system; r is reflected to |r| afterwards.
[[nodiscard]] ReducedState step_reduced(const ReducedState& s, double u_tilde, const ModelParams& p,
                                        double dt, double t = 0.0);

/// Integrates the full n-dimensional system on [0, t_end]. Every
/// `record_stride`-th step is stored. Throws UsageError when dt > tau/20 or
/// when input dimension does not match x, BlowupError on runaway states.
[[nodiscard]] FullTrajectory simulate_full(const FullState& s0, const InputFn& input,
                                           const ModelParams& p, double dt, double t_end,
                                           std::size_t record_stride = 1);

[[nodiscard]] ReducedTrajectory simulate_reduced(const ReducedState& s0, const ScalarInputFn& u_tilde,
                                                 const ModelParams& p, double dt, double t_end,
                                                 std::size_t record_stride = 1);

[[nodiscard]] std::vector<double> norm_series(const FullTrajectory& traj);
[[nodiscard]] std::vector<double> norm_series(const ReducedTrajectory& traj);

struct DetectorConfig {
    double r_up = 0.8;
    double r_down = 0.4;
    /// Spikes inside the final fraction of the run define the steady frequency.
    double steady_fraction = 0.6;
};

struct SpikeTrain {
    std::vector<double> spike_times;
    /// Time spent above r_up per spike (truncated at the end of the record).
    std::vector<double> widths;
    std::vector<double> isis;
    std::size_t steady_spikes = 0;
    double steady_frequency = 0.0;
};

/// Hysteresis spike detector on a sampled norm signal. A spike starts at an
/// upward crossing of r_up (time linearly interpolated) and the detector
/// re-arms only after r falls below r_down. steady_frequency is 1/mean(ISI)
/// over the spikes inside the last `steady_window` time units, or 0 when
/// fewer than 3 spikes fall there.
[[nodiscard]] SpikeTrain detect_spikes(std::span<const double> r, double t0, double dt, double r_up,
                                       double r_down, double steady_window);

[[nodiscard]] SpikeTrain detect_spikes(const ReducedTrajectory& traj, const DetectorConfig& cfg);
[[nodiscard]] SpikeTrain detect_spikes(const FullTrajectory& traj, const DetectorConfig& cfg);

struct FIConfig {
    double dt = 0.0;  // 0 selects default_dt
    double t_end = 300.0;
    DetectorConfig detector{};
    unsigned threads = 1;
};

struct FIPoint {
    double u_tilde = 0.0;
    double frequency = 0.0;
    std::size_t steady_spikes = 0;
};

/// Steady spiking frequency of the reduced system at each constant input,
/// started from rest. The first (1 - steady_fraction) of each run is treated
/// as transient. u_grid must be sorted ascending.
[[nodiscard]] std::vector<FIPoint> fi_curve(const ModelParams& p, const std::vector<double>& u_grid,
                                            const FIConfig& cfg);

/// Single f-I point; shared by fi_curve and the threshold analysis.
[[nodiscard]] FIPoint steady_response(const ModelParams& p, double u_tilde, const FIConfig& cfg);

}  // namespace dirspike
