#include "dirspike/simulate.hpp"

#include "dirspike/errors.hpp"
#include "dirspike/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dirspike {

namespace {

void require_step(const ModelParams& p, double dt, double t_end) {
    p.validate();
    if (!(dt > 0.0)) throw UsageError("dt must be > 0");
    if (dt > max_dt(p) * (1.0 + 1e-12)) {
        throw UsageError("dt = " + std::to_string(dt) + " exceeds tau/20 = " + std::to_string(max_dt(p)));
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw UsageError("t_end must be finite and >= 0");
}

// RK4 for the full system with preallocated stage buffers.
class FullStepper {
public:
    FullStepper(std::size_t n, const ModelParams& p)
        : p_(p), k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

    void step(std::span<double> x, double& x_s, std::span<const double> u, double dt) {
        const std::size_t n = x.size();
        double s1, s2, s3, s4;
        deriv(x, x_s, u, k1_, s1);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k1_[i];
        deriv(tmp_, x_s + 0.5 * dt * s1, u, k2_, s2);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k2_[i];
        deriv(tmp_, x_s + 0.5 * dt * s2, u, k3_, s3);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + dt * k3_[i];
        deriv(tmp_, x_s + dt * s3, u, k4_, s4);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        }
        x_s += dt / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
    }

private:
    void deriv(std::span<const double> x, double x_s, std::span<const double> u, std::span<double> dx,
               double& dx_s) const {
        full_grad_into(x, x_s, p_, dx);
        for (std::size_t i = 0; i < x.size(); ++i) {
            dx[i] = (-dx[i] + p_.alpha * u[i]) / p_.tau;
        }
        dx_s = (-x_s + g_eval(norm(x), p_)) / p_.tau_s;
    }

    ModelParams p_;
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

ReducedState rk4_reduced(const ReducedState& s, double u_tilde, const ModelParams& p, double dt) noexcept {
    const auto k1 = reduced_field(s.r, s.x_s, u_tilde, p);
    const auto k2 = reduced_field(s.r + 0.5 * dt * k1.dr, s.x_s + 0.5 * dt * k1.dx_s, u_tilde, p);
    const auto k3 = reduced_field(s.r + 0.5 * dt * k2.dr, s.x_s + 0.5 * dt * k2.dx_s, u_tilde, p);
    const auto k4 = reduced_field(s.r + dt * k3.dr, s.x_s + dt * k3.dx_s, u_tilde, p);
    ReducedState out;
    out.r = std::abs(s.r + dt / 6.0 * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr));
    out.x_s = s.x_s + dt / 6.0 * (k1.dx_s + 2.0 * k2.dx_s + 2.0 * k3.dx_s + k4.dx_s);
    return out;
}

// Runaway guard: 10x the Groenwall envelope max(|x0|, (b + alpha |u|max)/a).
class BlowupGuard {
public:
    BlowupGuard(const ModelParams& p, double initial_norm)
        : p_(p), witness_(lower_bound_witness(p)), initial_norm_(initial_norm) {}

    void observe_input(double input_norm) noexcept { u_max_ = std::max(u_max_, input_norm); }

    void check(double r, double x_s, double t) const {
        if (!std::isfinite(r) || !std::isfinite(x_s)) throw BlowupError("non-finite state", t);
        const double envelope = std::max(initial_norm_, (witness_.b + p_.alpha * u_max_) / witness_.a);
        if (r > 10.0 * envelope) throw BlowupError("state norm exceeded 10x the amplitude bound", t);
    }

private:
    ModelParams p_;
    LowerBoundWitness witness_;
    double initial_norm_;
    double u_max_ = 0.0;
};

// Online version of the hysteresis detector.
class SpikeDetector {
public:
    SpikeDetector(double r_up, double r_down) : r_up_(r_up), r_down_(r_down) {
        if (!(r_down > 0.0 && r_down < r_up)) throw UsageError("spike detector needs 0 < r_down < r_up");
    }

    void push(double t, double r) {
        if (!started_) {
            armed_ = r < r_up_;
            started_ = true;
        } else {
            if (armed_ && prev_r_ < r_up_ && r >= r_up_) {
                const double onset = prev_t_ + (t - prev_t_) * (r_up_ - prev_r_) / (r - prev_r_);
                train_.spike_times.push_back(onset);
                armed_ = false;
                above_ = true;
            }
            if (above_ && prev_r_ >= r_up_ && r < r_up_) {
                const double drop = prev_t_ + (t - prev_t_) * (prev_r_ - r_up_) / (prev_r_ - r);
                train_.widths.push_back(drop - train_.spike_times.back());
                above_ = false;
            }
            if (!armed_ && r < r_down_) armed_ = true;
        }
        prev_t_ = t;
        prev_r_ = r;
    }

    SpikeTrain finish(double steady_start) {
        if (above_) {
            train_.widths.push_back(prev_t_ - train_.spike_times.back());
            above_ = false;
        }
        auto& st = train_.spike_times;
        train_.isis.clear();
        for (std::size_t k = 1; k < st.size(); ++k) train_.isis.push_back(st[k] - st[k - 1]);

        const auto first = std::lower_bound(st.begin(), st.end(), steady_start);
        train_.steady_spikes = static_cast<std::size_t>(st.end() - first);
        train_.steady_frequency = 0.0;
        if (train_.steady_spikes >= 3) {
            const double span = st.back() - *first;
            train_.steady_frequency = static_cast<double>(train_.steady_spikes - 1) / span;
        }
        return train_;
    }

private:
    double r_up_;
    double r_down_;
    bool started_ = false;
    bool armed_ = true;
    bool above_ = false;
    double prev_t_ = 0.0;
    double prev_r_ = 0.0;
    SpikeTrain train_;
};

}  // namespace

ReducedField reduced_field(double r, double x_s, double u_tilde, const ModelParams& p) noexcept {
    return {(-radial_grad(r, x_s, p) + p.alpha * u_tilde) / p.tau, (-x_s + g_eval(r, p)) / p.tau_s};
}

std::size_t sample_count(double dt, double t_end) {
    if (!(dt > 0.0)) throw UsageError("dt must be > 0");
    const double q = t_end / dt;
    return static_cast<std::size_t>(std::ceil(q - 1e-9 * std::max(1.0, q))) + 1;
}

FullState step_full(const FullState& s, const StateVec& u, const ModelParams& p, double dt, double t) {
    if (!(dt > 0.0)) throw UsageError("dt must be > 0");
    if (u.size() != s.x.size()) throw UsageError("input dimension does not match state dimension");
    FullState out = s;
    FullStepper stepper(s.x.size(), p);
    stepper.step(out.x.entries(), out.x_s, u.entries(), dt);
    if (!out.x.all_finite() || !std::isfinite(out.x_s)) throw BlowupError("non-finite state", t + dt);
    return out;
}

ReducedState step_reduced(const ReducedState& s, double u_tilde, const ModelParams& p, double dt, double t) {
    if (!(dt > 0.0)) throw UsageError("dt must be > 0");
    const ReducedState out = rk4_reduced(s, u_tilde, p, dt);
    if (!std::isfinite(out.r) || !std::isfinite(out.x_s)) throw BlowupError("non-finite state", t + dt);
    return out;
}

FullTrajectory simulate_full(const FullState& s0, const InputFn& input, const ModelParams& p, double dt,
                             double t_end, std::size_t record_stride) {
    require_step(p, dt, t_end);
    if (record_stride == 0) throw UsageError("record_stride must be >= 1");
    const std::size_t n = s0.x.size();
    if (n == 0) throw UsageError("state dimension must be >= 1");

    const std::size_t samples = sample_count(dt, t_end);
    FullTrajectory traj;
    traj.dt = dt * static_cast<double>(record_stride);
    traj.t0 = 0.0;
    traj.states.reserve(samples / record_stride + 1);
    traj.inputs.reserve(samples / record_stride + 1);

    FullState s = s0;
    FullStepper stepper(n, p);
    BlowupGuard guard(p, norm(s0.x));
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) * dt;
        StateVec u = input(t);
        if (u.size() != n) throw UsageError("input dimension does not match state dimension");
        guard.observe_input(norm(u));
        guard.check(norm(s.x), s.x_s, t);
        if (k % record_stride == 0) {
            traj.states.push_back(s);
            traj.inputs.push_back(u);
        }
        if (k + 1 < samples) stepper.step(s.x.entries(), s.x_s, u.entries(), dt);
    }
    return traj;
}

ReducedTrajectory simulate_reduced(const ReducedState& s0, const ScalarInputFn& u_tilde, const ModelParams& p,
                                   double dt, double t_end, std::size_t record_stride) {
    require_step(p, dt, t_end);
    if (record_stride == 0) throw UsageError("record_stride must be >= 1");
    if (s0.r < 0.0) throw UsageError("reduced state needs r >= 0");

    const std::size_t samples = sample_count(dt, t_end);
    ReducedTrajectory traj;
    traj.dt = dt * static_cast<double>(record_stride);
    traj.states.reserve(samples / record_stride + 1);
    traj.inputs.reserve(samples / record_stride + 1);

    ReducedState s = s0;
    BlowupGuard guard(p, s0.r);
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double u = u_tilde(t);
        guard.observe_input(std::abs(u));
        guard.check(s.r, s.x_s, t);
        if (k % record_stride == 0) {
            traj.states.push_back(s);
            traj.inputs.push_back(u);
        }
        if (k + 1 < samples) s = rk4_reduced(s, u, p, dt);
    }
    return traj;
}

std::vector<double> norm_series(const FullTrajectory& traj) {
    std::vector<double> r(traj.size());
    std::transform(traj.states.begin(), traj.states.end(), r.begin(), [](const FullState& s) { return norm(s.x); });
    return r;
}

std::vector<double> norm_series(const ReducedTrajectory& traj) {
    std::vector<double> r(traj.size());
    std::transform(traj.states.begin(), traj.states.end(), r.begin(), [](const ReducedState& s) { return s.r; });
    return r;
}

SpikeTrain detect_spikes(std::span<const double> r, double t0, double dt, double r_up, double r_down,
                         double steady_window) {
    SpikeDetector det(r_up, r_down);
    for (std::size_t k = 0; k < r.size(); ++k) det.push(t0 + static_cast<double>(k) * dt, r[k]);
    const double t_last = r.empty() ? t0 : t0 + static_cast<double>(r.size() - 1) * dt;
    return det.finish(t_last - steady_window);
}

SpikeTrain detect_spikes(const ReducedTrajectory& traj, const DetectorConfig& cfg) {
    const auto r = norm_series(traj);
    const double duration = traj.size() > 1 ? traj.time(traj.size() - 1) - traj.t0 : 0.0;
    return detect_spikes(r, traj.t0, traj.dt, cfg.r_up, cfg.r_down, cfg.steady_fraction * duration);
}

SpikeTrain detect_spikes(const FullTrajectory& traj, const DetectorConfig& cfg) {
    const auto r = norm_series(traj);
    const double duration = traj.size() > 1 ? traj.time(traj.size() - 1) - traj.t0 : 0.0;
    return detect_spikes(r, traj.t0, traj.dt, cfg.r_up, cfg.r_down, cfg.steady_fraction * duration);
}

FIPoint steady_response(const ModelParams& p, double u_tilde, const FIConfig& cfg) {
    const double dt = cfg.dt > 0.0 ? cfg.dt : default_dt(p);
    require_step(p, dt, cfg.t_end);
    const std::size_t samples = sample_count(dt, cfg.t_end);

    SpikeDetector det(cfg.detector.r_up, cfg.detector.r_down);
    BlowupGuard guard(p, 0.0);
    guard.observe_input(std::abs(u_tilde));
    ReducedState s{};
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) * dt;
        guard.check(s.r, s.x_s, t);
        det.push(t, s.r);
        if (k + 1 < samples) s = rk4_reduced(s, u_tilde, p, dt);
    }
    const double t_last = static_cast<double>(samples - 1) * dt;
    const auto train = det.finish(t_last - cfg.detector.steady_fraction * t_last);
    return {u_tilde, train.steady_frequency, train.steady_spikes};
}

std::vector<FIPoint> fi_curve(const ModelParams& p, const std::vector<double>& u_grid, const FIConfig& cfg) {
    if (!std::is_sorted(u_grid.begin(), u_grid.end())) throw UsageError("fi_curve: input grid must be sorted");
    return parallel_map(u_grid.size(), cfg.threads,
                        [&](std::size_t i) { return steady_response(p, u_grid[i], cfg); });
}

}  // namespace dirspike
