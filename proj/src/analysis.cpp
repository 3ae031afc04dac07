#include "dirspike/analysis.hpp"

#include "dirspike/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dirspike {

std::string_view to_string(EquilibriumKind kind) noexcept {
    switch (kind) {
        case EquilibriumKind::StableNode: return "stable-node";
        case EquilibriumKind::StableFocus: return "stable-focus";
        case EquilibriumKind::Saddle: return "saddle";
        case EquilibriumKind::UnstableNode: return "unstable-node";
        case EquilibriumKind::UnstableFocus: return "unstable-focus";
        case EquilibriumKind::CenterDegenerate: return "center-degenerate";
    }
    return "unknown";
}

std::string_view to_string(OnsetKind kind) noexcept {
    return kind == OnsetKind::SaddleNode ? "saddle-node" : "hopf";
}

std::string_view to_string(HodgkinType type) noexcept {
    switch (type) {
        case HodgkinType::TypeI: return "TypeI";
        case HodgkinType::TypeII: return "TypeII";
        case HodgkinType::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

Jacobian2 reduced_jacobian(double r, double x_s, const ModelParams& p) noexcept {
    const double r2 = r * r;
    return {{{(-(1.0 + x_s) + 3.0 * p.beta1 * r2 - 5.0 * p.beta2 * r2 * r2) / p.tau, -r / p.tau},
             {4.0 * p.beta3 * r2 * r / p.tau_s, -1.0 / p.tau_s}}};
}

std::pair<std::array<std::complex<double>, 2>, EquilibriumKind> classify_jacobian(const Jacobian2& j) noexcept {
    constexpr double kDegenerate = 1e-8;
    const double tr = j[0][0] + j[1][1];
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    const double disc = 0.25 * tr * tr - det;

    std::array<std::complex<double>, 2> ev;
    EquilibriumKind kind;
    if (disc < 0.0) {
        const double re = 0.5 * tr;
        const double im = std::sqrt(-disc);
        ev = {std::complex<double>(re, -im), std::complex<double>(re, im)};
        if (std::abs(re) < kDegenerate) kind = EquilibriumKind::CenterDegenerate;
        else kind = re < 0.0 ? EquilibriumKind::StableFocus : EquilibriumKind::UnstableFocus;
    } else {
        const double sq = std::sqrt(disc);
        // Avoid cancellation for the eigenvalue of smaller magnitude.
        double l1 = 0.5 * tr - sq;
        double l2 = 0.5 * tr + sq;
        if (tr > 0.0 && l2 != 0.0) l1 = det / l2;
        else if (tr < 0.0 && l1 != 0.0) l2 = det / l1;
        if (l1 > l2) std::swap(l1, l2);
        ev = {std::complex<double>(l1, 0.0), std::complex<double>(l2, 0.0)};
        if (std::abs(l1) < kDegenerate || std::abs(l2) < kDegenerate) kind = EquilibriumKind::CenterDegenerate;
        else if (l1 < 0.0 && l2 > 0.0) kind = EquilibriumKind::Saddle;
        else if (l2 < 0.0) kind = EquilibriumKind::StableNode;
        else kind = EquilibriumKind::UnstableNode;
    }
    return {ev, kind};
}

Curve nullcline_r(double u_tilde, const ModelParams& p, std::span<const double> r_grid) {
    Curve c;
    c.axis_branch = u_tilde == 0.0;
    c.r.reserve(r_grid.size());
    c.x_s.reserve(r_grid.size());
    for (double r : r_grid) {
        if (!(r > 0.0)) throw UsageError("nullcline_r: grid values must be positive");
        const double r3 = r * r * r;
        c.r.push_back(r);
        c.x_s.push_back((p.beta1 * r3 - p.beta2 * r3 * r * r + p.alpha * u_tilde) / r - 1.0);
    }
    return c;
}

Curve nullcline_xs(const ModelParams& p, std::span<const double> r_grid) {
    Curve c;
    c.r.assign(r_grid.begin(), r_grid.end());
    c.x_s.reserve(r_grid.size());
    for (double r : r_grid) c.x_s.push_back(g_eval(r, p));
    return c;
}

namespace {

// r-component of the field on the x_s-nullcline, times tau.
double equilibrium_equation(double r, double u_tilde, const ModelParams& p) noexcept {
    return -radial_grad(r, g_eval(r, p), p) + p.alpha * u_tilde;
}

double bisect_root(double lo, double hi, double u_tilde, const ModelParams& p) {
    double flo = equilibrium_equation(lo, u_tilde, p);
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = equilibrium_equation(mid, u_tilde, p);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    // Return whichever endpoint has the smaller residual.
    return std::abs(equilibrium_equation(lo, u_tilde, p)) <= std::abs(equilibrium_equation(hi, u_tilde, p)) ? lo
                                                                                                              : hi;
}

EquilibriumPoint make_equilibrium(double r, double u_tilde, const ModelParams& p) {
    EquilibriumPoint e;
    e.r = r;
    e.x_s = g_eval(r, p);
    const auto [ev, kind] = classify_jacobian(reduced_jacobian(e.r, e.x_s, p));
    e.eigenvalues = ev;
    e.kind = kind;
    const auto f = reduced_field(e.r, e.x_s, u_tilde, p);
    e.residual = std::max(std::abs(f.dr), std::abs(f.dx_s));
    return e;
}

}  // namespace

std::vector<EquilibriumPoint> find_equilibria(double u_tilde, const ModelParams& p) {
    p.validate();
    if (!(u_tilde >= 0.0)) throw UsageError("find_equilibria: u_tilde must be >= 0");

    const auto [a, b] = lower_bound_witness(p);
    const double r_max = 1.0 + (b + p.alpha * u_tilde) / a;
    constexpr int kGrid = 10000;

    std::vector<double> roots;
    double prev_r = 0.0;
    double prev_f = equilibrium_equation(0.0, u_tilde, p);
    if (prev_f == 0.0) roots.push_back(0.0);
    for (int i = 1; i <= kGrid; ++i) {
        const double r = r_max * i / kGrid;
        const double f = equilibrium_equation(r, u_tilde, p);
        if (f == 0.0) {
            roots.push_back(r);
        } else if (prev_f != 0.0 && (f < 0.0) != (prev_f < 0.0)) {
            roots.push_back(bisect_root(prev_r, r, u_tilde, p));
        }
        prev_r = r;
        prev_f = f;
    }

    std::vector<EquilibriumPoint> out;
    out.reserve(roots.size());
    for (double r : roots) out.push_back(make_equilibrium(r, u_tilde, p));
    return out;
}

namespace {

// Spiking predicate of the nullcline analysis: every equilibrium sits on the
// repelling middle branch of the r-nullcline (d(dr/dt)/dr > 0).
bool on_repelling_branch(double u_tilde, const ModelParams& p) {
    const auto eq = find_equilibria(u_tilde, p);
    return std::all_of(eq.begin(), eq.end(),
                       [&](const EquilibriumPoint& e) { return reduced_jacobian(e.r, e.x_s, p)[0][0] > 0.0; });
}

bool has_stable_equilibrium(double u_tilde, const ModelParams& p) {
    const auto eq = find_equilibria(u_tilde, p);
    return std::any_of(eq.begin(), eq.end(), [](const EquilibriumPoint& e) { return e.stable(); });
}

// Bisects a predicate that is `lo_value` at lo and !lo_value at hi.
template <class Pred>
double bisect_predicate(double lo, double hi, bool lo_value, double tol, Pred pred) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (pred(mid) == lo_value ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::string describe_structure(double u_tilde, const ModelParams& p) {
    std::ostringstream os;
    os << "u_tilde=" << u_tilde << ":";
    for (const auto& e : find_equilibria(u_tilde, p)) {
        os << " (r=" << e.r << ", x_s=" << e.x_s << ", " << to_string(e.kind) << ")";
    }
    return os.str();
}

}  // namespace

ThresholdReport threshold_scan(const ModelParams& p, const ThresholdConfig& cfg) {
    p.validate();
    if (!(cfg.u_min >= 0.0) || !(cfg.u_max > cfg.u_min)) throw UsageError("threshold_scan: need 0 <= u_min < u_max");
    if (!(cfg.tol > 0.0)) throw UsageError("threshold_scan: tol must be > 0");
    if (cfg.scan_points < 3) throw UsageError("threshold_scan: scan_points must be >= 3");

    const std::size_t n = cfg.scan_points;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = cfg.u_min + (cfg.u_max - cfg.u_min) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    const auto spiking = parallel_map(n, cfg.sim.threads,
                                      [&](std::size_t i) { return static_cast<int>(on_repelling_branch(grid[i], p)); });

    const auto bracket_error = [&](const std::string& what) {
        return ThresholdBracketError(what + "; " + describe_structure(cfg.u_min, p) + "; " +
                                     describe_structure(cfg.u_max, p));
    };

    const auto first = std::find(spiking.begin(), spiking.end(), 1);
    if (first == spiking.end()) throw bracket_error("spiking window not found in the input range");
    if (first == spiking.begin()) throw bracket_error("lower threshold not bracketed");
    const std::size_t i_first = static_cast<std::size_t>(first - spiking.begin());
    const auto last_it = std::find(first, spiking.end(), 0);
    if (last_it == spiking.end()) throw bracket_error("upper threshold not bracketed");
    const std::size_t i_after = static_cast<std::size_t>(last_it - spiking.begin());

    ThresholdReport rep;
    const auto repelling = [&](double u) { return on_repelling_branch(u, p); };
    rep.u_lower = bisect_predicate(grid[i_first - 1], grid[i_first], false, cfg.tol, repelling);
    rep.u_upper = bisect_predicate(grid[i_after - 1], grid[i_after], true, cfg.tol, repelling);

    // Finite-timescale picture: loss and recovery of a stable equilibrium.
    const auto stable_any = [&](double u) { return has_stable_equilibrium(u, p); };
    const auto stable_flags =
        parallel_map(n, cfg.sim.threads, [&](std::size_t i) { return static_cast<int>(stable_any(grid[i])); });
    const auto lost = std::find(stable_flags.begin(), stable_flags.end(), 0);
    if (lost == stable_flags.end() || lost == stable_flags.begin()) {
        throw bracket_error("loss of stability of the rest state not bracketed");
    }
    const std::size_t i_lost = static_cast<std::size_t>(lost - stable_flags.begin());
    rep.onset = bisect_predicate(grid[i_lost - 1], grid[i_lost], true, cfg.tol, stable_any);
    const auto regained = std::find(lost, stable_flags.end(), 1);
    if (regained != stable_flags.end()) {
        const std::size_t i_back = static_cast<std::size_t>(regained - stable_flags.begin());
        rep.offset = bisect_predicate(grid[i_back - 1], grid[i_back], false, cfg.tol, stable_any);
    }

    const auto before = find_equilibria(std::max(0.0, rep.onset - cfg.tol), p);
    const auto after = find_equilibria(rep.onset + cfg.tol, p);
    rep.onset_kind = after.size() < before.size() ? OnsetKind::SaddleNode : OnsetKind::Hopf;
    rep.saddle_at_onset = std::any_of(before.begin(), before.end(),
                                      [](const EquilibriumPoint& e) { return e.kind == EquilibriumKind::Saddle; });

    if (cfg.confirm) {
        const double delta = 0.01 / p.alpha;
        const std::vector<double> probes{std::max(0.0, rep.u_lower - delta), std::max(rep.u_lower, rep.onset) + delta,
                                         rep.u_upper + cfg.tol, rep.u_upper + delta, rep.u_upper + 5.0 * delta};
        const auto resp = parallel_map(probes.size(), cfg.sim.threads,
                                       [&](std::size_t i) { return steady_response(p, probes[i], cfg.sim); });
        rep.spikes_below_lower = resp[0].steady_spikes;
        rep.spikes_above_onset = resp[1].steady_spikes;
        rep.spikes_above_upper = std::max({resp[2].steady_spikes, resp[3].steady_spikes, resp[4].steady_spikes});
        rep.confirmed = resp[0].frequency == 0.0 && resp[1].steady_spikes >= 3 && resp[2].frequency == 0.0 &&
                        resp[3].frequency == 0.0 && resp[4].frequency == 0.0;
    }
    return rep;
}

FICurveReport classify_type(const ModelParams& p, const ThresholdConfig& cfg) {
    FICurveReport rep;
    rep.thresholds = threshold_scan(p, cfg);
    const auto& th = rep.thresholds;
    rep.u_lower = th.u_lower;
    rep.u_upper = th.u_upper;
    rep.u_mid = 0.5 * (th.onset + th.offset.value_or(th.u_upper));

    std::vector<double> probes;
    for (double eps : kNearOnsetOffsets) probes.push_back(th.onset * (1.0 + eps));
    probes.push_back(rep.u_mid);
    // The mid-window probe may sit below the near-onset probes, so these are
    // evaluated individually rather than through the sorted f-I sweep.
    rep.points = parallel_map(probes.size(), cfg.sim.threads,
                              [&](std::size_t i) { return steady_response(p, probes[i], cfg.sim); });
    for (std::size_t k = 0; k < kNearOnsetOffsets.size(); ++k) rep.f_near[k] = rep.points[k].frequency;
    rep.f_mid = rep.points.back().frequency;
    rep.near_ratio = rep.f_mid > 0.0 ? rep.f_near[0] / rep.f_mid : 0.0;

    const bool increasing = rep.f_near[0] > 0.0 && rep.f_near[0] <= rep.f_near[1] && rep.f_near[1] <= rep.f_near[2];
    const bool finite_onset = rep.f_near[0] > 0.0 && rep.f_near[2] > 0.0 && rep.f_near[0] / rep.f_near[2] > 0.5;
    if (th.saddle_at_onset && rep.f_mid > 0.0 && rep.near_ratio < 0.3 && increasing) {
        rep.hodgkin_type = HodgkinType::TypeI;
    } else if (!th.saddle_at_onset && rep.f_mid > 0.0 && finite_onset) {
        rep.hodgkin_type = HodgkinType::TypeII;
    } else {
        rep.hodgkin_type = HodgkinType::Unclassified;
    }
    return rep;
}

RiccatiReport riccati_check(const FullTrajectory& traj, const StateVec& u, const ModelParams& p) {
    if (traj.size() == 0) throw UsageError("riccati_check: empty trajectory");
    const double u_norm = norm(u);
    if (u_norm == 0.0) throw UsageError("riccati_check: input must be nonzero");
    for (const auto& uk : traj.inputs) {
        if (uk.size() != u.size()) throw UsageError("riccati_check: input dimension mismatch");
        if (norm(uk - u) > 1e-12 * (1.0 + u_norm)) throw UsageError("riccati_check: input is not constant");
    }

    RiccatiReport rep;
    std::vector<double> inv_norm(traj.size());
    rep.min_norm = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double r = norm(traj.states[k].x);
        if (r < 1e-12 * (1.0 + norm(traj.states[0].x))) throw NormVanishedError(traj.time(k));
        rep.min_norm = std::min(rep.min_norm, r);
        inv_norm[k] = 1.0 / r;
    }

    const auto cos_at = [&](std::size_t k) { return *cosine(traj.states[k].x, u); };
    const double c0_cos = cos_at(0);
    rep.final_cos = cos_at(traj.size() - 1);

    if (c0_cos >= 1.0 - 1e-15 || c0_cos <= -1.0 + 1e-15) {
        rep.alignment = c0_cos > 0.0 ? Alignment::Aligned : Alignment::AntiAligned;
        const double ref = c0_cos > 0.0 ? 1.0 : -1.0;
        for (std::size_t k = 0; k < traj.size(); ++k) {
            rep.max_residual = std::max(rep.max_residual, std::abs(cos_at(k) - ref));
        }
        return rep;
    }

    // d/dt |x|^{-1} = -(dr/dt)/r^2 with dr/dt = (-q r^2 + alpha <x,u>)/(tau r),
    // q = (1+x_s) - beta1 r^2 + beta2 r^4. The endpoint slopes turn the
    // trapezoid rule into its corrected (fourth-order) form.
    std::vector<double> inv_norm_rate(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double r = 1.0 / inv_norm[k];
        const double r2 = r * r;
        const double q = (1.0 + traj.states[k].x_s) - p.beta1 * r2 + p.beta2 * r2 * r2;
        const double r_dot = (-q * r2 + p.alpha * inner(traj.states[k].x, u)) / (p.tau * r);
        inv_norm_rate[k] = -r_dot / r2;
    }

    const double c0 = std::atanh(c0_cos);
    const double rate = p.alpha * u_norm / p.tau;
    const double h = traj.dt;
    double integral = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (k > 0) {
            integral += 0.5 * h * (inv_norm[k - 1] + inv_norm[k]) +
                        h * h / 12.0 * (inv_norm_rate[k - 1] - inv_norm_rate[k]);
        }
        const double closed = std::tanh(rate * integral + c0);
        rep.max_residual = std::max(rep.max_residual, std::abs(cos_at(k) - closed));
    }
    return rep;
}

}  // namespace dirspike
