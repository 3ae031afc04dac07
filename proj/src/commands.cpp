#include "dirspike/commands.hpp"

#include "dirspike/analysis.hpp"
#include "dirspike/config.hpp"
#include "dirspike/errors.hpp"
#include "dirspike/io.hpp"
#include "dirspike/navigation.hpp"
#include "dirspike/parallel.hpp"
#include "dirspike/simulate.hpp"
#include "dirspike/verify.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#ifndef DIRSPIKE_CONFIG_DIR
#define DIRSPIKE_CONFIG_DIR "configs"
#endif

namespace dirspike {

namespace fs = std::filesystem;

fs::path resolve_config(const std::string& name) {
    if (name.empty()) throw ConfigError("no config given (use --config PATH)");
    const fs::path direct(name);
    if (fs::is_regular_file(direct)) return direct;
    if (!direct.has_parent_path()) {
        const fs::path bundled = fs::path(DIRSPIKE_CONFIG_DIR) / direct;
        if (fs::is_regular_file(bundled)) return bundled;
        fs::path with_ext = bundled;
        with_ext += ".toml";
        if (fs::is_regular_file(with_ext)) return with_ext;
    }
    throw ConfigError("config file '" + name + "' not found");
}

namespace {

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

Config load_required(const GlobalOptions& opt) { return Config::load(resolve_config(opt.config)); }

ModelParams read_model(Config& cfg, const std::string& section, const ModelParams& d) {
    ModelParams p;
    p.tau = cfg.number(section, "tau", d.tau);
    p.tau_s = cfg.number(section, "tau_s", d.tau_s);
    p.alpha = cfg.number(section, "alpha", d.alpha);
    p.beta1 = cfg.number(section, "beta1", d.beta1);
    p.beta2 = cfg.number(section, "beta2", d.beta2);
    p.beta3 = cfg.number(section, "beta3", d.beta3);
    p.validate();
    if (auto w = p.timescale_warning()) std::cerr << "warning: " << *w << '\n';
    return p;
}

DetectorConfig read_detector(Config& cfg) {
    DetectorConfig d;
    d.r_up = cfg.number("detector", "r_up", d.r_up);
    d.r_down = cfg.number("detector", "r_down", d.r_down);
    d.steady_fraction = cfg.number("detector", "steady_fraction", d.steady_fraction);
    if (!(d.r_down > 0.0 && d.r_down < d.r_up)) throw ConfigError("detector needs 0 < r_down < r_up");
    if (!(d.steady_fraction > 0.0 && d.steady_fraction <= 1.0)) {
        throw ConfigError("detector.steady_fraction must lie in (0, 1]");
    }
    return d;
}

std::size_t positive_count(Config& cfg, const std::string& section, const std::string& key, long fallback) {
    const long v = cfg.integer(section, key, fallback);
    if (v < 1) throw ConfigError(section + "." + key + " must be >= 1");
    return static_cast<std::size_t>(v);
}

Json spikes_json(const SpikeTrain& s) {
    return Json{{"spike_count", s.spike_times.size()},
                {"steady_spikes", s.steady_spikes},
                {"steady_frequency", s.steady_frequency},
                {"spike_times", s.spike_times},
                {"widths", s.widths},
                {"isis", s.isis}};
}

std::string equilibrium_summary(const std::vector<EquilibriumPoint>& eq) {
    std::ostringstream os;
    for (std::size_t i = 0; i < eq.size(); ++i) {
        os << (i ? ", " : "") << to_string(eq[i].kind) << " (r=" << eq[i].r << ", x_s=" << eq[i].x_s << ")";
    }
    return os.str();
}

Json equilibrium_json(double u_tilde, const EquilibriumPoint& e) {
    return Json{{"record", "equilibrium"},
                {"u_tilde", u_tilde},
                {"r", e.r},
                {"x_s", e.x_s},
                {"kind", std::string(to_string(e.kind))},
                {"stable", e.stable()},
                {"eig1_re", e.eigenvalues[0].real()},
                {"eig1_im", e.eigenvalues[0].imag()},
                {"eig2_re", e.eigenvalues[1].real()},
                {"eig2_im", e.eigenvalues[1].imag()},
                {"residual", e.residual}};
}

int run_simulate(const GlobalOptions& opt) {
    Config cfg = load_required(opt);
    const ModelParams p = read_model(cfg, "model", ModelParams{});
    const std::string mode = cfg.string("simulation", "mode", "full");
    const double dt = cfg.number("simulation", "dt", default_dt(p));
    const double t_end = cfg.number("simulation", "t_end", 100.0);
    const std::size_t stride = positive_count(cfg, "simulation", "record_stride", 1);
    // Negative initial adaptation is clamped once here, never during integration.
    const double x_s0 = std::max(0.0, cfg.number("simulation", "x_s0", 0.0));
    cfg.note("simulation", "x_s0_used", format_number(x_s0));
    const std::string kind = cfg.string("input", "kind", "constant");
    const DetectorConfig det = read_detector(cfg);

    SpikeTrain spikes;
    if (mode == "full") {
        const std::vector<double> x0 = cfg.numbers("simulation", "x0", {0.0, 0.0});
        if (x0.empty()) throw ConfigError("simulation.x0 must not be empty");
        InputFn input;
        if (kind == "constant") {
            const StateVec u(cfg.numbers("input", "u", std::vector<double>(x0.size(), 0.0)));
            if (u.size() != x0.size()) throw ConfigError("input.u and simulation.x0 differ in dimension");
            input = [u](double) { return u; };
        } else if (kind == "rotating") {
            if (x0.size() != 2) throw ConfigError("rotating input needs a 2-D state");
            const double omega = cfg.number("input", "omega", 1.0 / 20.0);
            input = [omega](double t) {
                const double th = omega * t;
                const double amp = 1.0 - std::cos(th);
                return StateVec{amp * std::cos(th), amp * std::sin(th)};
            };
        } else {
            throw ConfigError("input.kind must be \"constant\" or \"rotating\" in full mode");
        }
        const auto traj = simulate_full(FullState{StateVec(x0), x_s0}, input, p, dt, t_end, stride);
        spikes = detect_spikes(traj, det);

        const std::size_t n = x0.size();
        std::vector<std::string> cols{"t"};
        for (std::size_t i = 1; i <= n; ++i) cols.push_back("x_" + std::to_string(i));
        cols.push_back("x_s");
        for (std::size_t i = 1; i <= n; ++i) cols.push_back("u_" + std::to_string(i));
        CsvWriter csv(opt.out / "trajectory.csv", cfg.effective(), cols);
        std::vector<double> row(2 * n + 2);
        for (std::size_t k = 0; k < traj.size(); ++k) {
            row[0] = traj.time(k);
            for (std::size_t i = 0; i < n; ++i) row[1 + i] = traj.states[k].x[i];
            row[1 + n] = traj.states[k].x_s;
            for (std::size_t i = 0; i < n; ++i) row[2 + n + i] = traj.inputs[k][i];
            csv.row(row);
        }
        csv.close();
    } else if (mode == "reduced") {
        if (kind != "constant") throw ConfigError("reduced mode takes a constant input.u_tilde");
        const double r0 = cfg.number("simulation", "r0", 0.0);
        const double u_tilde = cfg.number("input", "u_tilde", 0.0);
        if (u_tilde < 0.0) throw ConfigError("input.u_tilde must be >= 0");
        const auto traj =
            simulate_reduced(ReducedState{r0, x_s0}, [u_tilde](double) { return u_tilde; }, p, dt, t_end, stride);
        spikes = detect_spikes(traj, det);
        CsvWriter csv(opt.out / "trajectory.csv", cfg.effective(), {"t", "r", "x_s", "u_tilde"});
        for (std::size_t k = 0; k < traj.size(); ++k) {
            csv.row({traj.time(k), traj.states[k].r, traj.states[k].x_s, traj.inputs[k]});
        }
        csv.close();
    } else {
        throw ConfigError("simulation.mode must be \"full\" or \"reduced\"");
    }

    write_json(opt.out / "spikes.json", cfg.effective(), spikes_json(spikes));
    std::cout << "simulate: " << spikes.spike_times.size() << " spikes, steady frequency "
              << spikes.steady_frequency << '\n'
              << "wrote " << (opt.out / "trajectory.csv").string() << " and " << (opt.out / "spikes.json").string()
              << '\n';
    return kExitOk;
}

int run_phase_plane(const GlobalOptions& opt) {
    Config cfg = load_required(opt);
    const ModelParams p = read_model(cfg, "model", ModelParams{});
    const std::vector<double> inputs = cfg.numbers("phase_plane", "u_tilde", {});
    if (inputs.empty()) throw ConfigError("phase_plane.u_tilde must list at least one input");
    for (double u : inputs) {
        if (u < 0.0) throw ConfigError("phase_plane.u_tilde values must be >= 0");
    }
    const double r_max = cfg.number("phase_plane", "r_max", 1.6);
    const std::size_t r_points = positive_count(cfg, "phase_plane", "r_points", 400);
    const double xs_max = cfg.number("phase_plane", "xs_max", 6.0);
    const std::size_t field_r = positive_count(cfg, "phase_plane", "field_r_points", 25);
    const std::size_t field_xs = positive_count(cfg, "phase_plane", "field_xs_points", 25);
    FIConfig sim;
    sim.t_end = cfg.number("phase_plane", "t_end", 300.0);
    sim.detector = read_detector(cfg);
    sim.threads = opt.threads;
    if (!(r_max > 0.0) || !(xs_max > 0.0)) throw ConfigError("phase_plane ranges must be positive");

    std::vector<double> r_grid(r_points);
    for (std::size_t i = 0; i < r_points; ++i) r_grid[i] = r_max * static_cast<double>(i + 1) / static_cast<double>(r_points);
    const Preamble pre = cfg.effective();

    const Curve xs_curve = nullcline_xs(p, r_grid);
    CsvWriter xs_csv(opt.out / "nullcline_xs.csv", pre, {"r", "x_s"});
    for (std::size_t i = 0; i < r_grid.size(); ++i) xs_csv.row({xs_curve.r[i], xs_curve.x_s[i]});
    xs_csv.close();

    CsvWriter r_csv(opt.out / "nullcline_r.csv", pre, {"u_tilde", "r", "x_s"});
    CsvWriter field_csv(opt.out / "vector_field.csv", pre, {"u_tilde", "r", "x_s", "dr", "dx_s"});
    CsvWriter orbit_csv(opt.out / "orbit.csv", pre, {"u_tilde", "t", "r", "x_s"});
    std::vector<Json> records;

    const auto responses = parallel_map(inputs.size(), opt.threads, [&](std::size_t i) {
        return steady_response(p, inputs[i], sim);
    });
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const double u = inputs[i];
        const Curve rc = nullcline_r(u, p, r_grid);
        for (std::size_t k = 0; k < rc.r.size(); ++k) r_csv.row({u, rc.r[k], rc.x_s[k]});
        for (std::size_t a = 0; a < field_r; ++a) {
            for (std::size_t b = 0; b < field_xs; ++b) {
                const double r = r_max * static_cast<double>(a) / static_cast<double>(std::max<std::size_t>(1, field_r - 1));
                const double xs = xs_max * static_cast<double>(b) / static_cast<double>(std::max<std::size_t>(1, field_xs - 1));
                const auto f = reduced_field(r, xs, u, p);
                field_csv.row({u, r, xs, f.dr, f.dx_s});
            }
        }
        const double dt = default_dt(p);
        const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.01 * p.tau_s / dt)));
        const auto orbit = simulate_reduced(ReducedState{0.0, 0.0}, [u](double) { return u; }, p, dt, sim.t_end, stride);
        for (std::size_t k = 0; k < orbit.size(); ++k) {
            orbit_csv.row({u, orbit.time(k), orbit.states[k].r, orbit.states[k].x_s});
        }

        const auto eq = find_equilibria(u, p);
        const bool cycle = responses[i].frequency > 0.0;
        records.push_back(Json{{"record", "input"},
                               {"u_tilde", u},
                               {"equilibria", eq.size()},
                               {"axis_branch", rc.axis_branch},
                               {"limit_cycle", cycle},
                               {"steady_frequency", responses[i].frequency}});
        for (const auto& e : eq) records.push_back(equilibrium_json(u, e));
        std::cout << "u_tilde=" << u << ": " << eq.size() << " equilibria [" << equilibrium_summary(eq) << "]"
                  << (cycle ? ", limit cycle from rest" : "") << '\n';
    }
    r_csv.close();
    field_csv.close();
    orbit_csv.close();
    write_json_lines(opt.out / "equilibria.jsonl", pre, records);
    return kExitOk;
}

int run_fi(const GlobalOptions& opt) {
    Config cfg = load_required(opt);
    const ModelParams p = read_model(cfg, "model", ModelParams{});
    const double u_min = cfg.number("fi", "u_min", 0.0);
    const double u_max = cfg.number("fi", "u_max", 1.0 / p.alpha);
    const std::size_t points = positive_count(cfg, "fi", "points", 41);
    FIConfig fc;
    fc.t_end = cfg.number("fi", "t_end", fc.t_end);
    fc.dt = cfg.number("fi", "dt", default_dt(p));
    fc.detector = read_detector(cfg);
    fc.threads = opt.threads;
    if (!(u_min >= 0.0) || !(u_max >= u_min)) throw ConfigError("fi needs 0 <= u_min <= u_max");

    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = points == 1 ? u_min : u_min + (u_max - u_min) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    const auto fi = fi_curve(p, grid, fc);
    CsvWriter csv(opt.out / "fi.csv", cfg.effective(), {"u_tilde", "alpha_u_tilde", "frequency", "steady_spikes"});
    std::size_t spiking = 0;
    for (const auto& pt : fi) {
        csv.row({pt.u_tilde, p.alpha * pt.u_tilde, pt.frequency, static_cast<double>(pt.steady_spikes)});
        if (pt.frequency > 0.0) ++spiking;
    }
    csv.close();
    std::cout << "fi: " << spiking << " of " << fi.size() << " inputs spike; wrote " << (opt.out / "fi.csv").string()
              << '\n';
    return kExitOk;
}

int run_thresholds(const GlobalOptions& opt) {
    Config cfg = load_required(opt);
    const ModelParams p = read_model(cfg, "model", ModelParams{});
    ThresholdConfig tc;
    tc.u_min = cfg.number("thresholds", "u_min", 0.0);
    tc.u_max = cfg.number("thresholds", "u_max", 2.0 / p.alpha);
    tc.tol = cfg.number("thresholds", "tol", tc.tol);
    tc.scan_points = positive_count(cfg, "thresholds", "scan_points", static_cast<long>(tc.scan_points));
    tc.confirm = cfg.boolean("thresholds", "confirm", true);
    tc.sim.t_end = cfg.number("thresholds", "t_end", tc.sim.t_end);
    tc.sim.detector = read_detector(cfg);
    tc.sim.threads = opt.threads;

    const FICurveReport rep = classify_type(p, tc);
    const ThresholdReport& th = rep.thresholds;

    Json body{{"u_lower", rep.u_lower},
              {"u_upper", rep.u_upper},
              {"alpha_u_lower", p.alpha * rep.u_lower},
              {"alpha_u_upper", p.alpha * rep.u_upper},
              {"onset", th.onset},
              {"alpha_onset", p.alpha * th.onset},
              {"onset_kind", std::string(to_string(th.onset_kind))},
              {"saddle_at_onset", th.saddle_at_onset},
              {"offset", th.offset ? Json(*th.offset) : Json(nullptr)},
              {"alpha_offset", th.offset ? Json(p.alpha * *th.offset) : Json(nullptr)},
              {"confirmed", th.confirmed},
              {"spikes_below_lower", th.spikes_below_lower},
              {"spikes_above_onset", th.spikes_above_onset},
              {"spikes_above_upper", th.spikes_above_upper},
              {"hodgkin_type", std::string(to_string(rep.hodgkin_type))},
              {"u_mid", rep.u_mid},
              {"f_mid", rep.f_mid},
              {"f_near", rep.f_near},
              {"near_ratio", rep.near_ratio}};
    write_json(opt.out / "thresholds.json", cfg.effective(), body);

    std::ostringstream txt;
    for (const auto& [k, v] : cfg.effective()) txt << "# " << k << '=' << v << '\n';
    for (const auto& [k, v] : body.items()) txt << k << '=' << v.dump() << '\n';
    write_text(opt.out / "thresholds.txt", txt.str());

    std::cout << "alpha*u_lower=" << p.alpha * rep.u_lower << " alpha*u_upper=" << p.alpha * rep.u_upper
              << " alpha*onset=" << p.alpha * th.onset << " (" << to_string(th.onset_kind) << ")"
              << " type=" << to_string(rep.hodgkin_type) << " near_ratio=" << rep.near_ratio
              << (th.confirmed ? " confirmed" : " NOT confirmed") << '\n';
    return kExitOk;
}

int run_navigate(const GlobalOptions& opt) {
    Config cfg = load_required(opt);
    NavScenario sc;
    NavParams& np = sc.params;
    np.ctrl = read_model(cfg, "controller", np.ctrl);
    np.gamma = cfg.number("plant", "gamma", np.gamma);
    np.alpha_act = cfg.number("plant", "alpha_act", np.alpha_act);
    np.S = cfg.number("plant", "S", np.S);
    np.k1 = cfg.number("task", "k1", np.k1);
    np.k2 = cfg.number("task", "k2", np.k2);
    np.eps = cfg.number("task", "eps", np.eps);
    sc.t_end = cfg.number("task", "t_end", sc.t_end);
    sc.dt = cfg.number("task", "dt", np.ctrl.tau / 50.0);
    sc.record_dt = cfg.number("task", "record_dt", sc.record_dt);
    sc.duty_start = cfg.number("task", "duty_start", sc.duty_start);
    sc.transient = cfg.number("task", "transient", sc.transient);
    sc.reference.radius0 = cfg.number("task", "ref_radius0", sc.reference.radius0);
    sc.reference.radius_rate = cfg.number("task", "ref_radius_rate", sc.reference.radius_rate);
    sc.reference.omega = cfg.number("task", "ref_omega", sc.reference.omega);
    sc.reference.phase = cfg.number("task", "ref_phase", sc.reference.phase);

    for (double t : cfg.numbers("obstacles", "reference_times", {})) np.obstacles.push_back(sc.reference(t));
    const auto xs = cfg.numbers("obstacles", "x", {});
    const auto ys = cfg.numbers("obstacles", "y", {});
    if (xs.size() != ys.size()) throw ConfigError("obstacles.x and obstacles.y differ in length");
    for (std::size_t i = 0; i < xs.size(); ++i) np.obstacles.push_back({xs[i], ys[i]});

    const NavResult res = run_scenario(sc);
    const Preamble pre = cfg.effective();

    CsvWriter csv(opt.out / "navigation.csv", pre,
                  {"t", "z_x", "z_y", "zdot_x", "zdot_y", "u_x", "u_y", "u_s", "act_x", "act_y", "zstar_x", "zstar_y"});
    for (const auto& s : res.samples) {
        csv.row({s.t, s.state.z.x, s.state.z.y, s.state.zdot.x, s.state.zdot.y, s.state.u.x, s.state.u.y, s.state.u_s,
                 s.act.x, s.act.y, s.z_star.x, s.z_star.y});
    }
    csv.close();

    Json obstacles = Json::array();
    for (const auto& o : np.obstacles) obstacles.push_back({o.x, o.y});
    const auto& m = res.metrics;
    write_json(opt.out / "metrics.json", pre,
               Json{{"duty_cycle", m.duty_cycle},
                    {"max_tracking_error_after_transient", m.max_tracking_error_after_transient},
                    {"min_clearance_per_obstacle", m.min_clearance},
                    {"obstacles", obstacles}});

    std::cout << "navigate: duty_cycle=" << m.duty_cycle
              << " max_tracking_error_after_transient=" << m.max_tracking_error_after_transient;
    for (std::size_t i = 0; i < m.min_clearance.size(); ++i) std::cout << " clearance[" << i << "]=" << m.min_clearance[i];
    std::cout << '\n';
    return kExitOk;
}

int run_verify(const std::string& suite, const GlobalOptions& opt) {
    VerifyOptions vo;
    Config cfg;
    if (!opt.config.empty()) {
        cfg = load_required(opt);
    }
    vo.model = read_model(cfg, "model", vo.model);
    vo.seed = opt.seed;
    vo.threads = opt.threads;
    cfg.note("verify", "seed", std::to_string(opt.seed));
    cfg.note("verify", "cases", std::to_string(vo.cases));

    std::vector<std::string> names;
    if (suite == "all") {
        names = suite_names();
    } else {
        names.push_back(suite);
    }
    bool all_passed = true;
    for (const auto& name : names) {
        const SuiteResult r = run_suite(name, vo);
        Json figures = Json::object();
        for (const auto& [k, v] : r.figures) figures[k] = v;
        write_json(opt.out / ("verify_" + name + ".json"), cfg.effective(),
                   Json{{"suite", r.name}, {"passed", r.passed}, {"figures", figures}, {"failures", r.failures},
                        {"details", r.details}});
        std::cout << r.name << ": " << (r.passed ? "PASS" : "FAIL");
        for (const auto& [k, v] : r.figures) std::cout << ' ' << k << '=' << v;
        std::cout << '\n';
        for (const auto& f : r.failures) std::cout << "  " << f << '\n';
        all_passed = all_passed && r.passed;
    }
    return all_passed ? kExitOk : kExitPropertyFailure;
}

}  // namespace

int cmd_simulate(const GlobalOptions& opt) {
    return guarded([&] { return run_simulate(opt); });
}
int cmd_phase_plane(const GlobalOptions& opt) {
    return guarded([&] { return run_phase_plane(opt); });
}
int cmd_fi(const GlobalOptions& opt) {
    return guarded([&] { return run_fi(opt); });
}
int cmd_thresholds(const GlobalOptions& opt) {
    return guarded([&] { return run_thresholds(opt); });
}
int cmd_navigate(const GlobalOptions& opt) {
    return guarded([&] { return run_navigate(opt); });
}
int cmd_verify(const std::string& suite, const GlobalOptions& opt) {
    return guarded([&] { return run_verify(suite, opt); });
}

}  // namespace dirspike
