#include "dirspike/commands.hpp"
#include "dirspike/verify.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    using namespace dirspike;

    CLI::App app{"Directional excitable system: simulation, phase-plane analysis and navigation"};
    app.require_subcommand(1);

    GlobalOptions opt;
    std::string out = opt.out.string();
    app.add_option("--config", opt.config, "Config file or bundled config name")->capture_default_str();
    app.add_option("--out", out, "Output directory")->capture_default_str();
    app.add_option("--seed", opt.seed, "Seed for randomized property runs")->capture_default_str();
    app.add_option("--threads", opt.threads, "Worker threads for sweeps")->capture_default_str()->check(CLI::PositiveNumber);

    // Global flags may also follow the subcommand.
    app.fallthrough();

    auto* simulate = app.add_subcommand("simulate", "Integrate the full or reduced system");
    auto* phase = app.add_subcommand("phase-plane", "Nullclines, equilibria and vector field of the reduced system");
    auto* fi = app.add_subcommand("fi", "Steady spiking frequency against constant input");
    auto* thresholds = app.add_subcommand("thresholds", "Spiking thresholds and excitability type");
    auto* navigate = app.add_subcommand("navigate", "Closed-loop robot navigation scenario");
    auto* verify = app.add_subcommand("verify", "Randomized property suites");
    std::string suite = "all";
    std::string names = "all";
    for (const auto& n : suite_names()) names += ", " + n;
    verify->add_option("suite", suite, "One of: " + names)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    opt.out = out;

    if (*simulate) return cmd_simulate(opt);
    if (*phase) return cmd_phase_plane(opt);
    if (*fi) return cmd_fi(opt);
    if (*thresholds) return cmd_thresholds(opt);
    if (*navigate) return cmd_navigate(opt);
    if (*verify) return cmd_verify(suite, opt);
    return kExitUsage;
}
