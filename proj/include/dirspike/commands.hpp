#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace dirspike {

struct GlobalOptions {
    /// Empty when --config was not given.
    std::string config;
    std::filesystem::path out = "out";
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

enum ExitCode : int { kExitOk = 0, kExitPropertyFailure = 1, kExitUsage = 2, kExitNumerical = 3 };

/// A config argument that does not name an existing file is looked up among
/// the bundled configs, with or without the .toml suffix.
[[nodiscard]] std::filesystem::path resolve_config(const std::string& name);

int cmd_simulate(const GlobalOptions& opt);
int cmd_phase_plane(const GlobalOptions& opt);
int cmd_fi(const GlobalOptions& opt);
int cmd_thresholds(const GlobalOptions& opt);
int cmd_navigate(const GlobalOptions& opt);
/// `suite` is one of the names in suite_names() or "all".
int cmd_verify(const std::string& suite, const GlobalOptions& opt);

}  // namespace dirspike
