#pragma once

#include "dirspike/io.hpp"
#include "dirspike/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dirspike {

struct VerifyOptions {
    /// Defaults to the rotating-input demonstration parameters.
    ModelParams model{.tau = 0.05, .tau_s = 2.0, .alpha = 0.25, .beta1 = 3.0, .beta2 = 1.5, .beta3 = 1.5};
    std::uint64_t seed = 1;
    unsigned threads = 1;
    /// Random cases per dimension (norm reduction) or in total (direction suites).
    int cases = 20;
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    /// Summary figures in a stable order, e.g. {"max_error", 3e-12}.
    std::vector<std::pair<std::string, double>> figures;
    std::vector<std::string> failures;
    Json details;
};

/// |x(t)| of the full system against r(t) of the reduced one for
/// n in {2, 3, 5, 10}, x0 parallel to a constant u, over 50 tau_s at tau/50.
[[nodiscard]] SuiteResult verify_norm_reduction(const VerifyOptions& opt);

/// Closed-form direction dynamics at dt = tau/100 with |u| = 2b/alpha:
/// max residual <= 1e-3 and final cos(x, u) >= 0.999.
[[nodiscard]] SuiteResult verify_riccati(const VerifyOptions& opt);

/// Eventual two-sided norm bound on the same runs as verify_riccati.
[[nodiscard]] SuiteResult verify_norm_bounds(const VerifyOptions& opt);

/// Sector bound and pitchfork structure of the potential for the Type I and
/// Type II coefficient sets.
[[nodiscard]] SuiteResult verify_assumptions(const VerifyOptions& opt);

/// Suite names accepted by run_suite, in execution order of "all".
[[nodiscard]] const std::vector<std::string>& suite_names();

/// Throws UsageError for an unknown name.
[[nodiscard]] SuiteResult run_suite(const std::string& name, const VerifyOptions& opt);

}  // namespace dirspike
