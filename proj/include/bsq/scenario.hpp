#pragma once

#include "bsq/checks.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsq {

// Declarative scenario: which checks to run, at which seed and sample
// counts. One JSON document per scenario, no scripting.
struct ScenarioConfig {
    std::string name;
    std::uint64_t seed = 20260811;
    double tol_scale = 1.0;
    std::vector<std::size_t> n_values; // optional; checks use defaults when empty
    std::vector<std::string> checks;
};

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Throws ScenarioError on malformed or invalid configuration.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);

struct ScenarioOutcome {
    bool pass = false;
    std::string report_path;
    std::vector<std::string> written_files;
};

// Runs the selected checks (concurrently; results assembled in check-id
// order), writes report.json, timings.csv, and per-check artifacts under
// out_dir. Byte-identical report.json for identical (config, seed).
ScenarioOutcome run_scenario(const ScenarioConfig& config, const std::string& out_dir,
                             std::optional<std::uint64_t> seed_override = {},
                             std::optional<double> tol_scale_override = {});

// Slope table over reports from several runs: groups records by check id,
// fits log err against log N, flags second-order checks below 1.8. Needs
// at least three distinct N per check. Writes convergence.csv; returns it.
std::string emit_convergence(const std::vector<std::string>& report_paths,
                             const std::string& out_dir);

} // namespace bsq
