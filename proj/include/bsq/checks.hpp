#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace bsq {

struct CheckContext {
    std::uint64_t seed = 20260811;
    double tol_scale = 1.0;
    // Sample counts for refinement-style checks; empty selects per-check
    // defaults.
    std::vector<std::size_t> n_values;
};

struct ReportRecord {
    std::string check_id;
    std::string params;
    std::size_t n = 0;    // sample count, when the record is N-specific
    std::string seeds;    // filled by the scenario runner
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
    std::string order; // observed convergence order, "exact", or empty
    bool pass = false;
    double wall_seconds = 0.0; // reported separately, never in report.json
};

struct CheckResult {
    std::string id;
    bool pass = true;
    std::vector<ReportRecord> records;
    std::vector<std::string> notes;
    // auxiliary outputs (CSV tables, plot data), keyed by file name
    std::map<std::string, std::string> artifacts;
};

struct CheckInfo {
    std::string description;
    std::function<CheckResult(const CheckContext&)> run;
};

// Registry in canonical order (report assembly sorts by id anyway).
const std::vector<std::pair<std::string, CheckInfo>>& check_registry();
bool check_exists(const std::string& id);
CheckResult run_check(const std::string& id, const CheckContext& ctx);

// Least-squares slope of log(err) against log(N); points at or below the
// machine floor are dropped, and fewer than two live points reports
// "exact".
std::string observed_order(const std::vector<std::size_t>& ns, const std::vector<double>& errs,
                           double floor_eps = 1e-13);

} // namespace bsq
