#include "bsq/scenario.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

namespace bsq {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError("cannot write file: " + path);
    out << content;
}

} // namespace

ScenarioConfig parse_scenario(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ScenarioError(std::string("config parse error: ") + e.what());
    }
    ScenarioConfig cfg;
    cfg.name = j.value("name", "scenario");
    cfg.seed = j.value("seed", std::uint64_t(20260811));
    cfg.tol_scale = j.value("tol_scale", 1.0);
    if (j.contains("N")) {
        if (j["N"].is_array())
            cfg.n_values = j["N"].get<std::vector<std::size_t>>();
        else
            cfg.n_values = {j["N"].get<std::size_t>()};
    }
    for (const std::size_t n : cfg.n_values)
        if (n < 16 || n % 2 != 0)
            throw ScenarioError("invalid N value " + std::to_string(n) +
                                ": sample counts must be even and at least 16");
    if (!j.contains("checks") || !j["checks"].is_array() || j["checks"].empty())
        throw ScenarioError("config must select at least one check");
    cfg.checks = j["checks"].get<std::vector<std::string>>();
    std::set<std::string> seen;
    for (const auto& id : cfg.checks) {
        if (!check_exists(id)) throw ScenarioError("unknown check id: " + id);
        if (!seen.insert(id).second) throw ScenarioError("duplicate check id: " + id);
    }
    if (!(cfg.tol_scale > 0.0)) throw ScenarioError("tol_scale must be positive");
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    return parse_scenario(read_file(path));
}

ScenarioOutcome run_scenario(const ScenarioConfig& config, const std::string& out_dir,
                             std::optional<std::uint64_t> seed_override,
                             std::optional<double> tol_scale_override) {
    CheckContext ctx;
    ctx.seed = seed_override.value_or(config.seed);
    ctx.tol_scale = tol_scale_override.value_or(config.tol_scale);
    ctx.n_values = config.n_values;

    std::filesystem::create_directories(out_dir);

    // Independent checks run concurrently; assembly is by check id, so the
    // report bytes do not depend on completion order.
    std::vector<std::string> ids = config.checks;
    std::sort(ids.begin(), ids.end());
    std::vector<std::future<std::pair<CheckResult, double>>> futures;
    for (const auto& id : ids)
        futures.push_back(std::async(std::launch::async, [id, ctx]() {
            const auto t0 = std::chrono::steady_clock::now();
            CheckResult r = run_check(id, ctx);
            const auto t1 = std::chrono::steady_clock::now();
            return std::make_pair(std::move(r),
                                  std::chrono::duration<double>(t1 - t0).count());
        }));

    std::vector<CheckResult> results;
    std::map<std::string, double> timings;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto [r, secs] = futures[i].get();
        timings[ids[i]] = secs;
        results.push_back(std::move(r));
    }

    ScenarioOutcome outcome;
    outcome.pass = true;
    nlohmann::ordered_json report;
    report["name"] = config.name;
    report["seed"] = ctx.seed;
    report["tol_scale"] = ctx.tol_scale;
    report["N"] = ctx.n_values;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        outcome.pass = outcome.pass && r.pass;
        nlohmann::ordered_json jc;
        jc["id"] = r.id;
        jc["pass"] = r.pass;
        nlohmann::ordered_json recs = nlohmann::ordered_json::array();
        for (const auto& rec : r.records) {
            nlohmann::ordered_json jr;
            jr["check"] = rec.check_id;
            jr["params"] = rec.params;
            jr["N"] = rec.n;
            jr["seeds"] = std::to_string(ctx.seed);
            jr["lhs"] = rec.lhs;
            jr["rhs"] = rec.rhs;
            jr["abs_err"] = rec.abs_err;
            jr["rel_err"] = rec.rel_err;
            jr["order"] = rec.order;
            jr["pass"] = rec.pass;
            recs.push_back(std::move(jr));
        }
        jc["records"] = std::move(recs);
        jc["notes"] = r.notes;
        checks.push_back(std::move(jc));
        for (const auto& [file, content] : r.artifacts) {
            const std::string path = out_dir + "/" + file;
            write_file(path, content);
            outcome.written_files.push_back(path);
        }
    }
    report["checks"] = std::move(checks);
    report["pass"] = outcome.pass;

    outcome.report_path = out_dir + "/report.json";
    write_file(outcome.report_path, report.dump(2) + "\n");
    outcome.written_files.push_back(outcome.report_path);

    // wall times live outside the canonical (byte-compared) report
    std::ostringstream tim;
    tim << "check,seconds\n";
    tim.precision(6);
    for (const auto& [id, secs] : timings) tim << id << "," << secs << "\n";
    write_file(out_dir + "/timings.csv", tim.str());
    outcome.written_files.push_back(out_dir + "/timings.csv");
    return outcome;
}

std::string emit_convergence(const std::vector<std::string>& report_paths,
                             const std::string& out_dir) {
    // (check id) -> N -> worst abs_err
    std::map<std::string, std::map<std::size_t, double>> table;
    for (const auto& path : report_paths) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(path));
        } catch (const std::exception& e) {
            throw ScenarioError(std::string("cannot parse report ") + path + ": " + e.what());
        }
        for (const auto& jc : j.at("checks"))
            for (const auto& jr : jc.at("records")) {
                const std::size_t n = jr.value("N", std::size_t(0));
                if (n == 0) continue;
                const std::string id = jr.at("check").get<std::string>();
                const double err =
                    std::max(jr.value("abs_err", 0.0), jr.value("rel_err", 0.0));
                auto& slot = table[id][n];
                slot = std::max(slot, err);
            }
    }
    if (table.empty()) throw ScenarioError("no N-resolved records found in the reports");
    const std::set<std::string> second_order = {"eq4", "convergence"};
    std::ostringstream csv;
    csv << "check,points,order,flag\n";
    std::ostringstream plots;
    for (const auto& [id, by_n] : table) {
        if (by_n.size() < 3)
            throw ScenarioError("check '" + id + "' has fewer than three N values");
        std::vector<std::size_t> ns;
        std::vector<double> errs;
        for (const auto& [n, err] : by_n) {
            ns.push_back(n);
            errs.push_back(err);
        }
        const std::string order = observed_order(ns, errs);
        bool flagged = false;
        if (second_order.count(id) && order != "exact" && std::stod(order) < 1.8)
            flagged = true;
        csv << id << "," << by_n.size() << "," << order << "," << (flagged ? 1 : 0) << "\n";
        std::ostringstream plot;
        plot.precision(17);
        for (std::size_t i = 0; i < ns.size(); ++i) plot << ns[i] << " " << errs[i] << "\n";
        std::filesystem::create_directories(out_dir);
        write_file(out_dir + "/plot_converge_" + id + ".txt", plot.str());
    }
    std::filesystem::create_directories(out_dir);
    const std::string content = csv.str();
    write_file(out_dir + "/convergence.csv", content);
    return content;
}

} // namespace bsq
