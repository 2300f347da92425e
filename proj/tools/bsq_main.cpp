#include "bsq/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"bsq: Bohr-Sommerfeld moduli workbench"};
    app.require_subcommand(1);

    std::string default_out = "bsq-out";
    if (const char* env = std::getenv("BSQ_OUT_DIR")) default_out = env;

    // run <config>
    auto* run = app.add_subcommand("run", "run a scenario configuration");
    std::string config_path;
    std::string out_dir = default_out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double tol_scale = 0.0;
    bool tol_set = false;
    run->add_option("config", config_path, "scenario JSON")->required();
    run->add_option("--out-dir", out_dir, "output directory");
    run->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
        seed_set = true;
    });
    run->add_option("--tol-scale", tol_scale, "tolerance scale override")
        ->each([&](const std::string&) { tol_set = true; });

    // list-checks
    auto* list = app.add_subcommand("list-checks", "list the available checks");

    // converge <reports...>
    auto* conv = app.add_subcommand("converge", "refinement slopes over several reports");
    std::vector<std::string> reports;
    std::string conv_out = default_out;
    conv->add_option("reports", reports, "report.json files")->required()->expected(-1);
    conv->add_option("--out-dir", conv_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*list) {
            for (const auto& [id, info] : bsq::check_registry())
                std::cout << id << "  -  " << info.description << "\n";
            return 0;
        }
        if (*run) {
            bsq::ScenarioConfig cfg;
            try {
                cfg = bsq::load_scenario(config_path);
            } catch (const bsq::ScenarioError& e) {
                std::cerr << "invalid scenario: " << e.what() << "\n";
                return 2;
            }
            const auto outcome = bsq::run_scenario(
                cfg, out_dir,
                seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt,
                tol_set ? std::optional<double>(tol_scale) : std::nullopt);
            std::cout << "report: " << outcome.report_path << "\n";
            std::cout << (outcome.pass ? "all selected checks passed"
                                       : "at least one check failed")
                      << "\n";
            return outcome.pass ? 0 : 1;
        }
        if (*conv) {
            try {
                std::cout << bsq::emit_convergence(reports, conv_out);
            } catch (const bsq::ScenarioError& e) {
                std::cerr << "converge: " << e.what() << "\n";
                return 2;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
