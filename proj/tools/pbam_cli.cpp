// Scenario runner: pbam <command> --config FILE [--out DIR] [--seed N]
// [--horizon T] [--jobs K]. Exit 0 pass, 1 check failure, 2 config error.
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "pbam/errors.hpp"
#include "pbam/scenario.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Verification flows for pointwise bounded asymptotic morphisms"};
    app.require_subcommand(1, 1);

    std::string config_path, out_dir;
    unsigned long long seed = 0;
    double horizon = 0.0;
    int jobs = 1;
    const std::map<std::string, std::string> about = {
        {"verify-algebra", "seminorm contracts and quasi-product identities"},
        {"funcalc", "inverse square root and quasi-polar suites"},
        {"pbam", "defect curves and pbam conditions of families"},
        {"retract", "threshold functions, representatives and homotopies"},
        {"compose", "C1/C3 certificates and reparameterisation search"},
        {"functoriality", "the homotopy chain for composites"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& name : pbam::scenario_commands()) {
        auto* sub = app.add_subcommand(name, about.at(name));
        sub->add_option("--config", config_path, "scenario JSON")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "override the scenario seed");
        sub->add_option("--horizon", horizon, "override the t and s grid stop")->check(CLI::PositiveNumber);
        sub->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));
        subs.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    pbam::RunOptions options;
    options.out_dir = out_dir;
    options.jobs = jobs;
    if (sub->count("--seed"))
        options.seed = seed;
    if (sub->count("--horizon"))
        options.horizon = horizon;

    pbam::Json config;
    try {
        config = pbam::load_config(config_path);
        options.config_dir = std::filesystem::path(config_path).parent_path();
    } catch (const pbam::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    const pbam::RunResult r = pbam::run_command(sub->get_name(), config, options);
    if (out_dir.empty())
        std::cout << r.report.dump(2) << "\n";
    std::cerr << sub->get_name() << ": " << r.message << "\n";
    return r.exit_code;
}
