// Command-line harness: generate synthetic grid-failure data, fit the
// Bayesian-hierarchical and MLE fragility models, score candidate model
// structures, evaluate divergences, solve upgrade policies, and consolidate
// figure-ready report tables.

#include "fragtk/errors.hpp"
#include "fragtk/experiment.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"fragility modeling toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    fragtk::RunOptions opt;
    std::uint64_t seed_value = 0;
    int workers = 0;

    app.add_option("--config", config_path, "experiment config JSON")->required();
    app.add_option("--scenario", opt.scenario_filter, "restrict to one scenario id");
    auto* seed_opt = app.add_option("--seed", seed_value, "override the config base seed");
    app.add_option("--workers", workers, "parallel scenario workers (overrides config)");
    app.add_flag("--force", opt.force, "recompute even when outputs exist");

    using Command = std::function<int(const fragtk::ExperimentConfig&, const fragtk::RunOptions&)>;
    std::vector<std::pair<CLI::App*, Command>> commands{
        {app.add_subcommand("generate", "synthesize stress, populations, and failure data"),
         fragtk::cmd_generate},
        {app.add_subcommand("fit", "MLE + bootstrap prior + Metropolis-Hastings posterior"),
         fragtk::cmd_fit},
        {app.add_subcommand("select", "score candidate feature sets by BIC"), fragtk::cmd_select},
        {app.add_subcommand("evaluate", "KL and signed component divergences"),
         fragtk::cmd_evaluate},
        {app.add_subcommand("upgrade", "solve risk-target upgrade policies"), fragtk::cmd_upgrade},
        {app.add_subcommand("report", "consolidate figure-ready tables"), fragtk::cmd_report},
        {app.add_subcommand("run-all", "full pipeline in order"), fragtk::cmd_run_all},
    };

    CLI11_PARSE(app, argc, argv);

    if (seed_opt->count() > 0) opt.seed_override = seed_value;
    opt.workers_override = workers;

    try {
        const auto config = fragtk::ExperimentConfig::from_json_file(config_path);
        for (const auto& [sub, fn] : commands) {
            if (sub->parsed()) return fn(config, opt);
        }
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const fragtk::MissingInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const fragtk::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
