// Scenario runner: one subcommand per experiment, each driven by a JSON config.

#include "fdlab/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv)
{
    CLI::App app{"Fast diffusion on model manifolds: scenario runner"};
    app.require_subcommand(1);

    const std::map<std::string, std::string> commands{
        {"classify", "classify"},
        {"barrier", "barrier"},
        {"elliptic", "elliptic-nonexistence"},
        {"fde", "fde"},
        {"minimal", "minimal"},
        {"hp-check", "hp-check"},
        {"probe", "uniqueness-probe"},
        {"demo", "demo-nonuniqueness"},
        {"run", ""},
    };

    std::string config;
    std::string out;
    bool verbose = false;
    for (const auto& [cmd, experiment] : commands) {
        auto* sub = app.add_subcommand(cmd, experiment.empty() ? "run whatever experiment the config names"
                                                               : "run a '" + experiment + "' scenario");
        sub->add_option("--config", config, "scenario file (JSON)")->required();
        sub->add_option("--out", out, "output directory (overrides output_dir)");
        sub->add_flag("--verbose,-v", verbose, "progress on stderr");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fdlab::exit_code::validation;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const std::string& experiment = commands.at(chosen->get_name());

    fdlab::RunOptions opt;
    if (!out.empty())
        opt.output_dir = out;
    opt.verbose = verbose;
    opt.log = &std::cerr;
    return fdlab::run_scenario_file(config, experiment.empty() ? std::nullopt : std::optional(experiment), opt,
                                    std::cerr);
}
