#include "czest/cli.hpp"

#include <CLI11.hpp>

#include <sstream>

namespace
{

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Set-membership state estimation for multi-agent systems"};
    app.require_subcommand(1);

    czest::cli::RunOptions run;
    std::uint64_t seed = 0;
    int delta_bar = 0, horizon = 0;
    std::string algorithms;
    auto* run_cmd = app.add_subcommand("run", "Run Monte Carlo trials of a scenario");
    run_cmd->add_option("scenario", run.scenario, "Scenario file or built-in name (uav5, pair1d)")->required();
    run_cmd->add_option("--trials", run.trials, "Number of trials")->capture_default_str();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Base seed (overrides the scenario)");
    auto* delta_opt = run_cmd->add_option("--delta-bar", delta_bar, "Finite-horizon window length");
    auto* horizon_opt = run_cmd->add_option("--horizon", horizon, "Number of steps K");
    run_cmd->add_option("--algorithms", algorithms, "Comma-separated subset of centralized,oit,distributed");
    run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();
    run_cmd->add_flag("--svg", run.svg, "Emit SVG plots");

    czest::verify::VerifyOptions ver;
    auto* verify_cmd = app.add_subcommand("verify", "Run the built-in oracle suites");
    verify_cmd->add_option("--filter", ver.filter, "geometry, filters, ordering or all")->capture_default_str();
    verify_cmd->add_option("--seed", ver.seed, "Seed for random instances")->capture_default_str();
    verify_cmd->add_flag("--inject-fault", ver.inject_fault, "Flip the coupling offset sign in update_intersection");

    std::string init_name, init_out = "-";
    auto* init_cmd = app.add_subcommand("scenario-init", "Write a built-in scenario file");
    init_cmd->add_option("name", init_name, "uav5 or pair1d")->required();
    init_cmd->add_option("-o,--out", init_out, "Output path, - for stdout")->capture_default_str();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*run_cmd)
    {
        if (*seed_opt) run.seed = seed;
        if (*delta_opt) run.delta_bar = delta_bar;
        if (*horizon_opt) run.horizon = horizon;
        run.algorithms = split_list(algorithms);
        return czest::cli::cmd_run(run);
    }
    if (*verify_cmd) return czest::cli::cmd_verify(ver);
    return czest::cli::cmd_scenario_init(init_name, init_out);
}
