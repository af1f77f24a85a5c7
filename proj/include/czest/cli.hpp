#pragma once

// Command implementations behind the `czest` executable. Each returns the
// process exit code: 0 success, 1 configuration error, 2 containment
// violations (run) or failed checks (verify).

#include "czest/errors.hpp"
#include "czest/scenario.hpp"
#include "czest/simharness.hpp"
#include "czest/svg.hpp"
#include "czest/verify.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace czest::cli
{

struct RunOptions
{
    std::string scenario = "uav5";   // a file path or a built-in name (uav5, pair1d)
    int trials = 1;
    std::optional<std::uint64_t> seed;
    std::optional<int> delta_bar;
    std::optional<int> horizon;
    std::vector<std::string> algorithms;
    std::string out = "czest_out";
    bool svg = false;
    int threads = -1;   // -1: CZEST_THREADS or hardware concurrency
};

inline std::optional<ScenarioConfig> builtin_scenario(const std::string& name)
{
    if (name == "uav5") return build_uav_scenario();
    if (name == "pair1d") return build_pair1d_scenario();
    return std::nullopt;
}

inline ScenarioConfig resolve_scenario(const RunOptions& opt)
{
    ScenarioConfig cfg;
    if (std::filesystem::exists(opt.scenario)) cfg = load_scenario(opt.scenario);
    else if (auto b = builtin_scenario(opt.scenario)) cfg = *b;
    else throw ConfigError("scenario \"" + opt.scenario + "\" is neither a readable file nor a built-in name (uav5, pair1d).");
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.delta_bar) cfg.delta_bar = *opt.delta_bar;
    if (opt.horizon) cfg.horizon = *opt.horizon;
    if (!opt.algorithms.empty()) cfg.algorithms = opt.algorithms;
    try
    {
        cfg.validate();
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline std::string trial_stem(int trial)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "trial_%04d", trial);
    return buf;
}

inline void write_text(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write \"" + p.string() + "\".");
    f << text;
}

// Outputs in opt.out:
//   manifest.json       resolved scenario and run settings
//   trial_NNNN.jsonl    trial log (header line + one line per step)
//   trial_NNNN.csv      metrics: k,algorithm,agent,d,gnorm,contained
//   summary.csv         per-step mean/max of d and gnorm per algorithm
//   *.svg               with --svg: trajectories of trial 0 and metric curves
inline int cmd_run(const RunOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    ScenarioConfig cfg;
    MonteCarloResult mc;
    try
    {
        if (opt.trials < 1) throw ConfigError("--trials must be >= 1.");
        cfg = resolve_scenario(opt);
        TrialOptions topts;
        if (cfg.has_algorithm("oit"))
        {
            topts.mu0 = scenario_observability_index(cfg);
            if (cfg.delta_bar < topts.mu0 - 1)
                throw ConfigError("delta_bar = " + std::to_string(cfg.delta_bar) + " is below observability index - 1 = " +
                                  std::to_string(topts.mu0 - 1) + ".");
        }
        std::filesystem::create_directories(opt.out);
        mc = run_monte_carlo(cfg, opt.trials, topts, opt.threads);
    }
    catch (const ConfigError& e)
    {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    catch (const NotObservableError& e)
    {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    catch (const std::filesystem::filesystem_error& e)
    {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    const std::filesystem::path dir(opt.out);
    nlohmann::json manifest;
    manifest["scenario"] = scenario_to_json(cfg);
    manifest["trials"] = opt.trials;
    manifest["mu0"] = mc.mu0;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    for (const auto& log : mc.trials)
    {
        std::ostringstream jl, csv;
        write_jsonl(jl, log);
        write_metrics_csv(csv, compute_metrics(log));
        write_text(dir / (trial_stem(log.trial) + ".jsonl"), jl.str());
        write_text(dir / (trial_stem(log.trial) + ".csv"), csv.str());
    }
    {
        std::ostringstream s;
        write_summary_csv(s, mc);
        write_text(dir / "summary.csv", s.str());
    }
    if (opt.svg && !mc.trials.empty())
    {
        for (int i = 1; i <= cfg.system.num_agents(); ++i)
            write_text(dir / ("trajectory_agent" + std::to_string(i) + ".svg"), svg::trajectory_svg(mc.trials.front(), cfg.system, i));
        write_text(dir / "metrics.svg", svg::metrics_svg(mc));
    }

    out << "scenario " << cfg.name << ": " << opt.trials << " trial(s), K=" << cfg.horizon << ", delta_bar=" << cfg.delta_bar;
    if (cfg.has_algorithm("oit")) out << ", mu0=" << mc.mu0;
    out << "\n";
    for (const auto& [alg, series] : mc.per_step)
        if (!series.empty())
            out << "  " << alg << ": final mean d = " << format_double(series.back().mean_d)
                << ", max d = " << format_double(series.back().max_d) << "\n";
    out << "containment violations: " << mc.violations << "\n";
    if (mc.violations == 0) return 0;

    for (const auto& log : mc.trials)
    {
        if (log.violations == 0) continue;
        err << "violation: trial " << log.trial << " (seed " << log.seed << ")";
        if (!log.aborted.empty()) err << ": " << log.aborted;
        else
        {
            for (const auto& s : log.steps)
                for (const auto& [alg, est] : s.estimates)
                    for (size_t i = 0; i < est.size(); ++i)
                        if (!est[i].contained)
                        {
                            err << ": first at k=" << s.k << ", " << alg << ", agent " << i + 1;
                            goto reported;
                        }
        reported:;
        }
        err << '\n';
    }
    return 2;
}

inline int cmd_verify(const verify::VerifyOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    std::vector<verify::CheckResult> results;
    try
    {
        results = verify::run_suites(opt);
    }
    catch (const std::invalid_argument& e)
    {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    verify::print_table(out, results);
    for (const auto& r : results)
        if (!r.passed) return 2;
    return 0;
}

// Writes the named built-in scenario to `path` ("-" for stdout).
inline int cmd_scenario_init(const std::string& name, const std::string& path, std::ostream& out = std::cout,
                             std::ostream& err = std::cerr)
{
    const auto cfg = builtin_scenario(name);
    if (!cfg)
    {
        err << "error: unknown scenario \"" << name << "\" (expected uav5 or pair1d).\n";
        return 1;
    }
    const auto text = scenario_file_text(*cfg);
    if (path == "-")
    {
        out << text;
        return 0;
    }
    try
    {
        write_text(path, text);
    }
    catch (const ConfigError& e)
    {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    out << "wrote " << path << '\n';
    return 0;
}

} // namespace czest::cli
