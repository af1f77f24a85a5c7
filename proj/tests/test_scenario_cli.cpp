#include "czest/cli.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace czest;
namespace fs = std::filesystem;

namespace
{

const fs::path kSource = CZEST_SOURCE_DIR;

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("czest_test_" + name);
    fs::remove_all(p);
    return p;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line))
    {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

void expect_same_config(const ScenarioConfig& a, const ScenarioConfig& b)
{
    EXPECT_EQ(a.name, b.name);
    EXPECT_EQ(a.horizon, b.horizon);
    EXPECT_EQ(a.delta_bar, b.delta_bar);
    EXPECT_EQ(a.seed, b.seed);
    EXPECT_EQ(a.algorithms, b.algorithms);
    EXPECT_EQ(a.noise_mode, b.noise_mode);
    EXPECT_EQ(a.grid_step, b.grid_step);
    EXPECT_EQ(a.system.topology.edges(), b.system.topology.edges());
    ASSERT_EQ(a.system.num_agents(), b.system.num_agents());
    for (int i = 1; i <= a.system.num_agents(); ++i)
    {
        const auto& x = a.system.agent(i);
        const auto& y = b.system.agent(i);
        for (int k : {0, 1, 7}) EXPECT_TRUE(x.A.at(k).isApprox(y.A.at(k), 1e-15)) << "agent " << i << " k " << k;
        EXPECT_EQ(x.B, y.B);
        EXPECT_EQ(x.C, y.C);
        EXPECT_EQ(x.D, y.D);
        const Box xw = interval_hull(x.W), yw = interval_hull(y.W);
        EXPECT_EQ(xw.lo, yw.lo);
        EXPECT_EQ(xw.hi, yw.hi);
    }
    ASSERT_EQ(a.initial_boxes.size(), b.initial_boxes.size());
    for (size_t t = 0; t < a.initial_boxes.size(); ++t)
    {
        EXPECT_EQ(a.initial_boxes[t].lo, b.initial_boxes[t].lo);
        EXPECT_EQ(a.initial_boxes[t].hi, b.initial_boxes[t].hi);
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Scenario files

TEST(Scenario, ShippedFilesMatchBuiltins)
{
    expect_same_config(load_scenario((kSource / "data/uav5.json").string()), build_uav_scenario());
    expect_same_config(load_scenario((kSource / "data/pair1d.json").string()), build_pair1d_scenario());
}

TEST(Scenario, TopologyFileMatchesDefault)
{
    const auto doc = nlohmann::json::parse(read_file(kSource / "data/uav5_topology.json"));
    std::map<int, std::vector<int>> nbrs;
    for (const auto& [k, v] : doc.at("neighbors").items()) nbrs[std::stoi(k)] = v.get<std::vector<int>>();
    EXPECT_EQ(nbrs, uav5_default_neighbors());
    EXPECT_EQ(edges_from_neighbors(nbrs).size(), 9u);
}

TEST(Scenario, RoundTrip)
{
    for (const auto& cfg : {build_uav_scenario(12, 4, 3), build_pair1d_scenario(5, 2)})
    {
        const auto text = scenario_file_text(cfg);
        const auto back = parse_scenario(text);
        expect_same_config(back, cfg);
        EXPECT_EQ(scenario_to_json(back), scenario_to_json(cfg));
    }
}

TEST(Scenario, InitTextDocumentsParameters)
{
    std::ostringstream out, err;
    ASSERT_EQ(cli::cmd_scenario_init("uav5", "-", out, err), 0);
    EXPECT_NE(out.str().find("omega"), std::string::npos);
    EXPECT_NE(out.str().find("period"), std::string::npos);
    EXPECT_EQ(cli::cmd_scenario_init("nope", "-", out, err), 1);
    EXPECT_NE(err.str().find("unknown scenario"), std::string::npos);
}

TEST(Scenario, SyntaxErrorsReportLine)
{
    const std::string text = "{\n  \"horizon\": 5,\n  \"agents\": [ ,\n]\n}\n";
    try
    {
        parse_scenario(text);
        FAIL() << "expected ConfigError";
    }
    catch (const ConfigError& e)
    {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Scenario, SchemaErrorsReportPointerAndLine)
{
    auto doc = scenario_to_json(build_pair1d_scenario());
    doc["agents"][1].erase("V");
    const auto missing = doc.dump(2);
    try
    {
        parse_scenario(missing);
        FAIL() << "expected ConfigError";
    }
    catch (const ConfigError& e)
    {
        EXPECT_NE(std::string(e.what()).find("/agents/1"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("\"V\""), std::string::npos) << e.what();
    }

    auto bad = scenario_to_json(build_pair1d_scenario());
    bad["noise_sampling"] = "gaussian";
    const auto text = bad.dump(2);
    try
    {
        parse_scenario(text);
        FAIL() << "expected ConfigError";
    }
    catch (const ConfigError& e)
    {
        const std::string what = e.what();
        EXPECT_NE(what.find("/noise_sampling"), std::string::npos) << what;
        EXPECT_NE(what.find("line " + std::to_string(detail::guess_line(text, "noise_sampling"))), std::string::npos) << what;
    }

    auto dims = scenario_to_json(build_pair1d_scenario());
    dims["agents"][0]["C"] = {{1.0, 2.0}};
    EXPECT_THROW(parse_scenario(dims.dump()), ConfigError);
    auto uav = scenario_to_json(build_uav_scenario());
    uav["edges"] = {{1, 2}};
    EXPECT_THROW(parse_scenario(uav.dump()), ConfigError);
}

// ---------------------------------------------------------------------------
// CLI commands

TEST(Cli, RunWritesOutputs)
{
    const auto dir = scratch_dir("run");
    cli::RunOptions opt;
    opt.scenario = "pair1d";
    opt.trials = 2;
    opt.out = dir.string();
    opt.threads = 1;
    std::ostringstream out, err;
    ASSERT_EQ(cli::cmd_run(opt, out, err), 0) << err.str();
    for (const char* f : {"manifest.json", "summary.csv", "trial_0000.jsonl", "trial_0000.csv", "trial_0001.jsonl", "trial_0001.csv"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    EXPECT_FALSE(fs::exists(dir / "metrics.svg"));
    EXPECT_NE(out.str().find("containment violations: 0"), std::string::npos);
    const auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
    EXPECT_EQ(manifest.at("trials"), 2);
    fs::remove_all(dir);
}

TEST(Cli, SvgDoesNotChangeOtherFiles)
{
    const auto plain = scratch_dir("plain"), with_svg = scratch_dir("svg");
    cli::RunOptions opt;
    opt.scenario = "uav5";
    opt.horizon = 4;
    opt.threads = 1;
    std::ostringstream out, err;
    opt.out = plain.string();
    ASSERT_EQ(cli::cmd_run(opt, out, err), 0);
    opt.out = with_svg.string();
    opt.svg = true;
    ASSERT_EQ(cli::cmd_run(opt, out, err), 0);
    EXPECT_TRUE(fs::exists(with_svg / "metrics.svg"));
    EXPECT_TRUE(fs::exists(with_svg / "trajectory_agent1.svg"));
    for (const auto& e : fs::directory_iterator(plain))
        EXPECT_EQ(read_file(e.path()), read_file(with_svg / e.path().filename())) << e.path().filename();
    fs::remove_all(plain);
    fs::remove_all(with_svg);
}

TEST(Cli, RunRejectsBadInput)
{
    const auto dir = scratch_dir("bad");
    fs::create_directories(dir);
    std::ofstream(dir / "broken.json") << "{ \"agents\": [";
    cli::RunOptions opt;
    opt.scenario = (dir / "broken.json").string();
    opt.out = (dir / "out").string();
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_run(opt, out, err), 1);
    EXPECT_NE(err.str().find("line"), std::string::npos);

    opt.scenario = "no_such_scenario";
    EXPECT_EQ(cli::cmd_run(opt, out, err), 1);
    opt.scenario = "uav5";
    opt.delta_bar = 0;
    EXPECT_EQ(cli::cmd_run(opt, out, err), 1);
    EXPECT_NE(err.str().find("observability"), std::string::npos);
    fs::remove_all(dir);
}

// Noise drawn outside the declared sets must surface as violations (exit 2).
TEST(Cli, ViolationsGiveExitTwo)
{
    const auto dir = scratch_dir("viol");
    fs::create_directories(dir);
    auto doc = scenario_to_json(build_pair1d_scenario());
    doc["noise_scale"] = 3.0;
    doc["noise_sampling"] = "vertex";
    std::ofstream(dir / "scaled.json") << doc.dump(2);
    cli::RunOptions opt;
    opt.scenario = (dir / "scaled.json").string();
    opt.trials = 3;
    opt.out = (dir / "out").string();
    opt.threads = 1;
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_run(opt, out, err), 2);
    EXPECT_NE(err.str().find("violation: trial"), std::string::npos) << err.str();
    fs::remove_all(dir);
}

TEST(Cli, GoldenMetrics)
{
    const auto dir = scratch_dir("golden");
    cli::RunOptions opt;
    opt.scenario = "pair1d";
    opt.seed = 7;
    opt.out = dir.string();
    opt.threads = 1;
    std::ostringstream out, err;
    ASSERT_EQ(cli::cmd_run(opt, out, err), 0);
    const auto got = csv_rows(read_file(dir / "trial_0000.csv"));
    const auto want = csv_rows(read_file(kSource / "tests/golden/pair1d_seed7_trial_0000.csv"));
    ASSERT_EQ(got.size(), want.size());
    for (size_t r = 0; r < got.size(); ++r)
    {
        ASSERT_EQ(got[r].size(), want[r].size());
        for (size_t c = 0; c < got[r].size(); ++c)
        {
            if (r > 0 && (c == 3 || c == 4)) EXPECT_NEAR(std::stod(got[r][c]), std::stod(want[r][c]), 1e-9) << "row " << r;
            else EXPECT_EQ(got[r][c], want[r][c]) << "row " << r;
        }
    }
    fs::remove_all(dir);
}

TEST(Cli, VerifyExitCodes)
{
    verify::VerifyOptions opt;
    opt.filter = "filters";
    opt.cases = 10;
    opt.probes = 100;
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_verify(opt, out, err), 0) << out.str();
    opt.inject_fault = true;
    EXPECT_EQ(cli::cmd_verify(opt, out, err), 2);
    opt.filter = "bogus";
    EXPECT_EQ(cli::cmd_verify(opt, out, err), 1);
}
