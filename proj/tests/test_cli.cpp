#include <json.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    auto p = fs::temp_directory_path() / ("schiffer_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args)
{
    std::string cmd = std::string(SCHIFFER_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& text)
{
    auto p = dir / "config.json";
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST(Cli, CircleAllSuitesPass)
{
    auto dir = scratch("circle");
    auto cfg = write_config(dir, R"({"model": {"kind": "Circle"}, "N": 16, "suites": ["all"]})");
    EXPECT_EQ(run("--config " + cfg.string() + " --out " + (dir / "out").string()), 0);
    auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    EXPECT_TRUE(report["pass"].get<bool>());
    EXPECT_GT(report["checks"].size(), 10u);
    for (auto& c : report["checks"]) {
        EXPECT_TRUE(c["pass"].get<bool>()) << c["name"];
        EXPECT_FALSE(c["anchor"].get<std::string>().empty());
    }
    EXPECT_TRUE(fs::exists(dir / "out" / "summary.csv"));
}

TEST(Cli, EllipseGrunskyRow)
{
    auto dir = scratch("grunsky");
    auto cfg = write_config(dir, R"({"model": {"kind": "ExteriorMap", "coeffs": [[0, 0], [0.5, 0]]}, "N": 16})");
    EXPECT_EQ(run("--config " + cfg.string() + " --suite grunsky --out " + (dir / "out").string()), 0);
    EXPECT_EQ(slurp(dir / "out" / "grunsky_vs_c.csv"), "c, nu\n0.5, 0.500000\n");
}

TEST(Cli, SweepOverC)
{
    auto dir = scratch("sweep");
    auto cfg = write_config(dir, R"({"model": {"kind": "Circle"}, "N": 16, "suites": ["grunsky"],
                                     "sweep": {"parameter": "c", "values": [0.1, 0.3, 0.5, 0.8]}})");
    EXPECT_EQ(run("--config " + cfg.string() + " --out " + (dir / "out").string()), 0);
    EXPECT_EQ(slurp(dir / "out" / "grunsky_vs_c.csv"), "c, nu\n0.1, 0.100000\n0.3, 0.300000\n0.5, 0.500000\n0.8, 0.800000\n");
    std::string table = slurp(dir / "out" / "sweep_c.csv");
    EXPECT_EQ(table.find("false"), std::string::npos) << table;
}

TEST(Cli, ConfigErrors)
{
    auto dir = scratch("errors");
    auto out = " --out " + (dir / "out").string();
    EXPECT_EQ(run("--suite nonsense" + out), 2);
    EXPECT_EQ(run("--config " + write_config(dir, R"({"N": 4})").string() + out), 2);
    EXPECT_EQ(run("--config " + write_config(dir, "{not json").string() + out), 2);
    EXPECT_EQ(run("--config " + write_config(dir, R"({"model": {"kind": "Square"}})").string() + out), 2);
    EXPECT_EQ(run("--threads 0" + out), 2);
}

TEST(Cli, FailingToleranceGivesExitOne)
{
    auto dir = scratch("fail");
    auto cfg = write_config(dir, R"({"model": {"kind": "ExteriorMap", "coeffs": [[0, 0], [0.5, 0]]}, "N": 16,
                                     "tolerances": {"Grunsky norm below one": 0.1}})");
    EXPECT_EQ(run("--config " + cfg.string() + " --suite grunsky --out " + (dir / "out").string()), 1);
    auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    EXPECT_FALSE(report["pass"].get<bool>());
}

TEST(Cli, SingleThreadRunsAreIdentical)
{
    auto dir = scratch("determinism");
    std::string base = "--suite kernels --suite schiffer --suite plemelj --seed 7 --threads 1 --out ";
    ASSERT_EQ(run(base + (dir / "a").string()), 0);
    ASSERT_EQ(run(base + (dir / "b").string()), 0);
    EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
    EXPECT_EQ(slurp(dir / "a" / "summary.csv"), slurp(dir / "b" / "summary.csv"));
}
