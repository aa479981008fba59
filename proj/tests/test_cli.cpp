#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "vintage/cli.hpp"
#include "vintage/config.hpp"
#include "vintage/serialize.hpp"

using namespace vintage;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "vintage");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("vintage_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(AuditRegistry, HasEveryAuditOnce) {
    const auto& registry = cli::audit_registry();
    EXPECT_EQ(registry.size(), cli::kExpectedAuditCount);
    std::set<std::string> names;
    for (const auto& a : registry) names.insert(a.name);
    EXPECT_EQ(names.size(), registry.size());
}

TEST(Cli, UsageErrorsExitWithTwo) {
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({"value", "--model", "no-such-model"}).code, 2);
    EXPECT_EQ(invoke({"simulate", "--x", "/no/such/state.csv"}).code, 2);
    EXPECT_EQ(invoke({"simulate", "--horizon", "0.0123"}).code, 2);
}

TEST(Cli, HelpExitsWithZero) {
    const auto r = invoke({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("verify"), std::string::npos);
}

TEST(Cli, RejectsMalformedConfigFile) {
    const auto dir = scratch_dir("config");
    std::ofstream(dir / "bad.json") << R"({"lambda": 1.0, "unknown": 2})";
    EXPECT_EQ(invoke({"value", "--model", (dir / "bad.json").string()}).code, 2);
    std::ofstream(dir / "regime.json") << R"({"lambda": 1.0, "omega": 0.9})";
    EXPECT_EQ(invoke({"value", "--model", (dir / "regime.json").string()}).code, 2);
}

TEST(Cli, SimulateIsDeterministic) {
    const auto a = invoke({"simulate", "--cells", "20", "--x", "bump", "--horizon", "0.5"});
    const auto b = invoke({"simulate", "--cells", "20", "--x", "bump", "--horizon", "0.5"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.substr(0, 15), "time,age,value\n");
}

TEST(Cli, SimulateReadsControlAndStateFiles) {
    const auto dir = scratch_dir("simulate");
    const auto m = canonical_instance("lq-1", 10);
    ControlPath u(0.0, m.dt(), 3, 10);
    u.u0(1) = 1.0;
    {
        std::ofstream c(dir / "u.csv");
        write_control_csv(c, u);
        std::ofstream x(dir / "x.csv");
        write_state_csv(x, CapitalState::constant(m.grid(), 2.0));
    }
    const auto r = invoke({"simulate", "--cells", "10", "--x", (dir / "x.csv").string(), "--controls",
                           (dir / "u.csv").string(), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
}

TEST(Cli, OptimizeValueFeedbackAndReport) {
    const auto dir = scratch_dir("pipeline");
    ASSERT_EQ(invoke({"optimize", "--cells", "20", "--out", (dir / "opt").string()}).code, 0);
    ASSERT_EQ(invoke({"value", "--cells", "20", "--model", "sat-1", "--out", (dir / "val").string()}).code, 0);
    ASSERT_EQ(invoke({"feedback", "--cells", "20", "--horizon", "1", "--out", (dir / "fb").string()}).code, 0);
    for (const char* f : {"opt/report.json", "opt/control.csv", "opt/history.csv", "val/value.json", "val/value.csv",
                          "fb/feedback.json", "fb/closed_loop.csv"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    std::ifstream in(dir / "fb" / "feedback.json");
    const auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j.at("provider").get<std::string>(), "riccati_affine");
    EXPECT_GE(j.at("min_gap").get<double>(), -1e-12);
    const auto r = invoke({"report", dir.string()});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("val/value.json,limit,"), std::string::npos);
}

TEST(Cli, ReportRejectsMalformedJson) {
    const auto dir = scratch_dir("report");
    std::ofstream(dir / "broken.json") << "{";
    EXPECT_EQ(invoke({"report", dir.string()}).code, 2);
}

TEST(Cli, VerifyPassesOnZeroRevenueInstance) {
    const auto dir = scratch_dir("verify");
    const auto r = invoke({"verify", "--model", "null-1", "--cells", "40", "--out", dir.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    std::ifstream in(dir / "summary.json");
    const auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j.at("audits").size(), cli::kExpectedAuditCount);
}

TEST(Cli, ResolveState) {
    const AgeGrid g(1.0, 20);
    EXPECT_EQ(cli::resolve_state("zero", g).h_norm(), 0.0);
    EXPECT_DOUBLE_EQ(cli::resolve_state("ones", g).h_norm(), 1.0);
    EXPECT_GT(cli::resolve_state("bump", g).h_norm(), 0.0);
    EXPECT_THROW(cli::resolve_state("/missing.csv", g), ConfigError);
}
