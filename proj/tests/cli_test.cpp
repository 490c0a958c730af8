#include "cli_support.hpp"
#include "test_support.hpp"

#include <rehab/report.hpp>

#include <gtest/gtest.h>

using namespace rehab;
using rehab::testing::fixture_path;
using rehab::testing::read_file;
using rehab::testing::run_cli;
using rehab::testing::TempDir;

namespace {

json summary_of(const std::string& jsonl) {
    std::istringstream in(jsonl);
    std::string line, last;
    while (std::getline(in, line)) {
        if (!line.empty()) last = line;
    }
    return json::parse(last);
}

}  // namespace

TEST(Cli, ReplaySuccessFixture) {
    TempDir dir;
    auto r = run_cli("replay " + fixture_path("success.frames.jsonl") + " --no-store --report-jsonl " +
                         (dir / "r.jsonl").string() + " --events " + (dir / "e.jsonl").string(),
                     dir.path());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const json s = summary_of(read_file(dir / "r.jsonl"));
    EXPECT_EQ(s["metrics"]["n_drops"], 1);
    EXPECT_EQ(s["metrics"]["hit_rate"], 1.0);
    EXPECT_EQ(read_file(dir / "e.jsonl"), read_file(fixture_path("success.events.jsonl")));
    EXPECT_NE(r.out.find("Session summary"), std::string::npos);
}

TEST(Cli, ReplayEmptyFileReportsAbsentMetrics) {
    TempDir dir;
    auto r = run_cli("replay " + fixture_path("empty.frames.jsonl") + " --no-store --report-jsonl " +
                         (dir / "r.jsonl").string(),
                     dir.path());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const json s = summary_of(read_file(dir / "r.jsonl"));
    EXPECT_EQ(s["metrics"]["n_drops"], 0);
    EXPECT_TRUE(s["metrics"]["hit_rate"].is_null());
    EXPECT_TRUE(s["metrics"]["accuracy_mre"].is_null());
}

TEST(Cli, CorruptLineIsNamed) {
    TempDir dir;
    auto r = run_cli("replay " + fixture_path("corrupt_line7.frames.jsonl") + " --no-store", dir.path());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("line 7"), std::string::npos) << r.err;
}

TEST(Cli, MissingInputFileIsInputError) {
    TempDir dir;
    EXPECT_EQ(run_cli("replay " + (dir / "nope.jsonl").string() + " --no-store", dir.path()).exit_code, 2);
}

TEST(Cli, UsageErrors) {
    TempDir dir;
    EXPECT_EQ(run_cli("", dir.path()).exit_code, 1);
    EXPECT_EQ(run_cli("frobnicate", dir.path()).exit_code, 1);
    EXPECT_EQ(run_cli("replay", dir.path()).exit_code, 1);
    EXPECT_EQ(run_cli("--help", dir.path()).exit_code, 0);
}

TEST(Cli, BadConfigIsInputError) {
    TempDir dir;
    rehab::testing::write_text(dir / "cfg.json", R"({"dda":{"alpha":3}})");
    auto r = run_cli("--config " + (dir / "cfg.json").string() + " replay " + fixture_path("success.frames.jsonl") +
                         " --no-store",
                     dir.path());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("alpha"), std::string::npos) << r.err;
}

TEST(Cli, StoreRoundTripAndMissingId) {
    TempDir dir;
    const std::string store = (dir / "store").string();
    auto r = run_cli("replay " + fixture_path("success.frames.jsonl") + " --store " + store, dir.path());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    auto list = run_cli("store list --store " + store, dir.path());
    ASSERT_EQ(list.exit_code, 0);
    const std::string id = list.out.substr(0, list.out.find('\t'));
    ASSERT_TRUE(valid_session_id(id)) << list.out;

    auto rep = run_cli("report " + id + " --store " + store, dir.path());
    EXPECT_EQ(rep.exit_code, 0);
    EXPECT_EQ(rep.out, r.out);

    EXPECT_EQ(run_cli("store delete " + id + " --store " + store, dir.path()).exit_code, 0);
    EXPECT_EQ(run_cli("store delete " + id + " --store " + store, dir.path()).exit_code, 3);
    auto missing = run_cli("report " + id + " --store " + store, dir.path());
    EXPECT_EQ(missing.exit_code, 3);
    EXPECT_NE(missing.err.find("NotFound"), std::string::npos);
}

TEST(Cli, SimulateIsDeterministicAndReplayMatches) {
    TempDir dir;
    auto sim = [&](const std::string& tag) {
        return run_cli("simulate --seed 7 --reps 6 --no-store --frames-out " + (dir / (tag + ".frames")).string() +
                           " --events " + (dir / (tag + ".events")).string() + " --report " +
                           (dir / (tag + ".report")).string(),
                       dir.path());
    };
    ASSERT_EQ(sim("a").exit_code, 0);
    ASSERT_EQ(sim("b").exit_code, 0);
    for (const char* ext : {".frames", ".events", ".report"}) {
        EXPECT_EQ(read_file(dir / (std::string("a") + ext)), read_file(dir / (std::string("b") + ext))) << ext;
    }
    auto rep = run_cli("replay " + (dir / "a.frames").string() + " --no-store --report " + (dir / "c.report").string(),
                       dir.path());
    ASSERT_EQ(rep.exit_code, 0);
    EXPECT_EQ(read_file(dir / "c.report"), read_file(dir / "a.report"));
}

TEST(Cli, MissScriptDrivesRadiusToMaximum) {
    TempDir dir;
    auto r = run_cli("simulate --script miss --reps 30 --no-store --report-jsonl " + (dir / "r.jsonl").string(),
                     dir.path());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const json s = summary_of(read_file(dir / "r.jsonl"));
    EXPECT_EQ(s["metrics"]["n_drops"], 30);
    EXPECT_EQ(s["metrics"]["hit_rate"], 0.0);
    EXPECT_EQ(s["end_radius"], DdaConfig{}.r_max);
}

TEST(Cli, ScriptFileWithOverrides) {
    TempDir dir;
    rehab::testing::write_text(dir / "s.json", R"({"waypoints":[
        {"t":0,"hand":[0.25,0.1,1.5],"hand_state":"open"},
        {"t":1,"hand":[0.0,0.1,1.5],"hand_state":"open"}]})");
    auto r = run_cli("simulate --script " + (dir / "s.json").string() + " --speed-scale 0.5 --no-store --frames-out " +
                         (dir / "f.jsonl").string(),
                     dir.path());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    std::istringstream in(read_file(dir / "f.jsonl"));
    EXPECT_EQ(std::count(std::istreambuf_iterator<char>(in), {}, '\n'), 61);
    EXPECT_EQ(run_cli("simulate --script " + (dir / "missing.json").string() + " --no-store", dir.path()).exit_code, 2);
}
