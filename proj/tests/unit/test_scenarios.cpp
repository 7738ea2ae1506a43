#include <gtest/gtest.h>

#include <filesystem>

#include "zclaim/sim/config.hpp"
#include "zclaim/sim/scenario.hpp"

namespace zclaim::sim {
namespace {

std::vector<std::filesystem::path> bundled() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(ZCLAIM_SCENARIO_DIR)) {
    if (e.path().extension() == ".cfg") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

ScenarioResult run_file(const std::string& stem) {
  return run_scenario(load_scenario(std::string(ZCLAIM_SCENARIO_DIR) + "/" + stem + ".cfg"));
}

std::string describe(const ScenarioResult& r) {
  std::string s;
  for (const auto& x : r.expectations) {
    if (!x.pass) s += x.metric + " expected " + x.expected + " got " + x.actual + "\n";
  }
  for (const auto& x : r.invariant_failures) s += "invariant " + x + "\n";
  for (const auto& x : r.conformance.violations) s += "conformance " + x + "\n";
  return s;
}

class Bundled : public ::testing::TestWithParam<std::filesystem::path> {};

TEST_P(Bundled, MeetsItsExpectations) {
  const auto r = run_scenario(load_scenario(GetParam().string()));
  EXPECT_TRUE(r.ok()) << describe(r);
  EXPECT_EQ(r.conformance.open, 0U) << r.name;
}

// Nothing a vault or user keeps private shows up in what observers see.
TEST_P(Bundled, PublicLogHasNoWitnessData) {
  const auto r = run_scenario(load_scenario(GetParam().string()));
  for (const char* field : {"obligations", "nullifier_key", "rcm", "secret", "esk", "value=", "witness"}) {
    EXPECT_EQ(r.public_log.find(field), std::string::npos) << r.name << " leaks " << field;
  }
  for (const auto& [vault, received] : r.vault_received) {
    for (const auto a : received) {
      EXPECT_EQ(r.public_log.find(std::to_string(a.units())), std::string::npos)
          << r.name << ": lock value " << a.units() << " received by " << vault;
    }
  }
}

TEST_P(Bundled, Deterministic) {
  const auto cfg = load_scenario(GetParam().string());
  const auto a = run_scenario(cfg);
  const auto b = run_scenario(cfg);
  EXPECT_EQ(a.trace_csv, b.trace_csv);
  EXPECT_EQ(a.metrics_csv, b.metrics_csv);
  EXPECT_EQ(a.public_log, b.public_log);
  EXPECT_EQ(a.summary, b.summary);
}

INSTANTIATE_TEST_SUITE_P(Scenarios, Bundled, ::testing::ValuesIn(bundled()),
                         [](const auto& info) { return info.param.stem().string(); });

TEST(Scenario, IssueHappyNumbers) {
  const auto r = run_file("issue_happy");
  EXPECT_EQ(r.summary.at("supply"), "4900000000");
  EXPECT_EQ(r.summary.at("slashes"), "0");
  EXPECT_EQ(r.summary.at("issue.first"), "IssueSuccess");
  ASSERT_EQ(r.vault_received.at("v1").size(), 1U);
  EXPECT_EQ(r.vault_received.at("v1")[0], Amount{5000000000});
}

TEST(Scenario, EclipseRaisesViolation) {
  const auto r = run_file("relay_eclipse");
  EXPECT_GE(std::stoull(r.summary.at("safety_violations")), 1U);
}

TEST(Scenario, SeedOverrideChangesRandomParts) {
  const auto cfg = load_scenario(std::string(ZCLAIM_SCENARIO_DIR) + "/issue_happy.cfg");
  RunOptions a, b;
  a.seed = 1;
  b.seed = 2;
  const auto ra = run_scenario(cfg, a);
  const auto rb = run_scenario(cfg, b);
  EXPECT_EQ(ra.seed, 1U);
  EXPECT_NE(ra.public_log, rb.public_log);
  EXPECT_EQ(ra.summary.at("supply"), rb.summary.at("supply"));
}

TEST(Scenario, WriteOutputs) {
  const auto dir = std::filesystem::temp_directory_path() / "zclaim_test_outputs";
  std::filesystem::remove_all(dir);
  write_outputs(run_file("issue_happy"), dir);
  for (const char* f : {"trace.csv", "public.log", "metrics.csv", "events.csv", "summary.csv", "expectations.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::filesystem::remove_all(dir);
}

TEST(Scenario, RandomEpisodesStayClean) {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const auto cfg = random_episode(seed);
    ASSERT_NO_THROW(check_references(cfg));
    const auto r = run_scenario(cfg);
    ASSERT_TRUE(r.invariant_failures.empty()) << "seed " << seed << "\n" << describe(r);
    ASSERT_TRUE(r.conformance.violations.empty()) << "seed " << seed << "\n" << describe(r);
  }
}

TEST(RelayRace, MinorityAdversaryNeverRevertsFinality) {
  const auto r = relay_race(0.3, 2000, 3, 24, 48);
  EXPECT_EQ(r.blocks, 2000U);
  EXPECT_GT(r.adversary_blocks, 0U);
  EXPECT_EQ(r.finality_reversions, 0U);
  EXPECT_LT(r.deepest_reorg, 24U);
}

}  // namespace
}  // namespace zclaim::sim
