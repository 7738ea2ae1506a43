// zclaim: run protocol scenarios and the amount-splitting privacy analysis.

#include <CLI11.hpp>

#include <iostream>

#include "zclaim/sim/config.hpp"
#include "zclaim/sim/privacy.hpp"
#include "zclaim/sim/scenario.hpp"
#include "zclaim/splitting.hpp"

namespace {

using namespace zclaim;

int run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out) {
  sim::ScenarioConfig cfg;
  try {
    cfg = sim::load_scenario(path);
  } catch (const sim::ConfigError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 2;
  }
  sim::RunOptions opts;
  opts.seed = seed;
  const auto result = sim::run_scenario(cfg, opts);
  sim::write_outputs(result, out);

  std::cout << "scenario " << result.name << " seed " << result.seed << "\n";
  for (const auto& x : result.expectations) {
    std::cout << (x.pass ? "  ok   " : "  FAIL ") << x.metric << " expected " << x.expected << " got " << x.actual
              << "\n";
  }
  for (const auto& bad : result.invariant_failures) std::cout << "  FAIL invariant " << bad << "\n";
  for (const auto& bad : result.conformance.violations) std::cout << "  FAIL conformance " << bad << "\n";
  std::cout << (result.ok() ? "PASS" : "FAIL") << "\n";
  return result.ok() ? 0 : 1;
}

int privacy(unsigned h, unsigned k, std::optional<std::uint64_t> total, std::uint64_t seed, const std::string& out) {
  sim::PrivacyOptions opts;
  opts.h = h;
  opts.k = k;
  opts.total = total;
  opts.seed = seed;
  sim::PrivacyResult result;
  try {
    result = sim::run_privacy_analysis(opts);
  } catch (const std::invalid_argument& e) {
    std::cerr << "privacy: " << e.what() << "\n";
    return 2;
  }
  sim::write_privacy_outputs(result, out);

  std::cout << "h=" << h << " k=" << k << " m=" << result.cfg.m << "\n";
  std::cout << "  bounds (adopted reading): " << (result.bounds.primary_pass() ? "pass" : "FAIL") << "\n";
  std::cout << "  end-to-end total " << result.total << " in " << result.assignment.size() << " issues, withheld "
            << result.split.withheld << ": " << (result.e2e.ok() ? "pass" : "FAIL") << "\n";
  std::cout << "  observer views: " << (result.views_ok() ? "one piece each, total not visible" : "FAIL") << "\n";
  std::cout << "  vault inference replay: " << (result.inference_ok() ? "matches" : "FAIL") << "\n";
  std::cout << (result.ok() ? "PASS" : "FAIL") << "\n";
  return result.ok() ? 0 : 1;
}

int check_bounds(unsigned h, unsigned k) {
  if (h > sim::kMaxPrivacyH) {
    std::cerr << "check-bounds: h must be <= " << sim::kMaxPrivacyH << "\n";
    return 2;
  }
  split::BoundsReport report;
  try {
    report = split::check_bounds(split::make_config(h, k));
  } catch (const std::invalid_argument& e) {
    std::cerr << "check-bounds: " << e.what() << "\n";
    return 2;
  }
  std::cout << report.to_csv();
  std::cerr << (report.primary_pass() ? "PASS" : "FAIL") << "\n";
  return report.primary_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ZCLAIM protocol simulator and splitting analysis"};
  // --h is the size parameter, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  std::string scenario, out;
  std::optional<std::uint64_t> seed;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario file");
  run_cmd->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "Override the scenario's seed");
  run_cmd->add_option("--out", out, "Output directory")->required();

  unsigned h = 0, k = 0;
  std::optional<std::uint64_t> total;
  std::uint64_t privacy_seed = 1;
  auto* privacy_cmd = app.add_subcommand("privacy", "Bound checks plus an end-to-end split");
  privacy_cmd->add_option("--h", h, "Totals range over [1, 2^h - 1]")->required();
  privacy_cmd->add_option("--k", k, "Number of pieces (a power of two)")->required();
  privacy_cmd->add_option("--out", out, "Output directory")->required();
  privacy_cmd->add_option("--total", total, "Total to split end to end, in piece units");
  privacy_cmd->add_option("--seed", privacy_seed, "Seed for the split and the end-to-end run");

  auto* bounds_cmd = app.add_subcommand("check-bounds", "Print the bound report as CSV");
  bounds_cmd->add_option("--h", h, "Totals range over [1, 2^h - 1]")->required();
  bounds_cmd->add_option("--k", k, "Number of pieces (a power of two)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(scenario, seed, out);
    if (*privacy_cmd) return privacy(h, k, total, privacy_seed, out);
    return check_bounds(h, k);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
