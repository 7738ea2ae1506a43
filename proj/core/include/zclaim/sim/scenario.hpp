#pragma once

// Runs a ScenarioConfig through the protocol engine with scripted actors and
// collects the trace, per-tick metrics and final-state checks.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zclaim/conformance.hpp"
#include "zclaim/sim/config.hpp"

namespace zclaim::sim {

struct Expectation {
  std::string metric;
  std::string expected;
  std::string actual;
  bool pass = false;
};

/// Inputs of an accepted proof of capacity, for re-checking the capacity
/// inequality outside the registry.
struct PocRecord {
  Tick tick = 0;
  std::string vault;
  Amount collateral;
  Amount obligations;
  Ratio rate;
};

struct ScenarioResult {
  std::string name;
  std::uint64_t seed = 0;
  std::string trace_csv;
  std::string public_log;
  std::string metrics_csv;
  std::string events_csv;
  /// Final values by metric name (see summary_csv for the full list).
  std::map<std::string, std::string> summary;
  /// "tick:invariant" for every invariant found broken at the end of a tick.
  std::vector<std::string> invariant_failures;
  ConformanceReport conformance;
  std::vector<Expectation> expectations;
  std::vector<PocRecord> accepted_pocs;
  /// Lock notes each vault decrypted from C^V, by vault name.
  std::map<std::string, std::vector<Amount>> vault_received;

  [[nodiscard]] std::string summary_csv() const;
  [[nodiscard]] std::string expectations_csv() const;
  [[nodiscard]] bool ok() const;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  /// Check the ledger invariants after every tick. The full set, including
  /// the Zcash replay, always runs once at the end.
  bool check_every_tick = true;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// Writes trace.csv, public.log, metrics.csv, events.csv, summary.csv and
/// expectations.csv into `dir`, creating it if needed.
void write_outputs(const ScenarioResult& result, const std::filesystem::path& dir);

/// A small random scenario mixing honest and byzantine strategies, with short
/// deadlines and a shallow relay so every phase is reached quickly.
ScenarioConfig random_episode(std::uint64_t seed);

// ---------------------------------------------------------------------------
// Relay race: an adversary with hash share alpha mines a private branch and
// publishes it whenever it is heavier than the honest chain; one honest
// relayer forwards every main-chain header.

struct RaceResult {
  std::uint64_t blocks = 0;
  std::uint64_t adversary_blocks = 0;
  std::uint64_t reorgs = 0;
  std::uint64_t deepest_reorg = 0;
  std::uint64_t finality_reversions = 0;
};

/// `alpha` is the adversary's share of blocks. The adversary abandons its
/// branch once it trails the honest chain by more than `give_up` blocks.
RaceResult relay_race(double alpha, std::uint64_t blocks, std::uint64_t seed, std::uint64_t finality_depth,
                      std::uint64_t give_up);

}  // namespace zclaim::sim
