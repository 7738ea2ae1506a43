#pragma once

// Scenario description and its flat `key = value` text form.
//
//   name = issue_happy
//   horizon = 120
//   params.fee = 2/100
//   oracle.rate.0 = 2
//   vault.v1.collateral = 30000000000
//   user.alice.zec = 6000000000
//   issue.first.user = alice
//   issue.first.vault = v1
//   issue.first.amount = 5000000000
//   expect.supply = 4900000000
//
// Amounts are integer base units (1 ZEC = 10^8), rationals are `num/den`.

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zclaim/protocol.hpp"

namespace zclaim::sim {

class ConfigError : public std::runtime_error {
public:
  ConfigError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

struct VaultSpec {
  std::string name;
  Amount collateral;
  /// Extra i held by the owner outside the vault.
  Amount i_balance;
  std::vector<Amount> zec;
  std::string strategy = "honest";
  bool poi = false;
};

struct UserSpec {
  std::string name;
  Amount i_balance = Amount::coins(10);
  std::vector<Amount> zec;
};

struct IssueSpec {
  std::string label;
  std::string user;
  std::string vault;
  Tick at = 1;
  Amount amount;
  std::string strategy = "honest";
  std::string replay_of;  // label of an earlier issue
};

struct RedeemSpec {
  std::string label;
  std::string user;
  std::string vault;
  Tick at = 1;
  Amount amount;
  std::string strategy = "honest";
  std::string reuse_of;  // label of an earlier redeem
};

struct AdversarySpec {
  std::string strategy = "none";
  Tick at = 0;
  /// eclipse: private blocks to mine before feeding them to the relay.
  std::uint64_t blocks = 0;
  /// reorg_race: the adversary's share of all blocks, below 1.
  Ratio alpha{0, 1};
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  Tick horizon = 100;
  ProtocolParams params;
  bool relay_muted = false;
  std::map<Tick, Ratio> rates;
  std::vector<VaultSpec> vaults;
  std::vector<UserSpec> users;
  std::vector<IssueSpec> issues;
  std::vector<RedeemSpec> redeems;
  AdversarySpec adversary;
  /// Final-state assertions: metric name -> expected value.
  std::map<std::string, std::string> expect;
};

inline const std::vector<std::string>& vault_strategies() {
  static const std::vector<std::string> s = {"honest", "silent", "wrong_note", "replay_release", "blind",
                                             "challenge_all"};
  return s;
}
inline const std::vector<std::string>& issue_strategies() {
  static const std::vector<std::string> s = {"honest",     "no_lock", "corrupt_ciphertext", "wrong_ciphertext",
                                             "random_rcm", "replay",  "overclaim",          "adversary_lock"};
  return s;
}
inline const std::vector<std::string>& redeem_strategies() {
  static const std::vector<std::string> s = {"honest", "reuse_note", "corrupt_ciphertext"};
  return s;
}
inline const std::vector<std::string>& adversary_strategies() {
  static const std::vector<std::string> s = {"none", "eclipse", "reorg_race"};
  return s;
}

/// Throws ConfigError with the offending line number.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::string& path);

/// Cross-reference checks (users, vaults, labels, strategies). Throws
/// ConfigError with line 0 on failure.
void check_references(const ScenarioConfig& cfg);

}  // namespace zclaim::sim
