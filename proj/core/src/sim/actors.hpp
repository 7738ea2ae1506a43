#pragma once

// Scripted strategies for vaults, issuers, redeemers and the adversary.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zclaim/protocol.hpp"
#include "zclaim/sim/config.hpp"
#include "zclaim/sim/scenario.hpp"

namespace zclaim::sim::detail {

struct World {
  Engine& engine;
  std::map<std::string, ActorId> people;
  std::map<std::string, VaultId> vaults;
  std::map<std::string, RequestId> issues;   // by label
  std::map<std::string, RequestId> redeems;  // by label
  std::vector<PocRecord> pocs;
  /// Scripted attacks that the protocol turned away.
  std::uint64_t attacks_rejected = 0;
};

class VaultAgent {
public:
  VaultAgent(VaultSpec spec, VaultId id) : spec_(std::move(spec)), id_(id) {}
  void step(World& w);

private:
  void maintain_proofs(World& w);
  void serve_issue(World& w, const RequestRecord& r);
  void serve_redeem(World& w, const RequestRecord& r);

  VaultSpec spec_;
  VaultId id_;
  Tick next_poc_ = 0;
  Tick next_pob_ = 0;
  Tick next_poi_ = 0;
  std::set<RequestId> done_;
  std::set<RequestId> released_;
  std::map<RequestId, Tick> retry_;
  std::optional<InclusionProof> last_proof_;
};

class IssueAgent {
public:
  explicit IssueAgent(IssueSpec spec) : spec_(std::move(spec)) {}
  void step(World& w);

private:
  enum class Phase { waiting, locking, minting, done };
  void try_mint(World& w, ActorId user);

  IssueSpec spec_;
  Phase phase_ = Phase::waiting;
  std::optional<RequestId> request_;
  Tick next_try_ = 0;
};

class RedeemAgent {
public:
  explicit RedeemAgent(RedeemSpec spec) : spec_(std::move(spec)) {}
  void step(World& w);

private:
  RedeemSpec spec_;
  bool done_ = false;
  Tick next_try_ = 0;
};

class Adversary {
public:
  Adversary(AdversarySpec spec, std::uint64_t finality_depth, std::uint64_t seed)
      : spec_(std::move(spec)), k_(finality_depth), rng_(seed) {}
  void step(World& w);
  [[nodiscard]] std::uint64_t reorgs() const { return reorgs_; }

private:
  void eclipse(World& w);
  void race(World& w);

  AdversarySpec spec_;
  std::uint64_t k_;
  Rng rng_;
  std::uint64_t mined_ = 0;
  bool published_ = false;
  std::uint64_t reorgs_ = 0;
};

}  // namespace zclaim::sim::detail
