#pragma once

// The issuing chain I: a Sapling-like wZEC pool extended with Mint and Burn
// transfers whose statements are checked by a simulated verifier, the
// pending/confirmed/voided lifecycle of those transfers, and the transparent
// balances of I's native currency i.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zclaim/relay.hpp"
#include "zclaim/shielded_pool.hpp"
#include "zclaim/vault_registry.hpp"

namespace zclaim {

/// floor(amount * (1 - f)), the post-fee value used by both transfer kinds.
Amount after_fee(Amount amount, Ratio fee);

struct InclusionProof {
  BlockHash block{};
  MerklePath path;
};

struct MintStatement {
  NoteCommitment lock_cm;
  NoteCommitment wzec_cm;
  Bytes32 permit_nonce{};
  InclusionProof inclusion;
};

struct MintWitness {
  Note lock_note;
  Bytes32 nonce{};
  Note wzec_note;
};

struct MintTransfer {
  MintStatement statement;
  MintWitness witness;
};

/// The pool part spends wZEC notes into optional change; its value_out is
/// the burnt amount. The release note is what the redeemer wants on Zcash.
struct BurnTransfer {
  ShieldedTx pool_tx;
  NoteCommitment release_cm;
  Note release_note;  // witness
};

enum class PendingKind { mint, burn };
enum class TxStatus { pending, confirmed, voided };
const char* to_string(TxStatus s);

struct PendingTx {
  TxId id{};
  PendingKind kind = PendingKind::mint;
  TxStatus status = TxStatus::pending;
  Tick deadline = 0;
  RequestId request{};
};

class IssuingChain {
public:
  explicit IssuingChain(std::uint32_t tree_depth = kDefaultTreeDepth) : pool_(tree_depth) {}

  // -- transparent currency i ------------------------------------------------
  void credit(ActorId who, Amount amount);
  Status debit(ActorId who, Amount amount);
  [[nodiscard]] Amount balance(ActorId who) const;
  Status lock_warranty(RequestId request, ActorId who, Amount amount);
  /// Pays the warranty locked for `request` to `to` (the locker or a
  /// counterparty). Throws if nothing is locked: that is a protocol bug.
  void release_warranty(RequestId request, ActorId to);
  [[nodiscard]] bool has_warranty(RequestId request) const { return warranties_.count(request) != 0; }
  void add_to_liquidation_pool(Amount amount) { liquidation_pool_ += amount; }
  /// Sum of balances, locked warranties and the liquidation pool.
  [[nodiscard]] Amount total_outside_collateral() const;

  // -- Mint / Burn -------------------------------------------------------------
  Result<PendingTx> submit_mint_tx(const MintTransfer& t, const Address& vault_address, const Bytes32& expected_nonce,
                                   const RegistryParams& params, const Relay& relay, Tick now, Tick deadline,
                                   RequestId request);
  Result<PendingTx> submit_burn_tx(const BurnTransfer& t, const RegistryParams& params, Tick now, Tick deadline,
                                   RequestId request);
  void finalize_tx(const TxId& id, TxStatus outcome, Tick now);

  // -- wZEC pool ---------------------------------------------------------------
  Result<TxId> wzec_transfer(const ShieldedTx& tx, Tick now);

  [[nodiscard]] Amount supply() const { return supply_; }
  [[nodiscard]] const ShieldedPool& pool() const { return pool_; }
  [[nodiscard]] const std::set<Nullifier>& escrowed() const { return escrow_; }
  [[nodiscard]] const PendingTx* pending(const TxId& id) const;
  [[nodiscard]] const MintTransfer* mint_of(const TxId& id) const;
  [[nodiscard]] const BurnTransfer* burn_of(const TxId& id) const;
  [[nodiscard]] const std::map<TxId, PendingTx>& transactions() const { return txs_; }
  [[nodiscard]] bool lock_cm_used(const NoteCommitment& cm) const { return used_lock_cms_.count(cm) != 0; }

  /// Observer view: statements and statuses only, one record per line.
  [[nodiscard]] const std::vector<std::string>& public_log() const { return public_log_; }

  // Running totals for the supply and relation laws.
  [[nodiscard]] Amount total_minted() const { return minted_; }
  [[nodiscard]] Amount total_burnt() const { return burnt_; }

private:
  void log(Tick now, std::string line);

  ShieldedPool pool_;
  std::set<Nullifier> escrow_;
  Amount supply_;
  Amount minted_;
  Amount burnt_;

  std::map<ActorId, Amount> balances_;
  std::map<RequestId, std::pair<ActorId, Amount>> warranties_;
  Amount liquidation_pool_;

  std::set<NoteCommitment> used_lock_cms_;
  std::set<Bytes32> used_nonces_;
  std::map<TxId, PendingTx> txs_;
  std::map<TxId, MintTransfer> mints_;
  std::map<TxId, BurnTransfer> burns_;

  std::vector<std::string> public_log_;
};

}  // namespace zclaim
