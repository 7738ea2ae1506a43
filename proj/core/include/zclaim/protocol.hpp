#pragma once

// Issue and Redeem state machines over the two simulated ledgers.
//
// The Engine owns every ledger plus the participants' wallets and runs on a
// single logical clock. Each operation is attributed to an actor and leaves
// one trace record, whether it succeeds or is rejected; rejected operations
// leave no other side effect.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zclaim/issuing_chain.hpp"
#include "zclaim/oracle.hpp"
#include "zclaim/relay.hpp"
#include "zclaim/rng.hpp"
#include "zclaim/vault_registry.hpp"
#include "zclaim/zcash_chain.hpp"

namespace zclaim {

enum class RequestKind { issue, redeem };

enum class RequestState {
  issue_start,
  awaiting_mint,
  await_issue_confirm,
  issue_challenged,
  issue_success,
  issue_expired,  // no mint before the permit ran out
  redeem_start,
  await_redeem_confirm,
  redeem_challenged,
  redeem_success,
  redeem_expired,  // vault never proved a release
};

const char* to_string(RequestState s);
bool is_terminal(RequestState s);

struct Deadlines {
  std::optional<Tick> mint;
  std::optional<Tick> confirm_issue;
  std::optional<Tick> confirm_redeem;
};

struct LockPermit {
  std::uint32_t permit_id = 0;
  ActorId issuer{};
  VaultId vault{};
  Bytes32 nonce{};
  Tick expiry = 0;
  bool used = false;
};

/// Public record of one Issue or Redeem request.
struct RequestRecord {
  RequestId id{};
  RequestKind kind = RequestKind::issue;
  RequestState state = RequestState::issue_start;
  ActorId user{};
  VaultId vault{};
  std::uint32_t permit_id = 0;  // issue only
  Bytes32 nonce{};              // n_lock, issue only
  /// Lock commitment (issue, set by the mint) or release commitment (redeem).
  NoteCommitment cm;
  NoteCiphertext ciphertext;  // C^V
  Deadlines deadlines;
  Amount warranty;
  std::optional<TxId> pending_tx;
  /// Zcash transactions sent for this request (locks or releases).
  std::vector<TxId> zcash_txs;
};

struct ProtocolParams {
  RegistryParams registry;
  Tick delta_mint = 48;
  Tick delta_confirm_issue = 6;
  Tick delta_confirm_redeem = 48;
  Tick zc_block_interval = 1;
  std::uint64_t finality_depth = kDefaultFinalityDepth;
  ChainConfig zcash;
  std::uint32_t issuing_tree_depth = kDefaultTreeDepth;
};

/// Throws std::invalid_argument on inconsistent parameters.
void validate(const ProtocolParams& params);

struct TraceRecord {
  Tick tick = 0;
  std::string actor;
  std::string op;
  std::optional<RequestId> request;
  std::string state_before;
  std::string state_after;
  std::string outcome;
};

inline constexpr const char* kTraceHeader = "tick,actor,op,request_id,state_before,state_after,outcome";
std::string to_csv(const TraceRecord& r);

/// Something tick() did on its own: a deadline firing, an expiry, a
/// liquidation, a safety violation noticed against ground truth.
struct Event {
  Tick tick = 0;
  std::string kind;
  std::optional<RequestId> request;
  std::optional<VaultId> vault;
};

struct Metrics {
  std::uint64_t issues_completed = 0;
  std::uint64_t redeems_completed = 0;
  std::uint64_t slashes = 0;
  Amount slashed;
  std::uint64_t auto_confirms = 0;
  std::uint64_t mint_timeouts = 0;
  std::uint64_t redeem_timeouts = 0;
  std::uint64_t challenges_upheld = 0;
  std::uint64_t challenges_rejected = 0;
  std::uint64_t replays_rejected = 0;
  std::uint64_t liquidations = 0;
  Amount liquidated;
  /// The relay accepted an inclusion proof for a block that is not on the
  /// honest Zcash main chain.
  std::uint64_t safety_violations = 0;
  Amount zec_locked;    // lock notes behind confirmed mints
  Amount zec_released;  // release notes behind confirmed burns
  Amount zec_forfeited; // lock notes behind upheld issue challenges
};

struct Participant {
  ActorId id{};
  std::string name;
  SpendingKey zcash_key;
  SpendingKey wzec_key;
  /// Notes this participant knows it can spend, once they are on chain.
  std::vector<Note> zcash_notes;
  std::vector<Note> wzec_notes;
};

enum class CiphertextFault { none, corrupt, wrong_note };

struct LockOptions {
  bool derive_rcm = true;
  /// Send the lock on the adversary's private branch instead.
  bool adversary_branch = false;
};

struct MintOptions {
  CiphertextFault fault = CiphertextFault::none;
  /// Claim wZEC equal to the locked value instead of the post-fee value.
  bool overclaim = false;
  /// Cite the lock note of an earlier request instead of this one's.
  std::optional<RequestId> replay_lock_of;
  /// Anchor the inclusion proof at this block instead of the relay's latest
  /// final block.
  std::optional<BlockHash> anchor;
};

struct MintPackage {
  MintTransfer transfer;
  NoteCiphertext ciphertext;
};

struct BurnOptions {
  CiphertextFault fault = CiphertextFault::none;
  /// Ask for exactly the same release note as an earlier redeem request.
  std::optional<RequestId> reuse_release_of;
};

struct BurnPackage {
  BurnTransfer transfer;
  NoteCiphertext ciphertext;
};

struct ReleaseOptions {
  /// Release a note worth one unit more than requested.
  bool wrong_value = false;
};

/// What an honest vault finds when it opens C^V.
enum class Inspection { ok, undecryptable, mismatch };

struct Accounting {
  Amount wzec_supply;
  Amount minted;
  Amount burnt;
  Amount zec_locked;
  Amount zec_released;
  Amount i_issued;
  Amount i_outside_collateral;
  Amount i_collateral;
  /// Slashed warranties plus liquidated collateral, in i.
  Amount i_compensation;
};

class Engine {
public:
  Engine(ProtocolParams params, std::uint64_t seed);

  // -- setup ---------------------------------------------------------------
  /// Creates keys, credits `i_balance` and queues one Zcash allocation per
  /// entry of `zcash_funds` for the next block.
  ActorId add_participant(const std::string& name, Amount i_balance, const std::vector<Amount>& zcash_funds);
  Result<VaultId> register_vault(ActorId owner, Amount collateral);
  RateFeed& oracle() { return oracle_; }
  void set_relay_muted(bool muted) { relay_muted_ = muted; }

  // -- vault proofs ------------------------------------------------------------
  Status submit_poc(VaultId vault);
  Status submit_poc_claiming(VaultId vault, Amount claimed_obligations);
  Status submit_pob(VaultId vault);
  Status submit_poi(VaultId vault);

  // -- Issue -------------------------------------------------------------------
  Result<RequestId> request_lock(ActorId issuer, VaultId vault);
  Result<TxId> do_lock(ActorId issuer, RequestId request, Amount amount, LockOptions opts = {});
  /// Builds (without submitting) the Mint transfer for `request`.
  Result<MintPackage> make_mint(ActorId issuer, RequestId request, MintOptions opts = {});
  Result<PendingTx> do_mint(ActorId issuer, RequestId request, const MintPackage& package);
  Inspection inspect_issue(VaultId vault, RequestId request) const;
  Status confirm_issue(VaultId vault, RequestId request);
  Status challenge_issue(VaultId vault, RequestId request, const SharedSecret& revealed,
                         const ChallengeWitness& witness);
  /// Challenge using the secret the vault itself derives for C^V.
  Status challenge_issue(VaultId vault, RequestId request);

  // -- Redeem ------------------------------------------------------------------
  Result<BurnPackage> make_burn(ActorId redeemer, VaultId vault, Amount wzec_burn, BurnOptions opts = {});
  Result<PendingTx> do_burn(ActorId redeemer, VaultId vault, const BurnPackage& package);
  Inspection inspect_redeem(VaultId vault, RequestId request) const;
  Result<TxId> do_release(VaultId vault, RequestId request, ReleaseOptions opts = {});
  /// Inclusion proof for `cm` at the relay's latest final block.
  Result<InclusionProof> make_inclusion(const NoteCommitment& cm) const;
  /// Inclusion proof for the note the vault actually released for `request`.
  Result<InclusionProof> release_proof(VaultId vault, RequestId request) const;
  Status confirm_redeem(VaultId vault, RequestId request, const InclusionProof& proof);
  Status challenge_redeem(VaultId vault, RequestId request, const SharedSecret& revealed,
                          const ChallengeWitness& witness);
  Status challenge_redeem(VaultId vault, RequestId request);

  // -- plain wZEC payments -------------------------------------------------------
  Result<TxId> pay_wzec(ActorId from, ActorId to, Amount amount);

  // -- clock ---------------------------------------------------------------------
  std::vector<Event> tick();

  // -- adversary -------------------------------------------------------------------
  void adversary_fork();
  void adversary_mine(std::size_t blocks);
  /// Feeds the adversary branch's headers to the relay (an eclipsed relay).
  void adversary_publish_to_relay();
  /// Broadcasts the adversary branch to Zcash; adopted if heavier.
  Result<ReorgReport> adversary_publish_to_network();

  // -- inspection -----------------------------------------------------------------
  [[nodiscard]] Tick now() const { return now_; }
  [[nodiscard]] const ProtocolParams& params() const { return params_; }
  [[nodiscard]] const ZcashChain& zcash() const { return zcash_; }
  [[nodiscard]] const Relay& relay() const { return relay_; }
  [[nodiscard]] const VaultRegistry& registry() const { return registry_; }
  [[nodiscard]] const IssuingChain& issuing() const { return issuing_; }
  [[nodiscard]] const RateFeed& rates() const { return oracle_; }
  [[nodiscard]] const std::map<RequestId, RequestRecord>& requests() const { return requests_; }
  [[nodiscard]] const RequestRecord* request(RequestId id) const;
  [[nodiscard]] const LockPermit* permit(std::uint32_t permit_id) const;
  [[nodiscard]] const Participant& participant(ActorId id) const { return participants_.at(id); }
  [[nodiscard]] const std::map<ActorId, Participant>& participants() const { return participants_; }
  [[nodiscard]] const std::vector<TraceRecord>& trace() const { return trace_; }
  [[nodiscard]] const std::vector<Event>& events() const { return events_; }
  [[nodiscard]] const Metrics& metrics() const { return metrics_; }
  [[nodiscard]] Accounting accounting() const;
  enum class InvariantScope {
    ledger,  // supply, conservation and request/transaction agreement
    full,    // also rebuilds the Zcash pool from genesis
  };
  /// Names of violated invariants; empty when all hold.
  [[nodiscard]] std::vector<std::string> check_invariants(InvariantScope scope = InvariantScope::full) const;

  /// Spendable balances as the owner's wallet sees them.
  [[nodiscard]] Amount zcash_balance(ActorId who) const;
  [[nodiscard]] Amount wzec_balance(ActorId who) const;
  /// Lock notes a vault has learned by decrypting C^V, in confirmation order.
  [[nodiscard]] std::vector<Note> vault_received(VaultId vault) const;

  [[nodiscard]] std::string trace_csv() const;
  /// Everything an outside observer sees: trace, issuing-chain log, public
  /// registry state, relay tip.
  [[nodiscard]] std::string public_view() const;
  /// Digest of the full simulation state, for state-space exploration.
  [[nodiscard]] Bytes32 fingerprint() const;

private:
  struct Secrets {
    std::optional<Note> lock_note;
    std::optional<Note> release_note;
    std::optional<Note> released;  // what the vault sent on Zcash
  };
  struct KnownSecret {
    Address recipient;
    SharedSecret secret;
  };

  Participant& person(ActorId id);
  RequestRecord* find_request(RequestId id);
  const VaultRecord* vault_of(VaultId id) const;
  std::string vault_actor(VaultId id) const;
  std::string actor_name(ActorId id) const;
  std::string request_state(RequestId id) const;
  void record(const std::string& actor, const std::string& op, std::optional<RequestId> request,
              std::string before, std::string after, const std::string& outcome);
  void emit(std::vector<Event>& out, std::string kind, std::optional<RequestId> request,
            std::optional<VaultId> vault);

  Result<Ratio> current_rate() const;
  std::optional<KnownSecret> secret_for(const Address& recipient, const NoteCiphertext& ct) const;
  NoteCiphertext encrypt_for(const Note& note, const Address& recipient, CiphertextFault fault);
  Result<ShieldedTx> build_zcash_payment(const Participant& from, std::vector<Note> outputs);
  std::vector<Note> spendable_zcash(const Participant& p) const;
  std::vector<Note> spendable_wzec(const Participant& p) const;
  Bytes32 fresh_rcm() { return random_bytes<32>(rng_); }

  void finish_issue(RequestRecord& r);
  void apply_deadlines(std::vector<Event>& out);
  void relay_honest_headers();
  /// Flags requests whose cited Zcash block is not on the honest main chain.
  void check_ground_truth(std::vector<Event>* out);

  ProtocolParams params_;
  Rng rng_;
  Tick now_ = 0;
  ZcashChain zcash_;
  Relay relay_;
  RateFeed oracle_;
  VaultRegistry registry_;
  IssuingChain issuing_;
  bool relay_muted_ = false;

  std::map<ActorId, Participant> participants_;
  std::map<RequestId, RequestRecord> requests_;
  std::map<RequestId, Secrets> secrets_;
  std::map<std::uint32_t, LockPermit> permits_;
  std::map<Bytes32, KnownSecret> shared_secrets_;  // by ephemeral public key
  std::map<VaultId, std::vector<Note>> vault_received_;
  std::map<RequestId, BlockHash> anchors_;  // block cited by a mint or redeem proof
  std::set<RequestId> flagged_;
  std::uint32_t next_actor_ = 1;
  std::uint32_t next_request_ = 1;
  std::uint32_t next_permit_ = 1;

  Amount i_issued_;
  std::vector<TraceRecord> trace_;
  std::vector<Event> events_;
  Metrics metrics_;
};

}  // namespace zclaim
