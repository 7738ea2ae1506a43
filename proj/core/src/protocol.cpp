#include "zclaim/protocol.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "zclaim/serialize.hpp"

namespace zclaim {

const char* to_string(RequestState s) {
  switch (s) {
    case RequestState::issue_start: return "IssueStart";
    case RequestState::awaiting_mint: return "AwaitingMint";
    case RequestState::await_issue_confirm: return "AwaitIssueConfirm";
    case RequestState::issue_challenged: return "IssueChallenged";
    case RequestState::issue_success: return "IssueSuccess";
    case RequestState::issue_expired: return "IssueExpired";
    case RequestState::redeem_start: return "RedeemStart";
    case RequestState::await_redeem_confirm: return "AwaitRedeemConfirm";
    case RequestState::redeem_challenged: return "RedeemChallenged";
    case RequestState::redeem_success: return "RedeemSuccess";
    case RequestState::redeem_expired: return "RedeemExpired";
  }
  return "?";
}

bool is_terminal(RequestState s) {
  switch (s) {
    case RequestState::issue_challenged:
    case RequestState::issue_success:
    case RequestState::issue_expired:
    case RequestState::redeem_challenged:
    case RequestState::redeem_success:
    case RequestState::redeem_expired:
      return true;
    default:
      return false;
  }
}

void validate(const ProtocolParams& p) {
  validate(p.registry);
  if (p.delta_mint == 0 || p.delta_confirm_issue == 0 || p.delta_confirm_redeem == 0) {
    throw std::invalid_argument("deadlines must be positive");
  }
  if (p.zc_block_interval == 0) throw std::invalid_argument("zc_block_interval must be positive");
  if (p.finality_depth == 0) throw std::invalid_argument("finality depth must be positive");
}

std::string to_csv(const TraceRecord& r) {
  std::string out = std::to_string(r.tick);
  out += ',' + r.actor + ',' + r.op + ',';
  out += r.request ? std::to_string(raw(*r.request)) : "-";
  out += ',' + r.state_before + ',' + r.state_after + ',' + r.outcome;
  return out;
}

namespace {

template <class T>
std::string outcome_of(const Result<T>& r) {
  return r.ok() ? "ok" : std::string("rejected:") + to_string(r.error().code);
}

Diversifier diversifier_from(Rng& rng) {
  Diversifier d{};
  const auto bytes = random_bytes<16>(rng);
  std::copy_n(bytes.begin(), d.size(), d.begin());
  return d;
}

}  // namespace

Engine::Engine(ProtocolParams params, std::uint64_t seed)
    : params_((validate(params), params)),
      rng_(seed),
      zcash_(params_.zcash),
      relay_(zcash_.tip(), params_.finality_depth),
      registry_(params_.registry),
      issuing_(params_.issuing_tree_depth) {}

// ---------------------------------------------------------------------------
// Helpers

Participant& Engine::person(ActorId id) {
  auto it = participants_.find(id);
  if (it == participants_.end()) throw std::out_of_range("unknown participant");
  return it->second;
}

RequestRecord* Engine::find_request(RequestId id) {
  auto it = requests_.find(id);
  return it == requests_.end() ? nullptr : &it->second;
}

const RequestRecord* Engine::request(RequestId id) const {
  auto it = requests_.find(id);
  return it == requests_.end() ? nullptr : &it->second;
}

const LockPermit* Engine::permit(std::uint32_t permit_id) const {
  auto it = permits_.find(permit_id);
  return it == permits_.end() ? nullptr : &it->second;
}

const VaultRecord* Engine::vault_of(VaultId id) const { return registry_.find(id); }

std::string Engine::vault_actor(VaultId id) const { return "vault" + std::to_string(raw(id)); }

std::string Engine::actor_name(ActorId id) const {
  auto it = participants_.find(id);
  return it == participants_.end() ? "actor" + std::to_string(raw(id)) : it->second.name;
}

std::string Engine::request_state(RequestId id) const {
  const auto* r = request(id);
  return r ? to_string(r->state) : "-";
}

void Engine::record(const std::string& actor, const std::string& op, std::optional<RequestId> request,
                    std::string before, std::string after, const std::string& outcome) {
  trace_.push_back({now_, actor, op, request, std::move(before), std::move(after), outcome});
}

void Engine::emit(std::vector<Event>& out, std::string kind, std::optional<RequestId> request,
                  std::optional<VaultId> vault) {
  Event e{now_, std::move(kind), request, vault};
  out.push_back(e);
  events_.push_back(std::move(e));
}

Result<Ratio> Engine::current_rate() const { return oracle_.get_rate(now_); }

std::optional<Engine::KnownSecret> Engine::secret_for(const Address& recipient, const NoteCiphertext& ct) const {
  auto it = shared_secrets_.find(ct.ephemeral_public);
  if (it == shared_secrets_.end() || it->second.recipient != recipient) return std::nullopt;
  return it->second;
}

NoteCiphertext Engine::encrypt_for(const Note& note, const Address& recipient, CiphertextFault fault) {
  const Bytes32 esk = random_bytes<32>(rng_);
  const SharedSecret secret = agree_secret(esk, recipient);
  Note plain = note;
  if (fault == CiphertextFault::wrong_note) plain.value += Amount{1};
  NoteCiphertext ct = encrypt_note(plain, recipient, secret);
  if (fault == CiphertextFault::corrupt && !ct.payload.empty()) ct.payload[0] ^= 0x5a;
  // The recipient recovers this secret from the ephemeral key with its own
  // viewing key; the table stands in for that key agreement.
  shared_secrets_[ct.ephemeral_public] = KnownSecret{recipient, secret};
  return ct;
}

std::vector<Note> Engine::spendable_zcash(const Participant& p) const {
  std::vector<Note> out;
  for (const auto& n : p.zcash_notes) {
    if (!controls(p.zcash_key, n.recipient) || !zcash_.pool().contains(commit_note(n))) continue;
    const Nullifier nf = derive_nullifier(n, p.zcash_key.nullifier_key);
    if (zcash_.pool().is_spent(nf) || zcash_.reserved_nullifiers().count(nf)) continue;
    out.push_back(n);
  }
  return out;
}

std::vector<Note> Engine::spendable_wzec(const Participant& p) const {
  std::vector<Note> out;
  for (const auto& n : p.wzec_notes) {
    if (!issuing_.pool().contains(commit_note(n))) continue;
    const Nullifier nf = derive_nullifier(n, p.wzec_key.nullifier_key);
    if (issuing_.pool().is_spent(nf) || issuing_.escrowed().count(nf)) continue;
    out.push_back(n);
  }
  return out;
}

Amount Engine::zcash_balance(ActorId who) const {
  Amount total;
  for (const auto& n : spendable_zcash(participants_.at(who))) total += n.value;
  return total;
}

Amount Engine::wzec_balance(ActorId who) const {
  Amount total;
  for (const auto& n : spendable_wzec(participants_.at(who))) total += n.value;
  return total;
}

std::vector<Note> Engine::vault_received(VaultId vault) const {
  auto it = vault_received_.find(vault);
  return it == vault_received_.end() ? std::vector<Note>{} : it->second;
}

Result<ShieldedTx> Engine::build_zcash_payment(const Participant& from, std::vector<Note> outputs) {
  Amount need = zcash_.config().fee;
  for (const auto& n : outputs) need += n.value;
  ShieldedTx tx;
  Amount have;
  for (const auto& n : spendable_zcash(from)) {
    if (have >= need) break;
    tx.spend_witnesses.push_back({n, from.zcash_key.nullifier_key});
    tx.nullifiers.push_back(derive_nullifier(n, from.zcash_key.nullifier_key));
    have += n.value;
  }
  if (have < need) return reject(Reject::insufficient_funds, "zcash balance");
  if (have > need) outputs.push_back(Note{from.zcash_key.address, have - need, fresh_rcm()});
  for (auto& n : outputs) {
    tx.outputs.push_back({commit_note(n), {}});
    tx.output_notes.push_back(n);
  }
  tx.value_out = zcash_.config().fee;
  return tx;
}

// ---------------------------------------------------------------------------
// Setup

ActorId Engine::add_participant(const std::string& name, Amount i_balance, const std::vector<Amount>& zcash_funds) {
  Participant p;
  p.id = ActorId{next_actor_++};
  p.name = name;
  p.zcash_key = make_spending_key(random_bytes<32>(rng_), diversifier_from(rng_));
  p.wzec_key = make_spending_key(random_bytes<32>(rng_), diversifier_from(rng_));
  for (const auto& amount : zcash_funds) {
    Note n{p.zcash_key.address, amount, fresh_rcm()};
    zcash_.allocate(n);
    p.zcash_notes.push_back(n);
  }
  if (!i_balance.is_zero()) {
    issuing_.credit(p.id, i_balance);
    i_issued_ += i_balance;
  }
  const auto id = p.id;
  participants_.emplace(id, std::move(p));
  return id;
}

Result<VaultId> Engine::register_vault(ActorId owner, Amount collateral) {
  const auto it = participants_.find(owner);
  Result<VaultId> res = reject(Reject::unknown_entity, "owner");
  if (it != participants_.end()) {
    if (collateral.is_zero()) {
      res = reject(Reject::invalid_argument, "collateral must be positive");
    } else if (issuing_.balance(owner) < collateral) {
      res = reject(Reject::insufficient_funds, "collateral");
    } else {
      res = registry_.register_vault(owner, collateral, it->second.zcash_key.address, now_);
      if (res) (void)issuing_.debit(owner, collateral);
    }
  }
  record(actor_name(owner), "register_vault", std::nullopt, "-", res ? "VaultRegistered" : "-", outcome_of(res));
  return res;
}

// ---------------------------------------------------------------------------
// Vault proofs

Status Engine::submit_poc(VaultId vault) {
  if (!vault_of(vault)) return submit_poc_claiming(vault, Amount{});
  return submit_poc_claiming(vault, registry_.obligations(vault));
}

Status Engine::submit_poc_claiming(VaultId vault, Amount claimed) {
  const auto* v = vault_of(vault);
  const std::string before = v ? to_string(v->issue_side) : "-";
  Status res = reject(Reject::unknown_entity, "vault");
  if (v) {
    const auto rate = current_rate();
    res = rate ? registry_.submit_poc(vault, claimed, *rate, now_) : Status(rate.error());
  }
  record(vault_actor(vault), "submit_poc", std::nullopt, before, v ? to_string(vault_of(vault)->issue_side) : "-",
         outcome_of(res));
  return res;
}

Status Engine::submit_pob(VaultId vault) {
  const auto* v = vault_of(vault);
  const std::string before = v ? to_string(v->issue_side) : "-";
  Status res = reject(Reject::unknown_entity, "vault");
  if (v) {
    const auto rate = current_rate();
    res = rate ? registry_.submit_pob(vault, registry_.history(vault), *rate, now_) : Status(rate.error());
  }
  record(vault_actor(vault), "submit_pob", std::nullopt, before, v ? to_string(vault_of(vault)->issue_side) : "-",
         outcome_of(res));
  return res;
}

Status Engine::submit_poi(VaultId vault) {
  const auto* v = vault_of(vault);
  const std::string before = v ? to_string(v->redeem_side) : "-";
  Status res = reject(Reject::unknown_entity, "vault");
  if (v) res = registry_.submit_poi(vault, registry_.obligations(vault), now_);
  record(vault_actor(vault), "submit_poi", std::nullopt, before, v ? to_string(vault_of(vault)->redeem_side) : "-",
         outcome_of(res));
  return res;
}

// ---------------------------------------------------------------------------
// Issue

Result<RequestId> Engine::request_lock(ActorId issuer, VaultId vault) {
  Result<RequestId> res = reject(Reject::unknown_entity, "issuer");
  const auto* v = vault_of(vault);
  if (participants_.count(issuer)) {
    if (!v) {
      res = reject(Reject::unknown_entity, "vault");
    } else if (!v->issue_available(now_)) {
      res = reject(Reject::unavailable, "vault has no valid capacity proof");
    } else if (v->active_issue) {
      res = reject(Reject::busy, "vault is serving another issue");
    } else if (issuing_.balance(issuer) < params_.registry.i_w) {
      res = reject(Reject::insufficient_funds, "warranty");
    } else {
      RequestRecord r;
      r.id = RequestId{next_request_++};
      r.kind = RequestKind::issue;
      r.state = RequestState::awaiting_mint;
      r.user = issuer;
      r.vault = vault;
      r.nonce = random_bytes<32>(rng_);
      r.deadlines.mint = now_ + params_.delta_mint;
      r.warranty = params_.registry.i_w;
      LockPermit permit{next_permit_++, issuer, vault, r.nonce, *r.deadlines.mint, false};
      r.permit_id = permit.permit_id;
      (void)issuing_.lock_warranty(r.id, issuer, r.warranty);
      registry_.set_active_issue(vault, r.id);
      permits_.emplace(permit.permit_id, permit);
      res = r.id;
      requests_.emplace(r.id, std::move(r));
    }
  }
  record(actor_name(issuer), "request_lock", res ? std::optional<RequestId>(*res) : std::nullopt, "IssueStart",
         res ? "AwaitingMint" : "IssueStart", outcome_of(res));
  return res;
}

Result<TxId> Engine::do_lock(ActorId issuer, RequestId id, Amount amount, LockOptions opts) {
  const std::string before = request_state(id);
  Result<TxId> res = reject(Reject::unknown_entity, "request");
  auto* r = find_request(id);
  if (r && r->kind == RequestKind::issue) {
    if (r->user != issuer) {
      res = reject(Reject::unknown_entity, "request belongs to another issuer");
    } else if (r->state != RequestState::awaiting_mint) {
      res = reject(Reject::wrong_state, "permit no longer valid");
    } else if (now_ > *r->deadlines.mint) {
      res = reject(Reject::deadline_passed, "permit expired");
    } else {
      auto& p = person(issuer);
      const Note lock{vault_of(r->vault)->address, amount, opts.derive_rcm ? derive_rcm(r->nonce) : fresh_rcm()};
      auto tx = build_zcash_payment(p, {lock});
      if (!tx) {
        res = tx.error();
      } else {
        res = opts.adversary_branch ? zcash_.submit_adversary_tx(*tx) : zcash_.submit_shielded_tx(*tx);
        if (res) {
          for (const auto& n : tx->output_notes) {
            if (n.recipient == p.zcash_key.address) p.zcash_notes.push_back(n);
          }
          secrets_[id].lock_note = lock;
          r->zcash_txs.push_back(*res);
        }
      }
    }
  }
  record(actor_name(issuer), "lock", id, before, request_state(id), outcome_of(res));
  return res;
}

Result<MintPackage> Engine::make_mint(ActorId issuer, RequestId id, MintOptions opts) {
  const auto* r = request(id);
  if (!r || r->kind != RequestKind::issue || r->user != issuer) return reject(Reject::unknown_entity, "request");
  if (r->state != RequestState::awaiting_mint) return reject(Reject::wrong_state, "request not awaiting a mint");
  const RequestId source = opts.replay_lock_of.value_or(id);
  auto sit = secrets_.find(source);
  if (sit == secrets_.end() || !sit->second.lock_note) return reject(Reject::not_found, "no lock sent");
  const Note lock = *sit->second.lock_note;
  const NoteCommitment cm = commit_note(lock);

  BlockHash anchor{};
  if (opts.anchor) {
    anchor = *opts.anchor;
  } else {
    const auto final_block = relay_.latest_final();
    if (!final_block) return reject(Reject::not_final, "relay has no final block");
    anchor = *final_block;
  }
  auto path = zcash_.branch_merkle_path(cm, anchor);
  if (!path) {
    return opts.anchor ? Result<MintPackage>(path.error())
                       : Result<MintPackage>(reject(Reject::not_final, "lock not yet final"));
  }

  const auto& p = participants_.at(issuer);
  const Amount value = opts.overclaim ? lock.value : after_fee(lock.value, params_.registry.fee);
  const Note wzec{p.wzec_key.address, value, fresh_rcm()};

  MintPackage pkg;
  pkg.transfer.statement = MintStatement{cm, commit_note(wzec), r->nonce, InclusionProof{anchor, *path}};
  pkg.transfer.witness = MintWitness{lock, r->nonce, wzec};
  pkg.ciphertext = encrypt_for(lock, vault_of(r->vault)->address, opts.fault);
  return pkg;
}

Result<PendingTx> Engine::do_mint(ActorId issuer, RequestId id, const MintPackage& pkg) {
  const std::string before = request_state(id);
  Result<PendingTx> res = reject(Reject::unknown_entity, "request");
  auto* r = find_request(id);
  if (r && r->kind == RequestKind::issue) {
    if (r->user != issuer) {
      res = reject(Reject::unknown_entity, "request belongs to another issuer");
    } else if (r->state != RequestState::awaiting_mint) {
      res = reject(Reject::wrong_state, "request not awaiting a mint");
    } else if (now_ > *r->deadlines.mint) {
      res = reject(Reject::deadline_passed, "mint window closed");
    } else {
      const Tick deadline = now_ + params_.delta_confirm_issue;
      res = issuing_.submit_mint_tx(pkg.transfer, vault_of(r->vault)->address, r->nonce, params_.registry, relay_,
                                    now_, deadline, id);
      if (res) {
        r->state = RequestState::await_issue_confirm;
        r->cm = pkg.transfer.statement.lock_cm;
        r->ciphertext = pkg.ciphertext;
        r->pending_tx = res->id;
        r->deadlines.confirm_issue = deadline;
        permits_.at(r->permit_id).used = true;
        person(issuer).wzec_notes.push_back(pkg.transfer.witness.wzec_note);
        anchors_[id] = pkg.transfer.statement.inclusion.block;
      } else if (res.error().code == Reject::replay) {
        ++metrics_.replays_rejected;
      }
    }
  }
  record(actor_name(issuer), "mint", id, before, request_state(id), outcome_of(res));
  if (res) check_ground_truth(nullptr);
  return res;
}

Inspection Engine::inspect_issue(VaultId vault, RequestId id) const {
  const auto* r = request(id);
  const auto* v = vault_of(vault);
  if (!r || !v) return Inspection::undecryptable;
  const auto known = secret_for(v->address, r->ciphertext);
  if (!known) return Inspection::undecryptable;
  const auto note = decrypt_note(r->ciphertext, known->secret);
  if (!note) return Inspection::undecryptable;
  return commit_note(*note) == r->cm ? Inspection::ok : Inspection::mismatch;
}

void Engine::finish_issue(RequestRecord& r) {
  issuing_.finalize_tx(*r.pending_tx, TxStatus::confirmed, now_);
  const MintTransfer* m = issuing_.mint_of(*r.pending_tx);
  registry_.record_issue(r.vault, r.id, m->witness.wzec_note.value);
  registry_.set_active_issue(r.vault, std::nullopt);
  metrics_.zec_locked += m->witness.lock_note.value;
  ++metrics_.issues_completed;
  r.state = RequestState::issue_success;

  // The vault keeps the lock note if it can open C^V.
  const auto* v = vault_of(r.vault);
  if (const auto known = secret_for(v->address, r.ciphertext)) {
    if (const auto note = decrypt_note(r.ciphertext, known->secret); note && commit_note(*note) == r.cm) {
      vault_received_[r.vault].push_back(*note);
      person(v->owner).zcash_notes.push_back(*note);
    }
  }
}

Status Engine::confirm_issue(VaultId vault, RequestId id) {
  const std::string before = request_state(id);
  Status res = reject(Reject::unknown_entity, "request");
  auto* r = find_request(id);
  if (r && r->kind == RequestKind::issue && r->vault == vault) {
    if (r->state != RequestState::await_issue_confirm) {
      res = reject(Reject::wrong_state, "no pending mint");
    } else if (now_ > *r->deadlines.confirm_issue) {
      res = reject(Reject::deadline_passed, "confirmation window closed");
    } else {
      finish_issue(*r);
      issuing_.release_warranty(id, r->user);
      res = ok_status();
    }
  }
  record(vault_actor(vault), "confirm_issue", id, before, request_state(id), outcome_of(res));
  return res;
}

Status Engine::challenge_issue(VaultId vault, RequestId id, const SharedSecret& revealed,
                               const ChallengeWitness& witness) {
  const std::string before = request_state(id);
  Status res = reject(Reject::unknown_entity, "request");
  auto* r = find_request(id);
  if (r && r->kind == RequestKind::issue && r->vault == vault) {
    const auto* v = vault_of(vault);
    if (r->state != RequestState::await_issue_confirm) {
      res = reject(Reject::wrong_state, "no pending mint");
    } else if (now_ > *r->deadlines.confirm_issue) {
      res = reject(Reject::deadline_passed, "challenge window closed");
    } else if (witness.recipient != v->address ||
               verify_challenge(r->ciphertext, revealed, r->cm, witness) != ChallengeVerdict::upheld) {
      ++metrics_.challenges_rejected;
      res = reject(Reject::challenge_rejected, "ciphertext opens to the committed note");
    } else {
      issuing_.finalize_tx(*r->pending_tx, TxStatus::voided, now_);
      issuing_.release_warranty(id, v->owner);
      registry_.set_active_issue(vault, std::nullopt);
      ++metrics_.challenges_upheld;
      ++metrics_.slashes;
      metrics_.slashed += r->warranty;
      metrics_.zec_forfeited += issuing_.mint_of(*r->pending_tx)->witness.lock_note.value;
      r->state = RequestState::issue_challenged;
      res = ok_status();
    }
  }
  record(vault_actor(vault), "challenge_issue", id, before, request_state(id), outcome_of(res));
  return res;
}

Status Engine::challenge_issue(VaultId vault, RequestId id) {
  const auto* r = request(id);
  const auto* v = vault_of(vault);
  std::optional<KnownSecret> known;
  if (r && v) known = secret_for(v->address, r->ciphertext);
  if (!known) {
    // Nothing to reveal: the attempt is recorded as a failed challenge.
    const std::string state = request_state(id);
    record(vault_actor(vault), "challenge_issue", id, state, state, "rejected:challenge_rejected");
    if (r && r->state == RequestState::await_issue_confirm) ++metrics_.challenges_rejected;
    return reject(Reject::challenge_rejected, "no secret for this ciphertext");
  }
  return challenge_issue(vault, id, known->secret, ChallengeWitness{v->address});
}

// ---------------------------------------------------------------------------
// Redeem

Result<BurnPackage> Engine::make_burn(ActorId redeemer, VaultId vault, Amount wzec_burn, BurnOptions opts) {
  const auto pit = participants_.find(redeemer);
  if (pit == participants_.end()) return reject(Reject::unknown_entity, "redeemer");
  const auto* v = vault_of(vault);
  if (!v) return reject(Reject::unknown_entity, "vault");
  if (wzec_burn.is_zero()) return reject(Reject::invalid_argument, "burn must be positive");
  const Participant& p = pit->second;

  Note release{p.zcash_key.address, after_fee(wzec_burn, params_.registry.fee), fresh_rcm()};
  if (opts.reuse_release_of) {
    auto sit = secrets_.find(*opts.reuse_release_of);
    if (sit == secrets_.end() || !sit->second.release_note) return reject(Reject::not_found, "no earlier release");
    release = *sit->second.release_note;
  }

  BurnPackage pkg;
  ShieldedTx& tx = pkg.transfer.pool_tx;
  Amount have;
  for (const auto& n : spendable_wzec(p)) {
    if (have >= wzec_burn) break;
    tx.spend_witnesses.push_back({n, p.wzec_key.nullifier_key});
    tx.nullifiers.push_back(derive_nullifier(n, p.wzec_key.nullifier_key));
    have += n.value;
  }
  if (have < wzec_burn) return reject(Reject::insufficient_funds, "wZEC balance");
  if (have > wzec_burn) {
    const Note change{p.wzec_key.address, have - wzec_burn, fresh_rcm()};
    tx.outputs.push_back({commit_note(change), {}});
    tx.output_notes.push_back(change);
  }
  tx.value_out = wzec_burn;
  pkg.transfer.release_cm = commit_note(release);
  pkg.transfer.release_note = release;
  pkg.ciphertext = encrypt_for(release, v->address, opts.fault);
  return pkg;
}

Result<PendingTx> Engine::do_burn(ActorId redeemer, VaultId vault, const BurnPackage& pkg) {
  Result<PendingTx> res = reject(Reject::unknown_entity, "redeemer");
  const auto* v = vault_of(vault);
  const RequestId id{next_request_};
  if (participants_.count(redeemer)) {
    if (!v) {
      res = reject(Reject::unknown_entity, "vault");
    } else if (v->redeem_exempt(now_)) {
      res = reject(Reject::unavailable, "vault holds a valid insignificance proof");
    } else if (v->active_redeem) {
      res = reject(Reject::busy, "vault is serving another redeem");
    } else if (issuing_.balance(redeemer) < params_.registry.i_w) {
      res = reject(Reject::insufficient_funds, "warranty");
    } else {
      const Tick deadline = now_ + params_.delta_confirm_redeem;
      res = issuing_.submit_burn_tx(pkg.transfer, params_.registry, now_, deadline, id);
      if (res) {
        ++next_request_;
        RequestRecord r;
        r.id = id;
        r.kind = RequestKind::redeem;
        r.state = RequestState::await_redeem_confirm;
        r.user = redeemer;
        r.vault = vault;
        r.cm = pkg.transfer.release_cm;
        r.ciphertext = pkg.ciphertext;
        r.deadlines.confirm_redeem = deadline;
        r.warranty = params_.registry.i_w;
        r.pending_tx = res->id;
        (void)issuing_.lock_warranty(id, redeemer, r.warranty);
        registry_.set_active_redeem(vault, id);
        requests_.emplace(id, std::move(r));
        secrets_[id].release_note = pkg.transfer.release_note;
        auto& p = person(redeemer);
        for (const auto& n : pkg.transfer.pool_tx.output_notes) p.wzec_notes.push_back(n);
        // A reused release note is the same note; the wallet keeps one copy.
        const auto cm = commit_note(pkg.transfer.release_note);
        const bool known = std::any_of(p.zcash_notes.begin(), p.zcash_notes.end(),
                                       [&](const Note& n) { return commit_note(n) == cm; });
        if (!known) p.zcash_notes.push_back(pkg.transfer.release_note);
      }
    }
  }
  record(actor_name(redeemer), "burn", res ? std::optional<RequestId>(id) : std::nullopt, "RedeemStart",
         res ? "AwaitRedeemConfirm" : "RedeemStart", outcome_of(res));
  return res;
}

Inspection Engine::inspect_redeem(VaultId vault, RequestId id) const { return inspect_issue(vault, id); }

Result<TxId> Engine::do_release(VaultId vault, RequestId id, ReleaseOptions opts) {
  const std::string before = request_state(id);
  Result<TxId> res = reject(Reject::unknown_entity, "request");
  auto* r = find_request(id);
  if (r && r->kind == RequestKind::redeem && r->vault == vault) {
    const auto* v = vault_of(vault);
    const auto known = secret_for(v->address, r->ciphertext);
    const auto note = known ? decrypt_note(r->ciphertext, known->secret) : std::nullopt;
    if (r->state != RequestState::await_redeem_confirm) {
      res = reject(Reject::wrong_state, "no pending burn");
    } else if (now_ > *r->deadlines.confirm_redeem) {
      res = reject(Reject::deadline_passed, "redeem window closed");
    } else if (!note || commit_note(*note) != r->cm) {
      res = reject(Reject::bad_statement, "ciphertext does not open to the release note");
    } else {
      Note out = *note;
      if (opts.wrong_value) out.value += Amount{1};
      auto& owner = person(v->owner);
      auto tx = build_zcash_payment(owner, {out});
      if (!tx) {
        res = tx.error();
      } else {
        res = zcash_.submit_shielded_tx(*tx);
        if (res) {
          for (const auto& n : tx->output_notes) {
            if (n.recipient == owner.zcash_key.address) owner.zcash_notes.push_back(n);
          }
          r->zcash_txs.push_back(*res);
          secrets_[id].released = out;
        }
      }
    }
  }
  record(vault_actor(vault), "release", id, before, request_state(id), outcome_of(res));
  return res;
}

Result<InclusionProof> Engine::make_inclusion(const NoteCommitment& cm) const {
  const auto final_block = relay_.latest_final();
  if (!final_block) return reject(Reject::not_final, "relay has no final block");
  auto path = zcash_.branch_merkle_path(cm, *final_block);
  if (!path) return reject(Reject::not_final, "note not yet final");
  return InclusionProof{*final_block, *path};
}

Result<InclusionProof> Engine::release_proof(VaultId vault, RequestId id) const {
  const auto* r = request(id);
  if (!r || r->kind != RequestKind::redeem || r->vault != vault) return reject(Reject::unknown_entity, "request");
  auto it = secrets_.find(id);
  if (it == secrets_.end() || !it->second.released) return reject(Reject::not_found, "nothing released");
  return make_inclusion(commit_note(*it->second.released));
}

Status Engine::confirm_redeem(VaultId vault, RequestId id, const InclusionProof& proof) {
  const std::string before = request_state(id);
  Status res = reject(Reject::unknown_entity, "request");
  auto* r = find_request(id);
  if (r && r->kind == RequestKind::redeem && r->vault == vault) {
    if (r->state != RequestState::await_redeem_confirm) {
      res = reject(Reject::wrong_state, "no pending burn");
    } else if (now_ > *r->deadlines.confirm_redeem) {
      res = reject(Reject::deadline_passed, "redeem window closed");
    } else {
      res = relay_.verify_note_inclusion(r->cm, proof.path, proof.block);
      if (res) {
        issuing_.finalize_tx(*r->pending_tx, TxStatus::confirmed, now_);
        const BurnTransfer* b = issuing_.burn_of(*r->pending_tx);
        registry_.record_redeem(vault, id, b->pool_tx.value_out);
        registry_.set_active_redeem(vault, std::nullopt);
        issuing_.release_warranty(id, r->user);
        metrics_.zec_released += b->release_note.value;
        ++metrics_.redeems_completed;
        r->state = RequestState::redeem_success;
        anchors_[id] = proof.block;
      }
    }
  }
  record(vault_actor(vault), "confirm_redeem", id, before, request_state(id), outcome_of(res));
  if (res) check_ground_truth(nullptr);
  return res;
}

Status Engine::challenge_redeem(VaultId vault, RequestId id, const SharedSecret& revealed,
                                const ChallengeWitness& witness) {
  const std::string before = request_state(id);
  Status res = reject(Reject::unknown_entity, "request");
  auto* r = find_request(id);
  if (r && r->kind == RequestKind::redeem && r->vault == vault) {
    const auto* v = vault_of(vault);
    if (r->state != RequestState::await_redeem_confirm) {
      res = reject(Reject::wrong_state, "no pending burn");
    } else if (now_ > *r->deadlines.confirm_redeem) {
      res = reject(Reject::deadline_passed, "challenge window closed");
    } else if (!r->zcash_txs.empty()) {
      res = reject(Reject::wrong_state, "vault already released; it must confirm");
    } else if (witness.recipient != v->address ||
               verify_challenge(r->ciphertext, revealed, r->cm, witness) != ChallengeVerdict::upheld) {
      ++metrics_.challenges_rejected;
      res = reject(Reject::challenge_rejected, "ciphertext opens to the committed note");
    } else {
      issuing_.finalize_tx(*r->pending_tx, TxStatus::voided, now_);
      issuing_.release_warranty(id, v->owner);
      registry_.set_active_redeem(vault, std::nullopt);
      ++metrics_.challenges_upheld;
      ++metrics_.slashes;
      metrics_.slashed += r->warranty;
      r->state = RequestState::redeem_challenged;
      res = ok_status();
    }
  }
  record(vault_actor(vault), "challenge_redeem", id, before, request_state(id), outcome_of(res));
  return res;
}

Status Engine::challenge_redeem(VaultId vault, RequestId id) {
  const auto* r = request(id);
  const auto* v = vault_of(vault);
  std::optional<KnownSecret> known;
  if (r && v) known = secret_for(v->address, r->ciphertext);
  if (!known) {
    const std::string state = request_state(id);
    record(vault_actor(vault), "challenge_redeem", id, state, state, "rejected:challenge_rejected");
    if (r && r->state == RequestState::await_redeem_confirm) ++metrics_.challenges_rejected;
    return reject(Reject::challenge_rejected, "no secret for this ciphertext");
  }
  return challenge_redeem(vault, id, known->secret, ChallengeWitness{v->address});
}

// ---------------------------------------------------------------------------
// wZEC payments

Result<TxId> Engine::pay_wzec(ActorId from, ActorId to, Amount amount) {
  Result<TxId> res = reject(Reject::unknown_entity, "participant");
  if (participants_.count(from) && participants_.count(to) && !amount.is_zero()) {
    auto& payer = person(from);
    ShieldedTx tx;
    Amount have;
    for (const auto& n : spendable_wzec(payer)) {
      if (have >= amount) break;
      tx.spend_witnesses.push_back({n, payer.wzec_key.nullifier_key});
      tx.nullifiers.push_back(derive_nullifier(n, payer.wzec_key.nullifier_key));
      have += n.value;
    }
    if (have < amount) {
      res = reject(Reject::insufficient_funds, "wZEC balance");
    } else {
      std::vector<std::pair<ActorId, Note>> outs{{to, Note{person(to).wzec_key.address, amount, fresh_rcm()}}};
      if (have > amount) outs.push_back({from, Note{payer.wzec_key.address, have - amount, fresh_rcm()}});
      for (const auto& [who, n] : outs) {
        tx.outputs.push_back({commit_note(n), {}});
        tx.output_notes.push_back(n);
      }
      res = issuing_.wzec_transfer(tx, now_);
      if (res) {
        for (const auto& [who, n] : outs) person(who).wzec_notes.push_back(n);
      }
    }
  } else if (amount.is_zero()) {
    res = reject(Reject::invalid_argument, "amount must be positive");
  }
  record(actor_name(from), "transfer", std::nullopt, "-", "-", outcome_of(res));
  return res;
}

// ---------------------------------------------------------------------------
// Clock

void Engine::relay_honest_headers() {
  const auto headers = zcash_.branch_headers(zcash_.tip_hash(), [&](const BlockHash& h) { return relay_.knows(h); });
  for (const auto& h : headers) (void)relay_.submit_header(h);
}

void Engine::check_ground_truth(std::vector<Event>* out) {
  for (const auto& [id, block] : anchors_) {
    if (flagged_.count(id) || zcash_.on_main_chain(block)) continue;
    flagged_.insert(id);
    ++metrics_.safety_violations;
    std::vector<Event> local;
    emit(out ? *out : local, "safety_violation", id, request(id) ? std::optional<VaultId>(request(id)->vault)
                                                                  : std::nullopt);
  }
}

void Engine::apply_deadlines(std::vector<Event>& out) {
  const Amount i_w = params_.registry.i_w;
  for (auto& [id, r] : requests_) {
    const std::string before = to_string(r.state);
    const auto* v = vault_of(r.vault);
    if (r.state == RequestState::awaiting_mint && now_ > *r.deadlines.mint) {
      issuing_.release_warranty(id, v->owner);
      registry_.set_active_issue(r.vault, std::nullopt);
      ++metrics_.mint_timeouts;
      ++metrics_.slashes;
      metrics_.slashed += r.warranty;
      r.state = RequestState::issue_expired;
      record("system", "timeout_mint", id, before, to_string(r.state), "ok");
      emit(out, "mint_timeout", id, r.vault);
    } else if (r.state == RequestState::await_issue_confirm && now_ > *r.deadlines.confirm_issue) {
      finish_issue(r);
      issuing_.release_warranty(id, r.user);
      const Amount before_collateral = vault_of(r.vault)->collateral;
      registry_.slash_warranty(issuing_, VaultRegistry::WarrantySource::vault_collateral, r.vault, id, i_w, r.user);
      ++metrics_.auto_confirms;
      ++metrics_.slashes;
      metrics_.slashed += before_collateral - vault_of(r.vault)->collateral;
      record("system", "timeout_confirm_issue", id, before, to_string(r.state), "ok");
      emit(out, "issue_auto_confirmed", id, r.vault);
    } else if (r.state == RequestState::await_redeem_confirm && now_ > *r.deadlines.confirm_redeem) {
      issuing_.finalize_tx(*r.pending_tx, TxStatus::voided, now_);
      issuing_.release_warranty(id, r.user);
      const Amount before_collateral = v->collateral;
      registry_.slash_warranty(issuing_, VaultRegistry::WarrantySource::vault_collateral, r.vault, id, i_w, r.user);
      registry_.set_active_redeem(r.vault, std::nullopt);
      ++metrics_.redeem_timeouts;
      ++metrics_.slashes;
      metrics_.slashed += before_collateral - vault_of(r.vault)->collateral;
      r.state = RequestState::redeem_expired;
      record("system", "timeout_confirm_redeem", id, before, to_string(r.state), "ok");
      emit(out, "burn_voided", id, r.vault);
    }
  }
}

std::vector<Event> Engine::tick() {
  std::vector<Event> out;
  ++now_;
  if (now_ % params_.zc_block_interval == 0) zcash_.mine_block(Miner::honest);
  if (!relay_muted_) relay_honest_headers();
  apply_deadlines(out);

  std::map<VaultId, std::string> before;
  for (const auto& [id, v] : registry_.vaults()) {
    before[id] = std::string(to_string(v.issue_side)) + "/" + to_string(v.redeem_side);
  }
  for (const auto id : registry_.expire(now_)) {
    const auto* v = vault_of(id);
    record(vault_actor(id), "expire", std::nullopt, before[id],
           std::string(to_string(v->issue_side)) + "/" + to_string(v->redeem_side), "ok");
    emit(out, "proof_expired", std::nullopt, id);
  }

  if (const auto rate = current_rate()) {
    for (const auto& [id, v] : registry_.vaults()) {
      if (const auto liq = registry_.check_liquidation(id, *rate, now_)) {
        issuing_.add_to_liquidation_pool(liq->collateral_seized);
        ++metrics_.liquidations;
        metrics_.liquidated += liq->collateral_seized;
        record("system", "liquidate", std::nullopt, "-", "-", "ok");
        emit(out, "liquidation", std::nullopt, id);
      }
    }
  }
  check_ground_truth(&out);
  return out;
}

// ---------------------------------------------------------------------------
// Adversary

void Engine::adversary_fork() { zcash_.fork_adversary(zcash_.tip_hash()); }

void Engine::adversary_mine(std::size_t blocks) {
  for (std::size_t i = 0; i < blocks; ++i) zcash_.mine_block(Miner::adversary);
}

void Engine::adversary_publish_to_relay() {
  const auto tip = zcash_.adversary_tip();
  if (!tip) return;
  const auto headers = zcash_.branch_headers(*tip, [&](const BlockHash& h) { return relay_.knows(h); });
  for (const auto& h : headers) (void)relay_.submit_header(h);
}

Result<ReorgReport> Engine::adversary_publish_to_network() {
  const auto tip = zcash_.adversary_tip();
  if (!tip) return reject(Reject::not_found, "no adversary branch");
  auto report = zcash_.reorg_to(*tip);
  if (report) {
    if (!relay_muted_) relay_honest_headers();
    check_ground_truth(nullptr);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Inspection

Accounting Engine::accounting() const {
  Accounting a;
  a.wzec_supply = issuing_.supply();
  a.minted = issuing_.total_minted();
  a.burnt = issuing_.total_burnt();
  // Lock notes count only if they are on the honest main chain.
  for (const auto& [txid, p] : issuing_.transactions()) {
    if (p.kind != PendingKind::mint || p.status != TxStatus::confirmed) continue;
    const auto* m = issuing_.mint_of(txid);
    if (zcash_.pool().contains(m->statement.lock_cm)) a.zec_locked += m->witness.lock_note.value;
  }
  a.zec_released = metrics_.zec_released;
  a.i_issued = i_issued_;
  a.i_outside_collateral = issuing_.total_outside_collateral();
  a.i_collateral = registry_.total_collateral();
  a.i_compensation = metrics_.slashed + metrics_.liquidated;
  return a;
}

std::vector<std::string> Engine::check_invariants(InvariantScope scope) const {
  std::vector<std::string> bad;
  const Accounting a = accounting();
  if (a.minted - a.burnt != a.wzec_supply) bad.emplace_back("supply_law");
  if (a.i_outside_collateral + a.i_collateral != a.i_issued) bad.emplace_back("i_conservation");

  Amount confirmed_mints, confirmed_burns;
  for (const auto& [txid, p] : issuing_.transactions()) {
    if (p.status != TxStatus::confirmed) continue;
    if (p.kind == PendingKind::mint) {
      const auto* m = issuing_.mint_of(txid);
      if (m->witness.wzec_note.value != after_fee(m->witness.lock_note.value, params_.registry.fee)) {
        bad.emplace_back("mint_relation");
      }
      confirmed_mints += m->witness.wzec_note.value;
    } else {
      const auto* b = issuing_.burn_of(txid);
      if (b->release_note.value != after_fee(b->pool_tx.value_out, params_.registry.fee)) {
        bad.emplace_back("burn_relation");
      }
      confirmed_burns += b->pool_tx.value_out;
    }
  }
  if (confirmed_mints != a.minted || confirmed_burns != a.burnt) bad.emplace_back("supply_recomputed");

  for (const auto& [id, r] : requests_) {
    if (!r.pending_tx) {
      if (r.state == RequestState::await_issue_confirm || r.state == RequestState::await_redeem_confirm) {
        bad.emplace_back("pending_without_tx");
      }
      continue;
    }
    const auto status = issuing_.pending(*r.pending_tx)->status;
    TxStatus expected = TxStatus::pending;
    switch (r.state) {
      case RequestState::issue_success:
      case RequestState::redeem_success: expected = TxStatus::confirmed; break;
      case RequestState::issue_challenged:
      case RequestState::redeem_challenged:
      case RequestState::redeem_expired: expected = TxStatus::voided; break;
      default: break;
    }
    if (status != expected) bad.emplace_back("timeout_exclusivity");
  }

  for (const auto& [id, v] : registry_.vaults()) {
    if (replay_history(registry_.history(id)) != registry_.obligations(id)) bad.emplace_back("obligation_history");
  }
  if (scope == InvariantScope::full && !(zcash_.replay_main_chain() == zcash_.pool())) {
    bad.emplace_back("zcash_replay");
  }
  return bad;
}

std::string Engine::trace_csv() const {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const auto& r : trace_) out += to_csv(r) + "\n";
  return out;
}

std::string Engine::public_view() const {
  std::string out = trace_csv();
  out += "# issuing chain\n";
  for (const auto& line : issuing_.public_log()) out += line + "\n";
  out += "# registry\n" + registry_.public_view();
  out += "# relay\ntip=" + to_hex(relay_.best_tip_hash()) + " height=" + std::to_string(relay_.best_tip().height) +
         "\n";
  for (const auto& [id, r] : requests_) {
    out += "# request " + std::to_string(raw(id)) + " ciphertext=" + to_hex(r.ciphertext.ephemeral_public) + "\n";
  }
  return out;
}

Bytes32 Engine::fingerprint() const {
  ByteWriter w;
  w.u64(now_);
  for (const auto& [id, r] : requests_) {
    w.u32(raw(id)).u8(static_cast<std::uint8_t>(r.state)).u32(raw(r.vault)).u32(raw(r.user));
    for (const auto& d : {r.deadlines.mint, r.deadlines.confirm_issue, r.deadlines.confirm_redeem}) {
      w.u64(d ? *d + 1 : 0);
    }
    w.u64(r.zcash_txs.size());
    w.fixed(r.cm.digest).fixed(r.ciphertext.ephemeral_public).bytes(r.ciphertext.payload);
  }
  for (const auto& [id, v] : registry_.vaults()) {
    w.u32(raw(id)).u64(v.collateral.units()).u8(static_cast<std::uint8_t>(v.issue_side));
    w.u8(static_cast<std::uint8_t>(v.redeem_side)).u64(v.poc_expiry).u64(v.poi_expiry);
    w.u32(v.active_issue ? raw(*v.active_issue) : 0).u32(v.active_redeem ? raw(*v.active_redeem) : 0);
    w.u64(registry_.obligations(id).units());
  }
  for (const auto& [id, p] : participants_) {
    w.u32(raw(id)).u64(issuing_.balance(id).units()).u64(zcash_balance(id).units()).u64(wzec_balance(id).units());
  }
  w.u64(issuing_.supply().units()).u64(issuing_.escrowed().size()).u64(issuing_.pool().tree().size());
  w.u64(zcash_.height()).u64(zcash_.mempool_size()).u64(zcash_.pool().tree().size());
  w.u64(relay_.best_tip().height);
  return tagged_hash("zclaim.state", w.data());
}

}  // namespace zclaim
