#include "zclaim/issuing_chain.hpp"

#include <stdexcept>

#include "zclaim/serialize.hpp"

namespace zclaim {

Amount after_fee(Amount amount, Ratio fee) {
  const auto num = static_cast<UInt128>(amount.units()) * static_cast<std::uint64_t>(fee.den - fee.num);
  return Amount{static_cast<std::uint64_t>(num / static_cast<std::uint64_t>(fee.den))};
}

const char* to_string(TxStatus s) {
  switch (s) {
    case TxStatus::pending: return "pending";
    case TxStatus::confirmed: return "confirmed";
    case TxStatus::voided: return "voided";
  }
  return "?";
}

void IssuingChain::credit(ActorId who, Amount amount) { balances_[who] += amount; }

Status IssuingChain::debit(ActorId who, Amount amount) {
  auto& bal = balances_[who];
  if (bal < amount) return reject(Reject::insufficient_funds, "balance of i");
  bal -= amount;
  return ok_status();
}

Amount IssuingChain::balance(ActorId who) const {
  auto it = balances_.find(who);
  return it == balances_.end() ? Amount{} : it->second;
}

Status IssuingChain::lock_warranty(RequestId request, ActorId who, Amount amount) {
  if (warranties_.count(request)) throw std::logic_error("warranty already locked for request");
  if (auto st = debit(who, amount); !st) return st;
  warranties_.emplace(request, std::make_pair(who, amount));
  return ok_status();
}

void IssuingChain::release_warranty(RequestId request, ActorId to) {
  auto it = warranties_.find(request);
  if (it == warranties_.end()) throw std::logic_error("no warranty locked for request");
  credit(to, it->second.second);
  warranties_.erase(it);
}

Amount IssuingChain::total_outside_collateral() const {
  Amount total = liquidation_pool_;
  for (const auto& [who, bal] : balances_) total += bal;
  for (const auto& [req, w] : warranties_) total += w.second;
  return total;
}

Result<PendingTx> IssuingChain::submit_mint_tx(const MintTransfer& t, const Address& vault_address,
                                               const Bytes32& expected_nonce, const RegistryParams& params,
                                               const Relay& relay, Tick now, Tick deadline, RequestId request) {
  const auto& st = t.statement;
  const auto& w = t.witness;
  if (used_lock_cms_.count(st.lock_cm)) return reject(Reject::replay, "lock commitment already minted");
  if (used_nonces_.count(st.permit_nonce)) return reject(Reject::replay, "permit nonce already used");
  if (st.permit_nonce != expected_nonce || w.nonce != st.permit_nonce) {
    return reject(Reject::bad_statement, "nonce does not match the lock permit");
  }
  // Simulated zk verification of the Mint statement.
  if (commit_note(w.lock_note) != st.lock_cm) return reject(Reject::bad_statement, "lock note commitment");
  if (w.lock_note.recipient != vault_address) return reject(Reject::bad_statement, "lock note not addressed to vault");
  if (w.lock_note.rcm != derive_rcm(w.nonce)) return reject(Reject::bad_statement, "rcm not derived from nonce");
  if (w.lock_note.value > params.v_max) return reject(Reject::bad_statement, "lock exceeds v_max");
  if (w.wzec_note.value != after_fee(w.lock_note.value, params.fee)) {
    return reject(Reject::bad_statement, "minted value relation");
  }
  if (commit_note(w.wzec_note) != st.wzec_cm) return reject(Reject::bad_statement, "wZEC note commitment");
  if (auto inc = relay.verify_note_inclusion(st.lock_cm, st.inclusion.path, st.inclusion.block); !inc) {
    return inc.error();
  }

  ByteWriter idw;
  idw.str("mint").fixed(st.lock_cm.digest).fixed(st.wzec_cm.digest).fixed(st.permit_nonce).u32(raw(request));
  PendingTx p{tagged_hash("zclaim.itx", idw.data()), PendingKind::mint, TxStatus::pending, deadline, request};
  used_lock_cms_.insert(st.lock_cm);
  used_nonces_.insert(st.permit_nonce);
  txs_.emplace(p.id, p);
  mints_.emplace(p.id, t);
  log(now, "mint_submitted,tx=" + to_hex(p.id) + ",request=" + std::to_string(raw(request)) +
               ",lock_cm=" + to_hex(st.lock_cm.digest) + ",wzec_cm=" + to_hex(st.wzec_cm.digest) +
               ",nonce=" + to_hex(st.permit_nonce) + ",anchor=" + to_hex(st.inclusion.block));
  return p;
}

Result<PendingTx> IssuingChain::submit_burn_tx(const BurnTransfer& t, const RegistryParams& params, Tick now,
                                               Tick deadline, RequestId request) {
  if (auto st = pool_.check(t.pool_tx, escrow_); !st) {
    if (st.error().code == Reject::imbalance) return reject(Reject::insufficient_funds, st.error().detail);
    return st.error();
  }
  const Amount burnt = t.pool_tx.value_out;
  if (burnt > params.v_max) return reject(Reject::bad_statement, "burn exceeds v_max");
  if (t.release_note.value != after_fee(burnt, params.fee)) return reject(Reject::bad_statement, "release value relation");
  if (commit_note(t.release_note) != t.release_cm) return reject(Reject::bad_statement, "release note commitment");

  ByteWriter idw;
  idw.str("burn").fixed(t.pool_tx.id()).fixed(t.release_cm.digest).u32(raw(request));
  PendingTx p{tagged_hash("zclaim.itx", idw.data()), PendingKind::burn, TxStatus::pending, deadline, request};
  for (const auto& nf : t.pool_tx.nullifiers) escrow_.insert(nf);
  txs_.emplace(p.id, p);
  burns_.emplace(p.id, t);
  std::string nfs;
  for (const auto& nf : t.pool_tx.nullifiers) nfs += (nfs.empty() ? "" : ";") + to_hex(nf.digest);
  log(now, "burn_submitted,tx=" + to_hex(p.id) + ",request=" + std::to_string(raw(request)) + ",nullifiers=" + nfs +
               ",release_cm=" + to_hex(t.release_cm.digest));
  return p;
}

void IssuingChain::finalize_tx(const TxId& id, TxStatus outcome, Tick now) {
  auto it = txs_.find(id);
  if (it == txs_.end()) throw std::logic_error("finalize_tx: unknown transaction");
  if (it->second.status != TxStatus::pending) throw std::logic_error("finalize_tx: transaction already final");
  if (outcome == TxStatus::pending) throw std::logic_error("finalize_tx: outcome must be terminal");
  it->second.status = outcome;

  if (it->second.kind == PendingKind::mint) {
    if (outcome == TxStatus::confirmed) {
      const auto& m = mints_.at(id);
      pool_.append(m.statement.wzec_cm);
      supply_ += m.witness.wzec_note.value;
      minted_ += m.witness.wzec_note.value;
    }
  } else {
    const auto& b = burns_.at(id);
    for (const auto& nf : b.pool_tx.nullifiers) escrow_.erase(nf);
    if (outcome == TxStatus::confirmed) {
      pool_.apply(b.pool_tx);
      supply_ -= b.pool_tx.value_out;
      burnt_ += b.pool_tx.value_out;
    }
  }
  log(now, "tx_finalized,tx=" + to_hex(id) + ",status=" + to_string(outcome));
}

Result<TxId> IssuingChain::wzec_transfer(const ShieldedTx& tx, Tick now) {
  if (!tx.value_out.is_zero()) return reject(Reject::imbalance, "plain transfers cannot remove value");
  if (auto st = pool_.check(tx, escrow_); !st) return st.error();
  pool_.apply(tx);
  const auto id = tx.id();
  log(now, "wzec_transfer,tx=" + to_hex(id));
  return id;
}

const PendingTx* IssuingChain::pending(const TxId& id) const {
  auto it = txs_.find(id);
  return it == txs_.end() ? nullptr : &it->second;
}

const MintTransfer* IssuingChain::mint_of(const TxId& id) const {
  auto it = mints_.find(id);
  return it == mints_.end() ? nullptr : &it->second;
}

const BurnTransfer* IssuingChain::burn_of(const TxId& id) const {
  auto it = burns_.find(id);
  return it == burns_.end() ? nullptr : &it->second;
}

void IssuingChain::log(Tick now, std::string line) {
  public_log_.push_back(std::to_string(now) + "," + std::move(line));
}

}  // namespace zclaim
