#include "zclaim/shielded_pool.hpp"

#include "zclaim/serialize.hpp"

namespace zclaim {

TxId ShieldedTx::id() const {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(nullifiers.size()));
  for (const auto& nf : nullifiers) w.fixed(nf.digest);
  w.u32(static_cast<std::uint32_t>(outputs.size()));
  for (const auto& out : outputs) w.fixed(out.cm.digest).bytes(out.ciphertext.payload).fixed(out.ciphertext.ephemeral_public);
  w.u64(value_out.units());
  return tagged_hash("zclaim.txid", w.data());
}

Status ShieldedPool::check(const ShieldedTx& tx, const std::set<Nullifier>& reserved) const {
  if (tx.spend_witnesses.size() != tx.nullifiers.size() || tx.output_notes.size() != tx.outputs.size()) {
    return reject(Reject::bad_statement, "witness shape does not match statement");
  }
  std::set<Nullifier> seen;
  Amount in;
  for (std::size_t i = 0; i < tx.nullifiers.size(); ++i) {
    const auto& nf = tx.nullifiers[i];
    if (!seen.insert(nf).second || is_spent(nf) || reserved.count(nf) != 0) {
      return reject(Reject::double_spend, "nullifier " + to_hex(nf.digest).substr(0, 16));
    }
    const auto& w = tx.spend_witnesses[i];
    if (derive_nullifier(w.note, w.nullifier_key) != nf) return reject(Reject::bad_statement, "nullifier mismatch");
    if (!controls(make_spending_key(w.nullifier_key, w.note.recipient.diversifier), w.note.recipient)) {
      return reject(Reject::bad_statement, "spend authority");
    }
    if (!contains(commit_note(w.note))) return reject(Reject::bad_statement, "spent note not in tree");
    in += w.note.value;
  }
  Amount out = tx.value_out;
  for (std::size_t i = 0; i < tx.outputs.size(); ++i) {
    if (commit_note(tx.output_notes[i]) != tx.outputs[i].cm) return reject(Reject::bad_statement, "output commitment");
    out += tx.output_notes[i].value;
  }
  if (in != out) return reject(Reject::imbalance, "spends do not balance outputs");
  return ok_status();
}

void ShieldedPool::apply(const ShieldedTx& tx) {
  for (const auto& nf : tx.nullifiers) nullifiers_.insert(nf);
  for (const auto& out : tx.outputs) append(out.cm);
}

void ShieldedPool::append(const NoteCommitment& cm) {
  tree_.append(cm);
  positions_.emplace(cm.digest, leaves_.size());
  leaves_.push_back(cm);
}

void ShieldedPool::rollback(const CommitmentTree& snapshot, const std::vector<Nullifier>& spent) {
  while (leaves_.size() > snapshot.size()) {
    const auto& cm = leaves_.back();
    auto it = positions_.find(cm.digest);
    if (it != positions_.end() && it->second == leaves_.size() - 1) positions_.erase(it);
    leaves_.pop_back();
  }
  tree_ = snapshot;
  for (const auto& nf : spent) nullifiers_.erase(nf);
}

std::optional<std::uint64_t> ShieldedPool::position(const NoteCommitment& cm) const {
  auto it = positions_.find(cm.digest);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

}  // namespace zclaim
