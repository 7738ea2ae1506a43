#pragma once

#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "zclaim/crypto.hpp"
#include "zclaim/merkle.hpp"
#include "zclaim/result.hpp"

namespace zclaim {

using TxId = Bytes32;

struct OutputDescription {
  NoteCommitment cm;
  NoteCiphertext ciphertext;
};

struct SpendWitness {
  Note note;
  Bytes32 nullifier_key{};
};

/// Sapling-style shielded transaction. The first block of fields is what an
/// observer sees; the witness block is consumed by the simulated verifier
/// and never serialized into a public trace.
struct ShieldedTx {
  std::vector<Nullifier> nullifiers;
  std::vector<OutputDescription> outputs;
  /// Value leaving the pool: the miner fee on Zcash, the burnt amount in a
  /// burn on the issuing chain.
  Amount value_out;

  std::vector<SpendWitness> spend_witnesses;
  std::vector<Note> output_notes;

  [[nodiscard]] TxId id() const;
};

/// Note-commitment tree plus nullifier set, i.e. the state of one shielded
/// pool along one chain.
class ShieldedPool {
public:
  explicit ShieldedPool(std::uint32_t depth = kDefaultTreeDepth) : tree_(depth) {}

  /// Validates `tx` against this state. `reserved` holds nullifiers already
  /// claimed by pending transactions (mempool or escrow).
  [[nodiscard]] Status check(const ShieldedTx& tx, const std::set<Nullifier>& reserved = {}) const;

  void apply(const ShieldedTx& tx);
  void append(const NoteCommitment& cm);
  void add_nullifier(const Nullifier& nf) { nullifiers_.insert(nf); }

  /// Restores the tree to `snapshot` (a prefix of the current one) and
  /// forgets `spent` nullifiers.
  void rollback(const CommitmentTree& snapshot, const std::vector<Nullifier>& spent);

  [[nodiscard]] bool contains(const NoteCommitment& cm) const { return positions_.count(cm.digest) != 0; }
  [[nodiscard]] std::optional<std::uint64_t> position(const NoteCommitment& cm) const;
  [[nodiscard]] bool is_spent(const Nullifier& nf) const { return nullifiers_.count(nf) != 0; }

  [[nodiscard]] const CommitmentTree& tree() const { return tree_; }
  [[nodiscard]] const std::vector<NoteCommitment>& leaves() const { return leaves_; }
  [[nodiscard]] const std::set<Nullifier>& nullifiers() const { return nullifiers_; }

  friend bool operator==(const ShieldedPool& a, const ShieldedPool& b) {
    return a.tree_ == b.tree_ && a.leaves_ == b.leaves_ && a.nullifiers_ == b.nullifiers_;
  }

private:
  CommitmentTree tree_;
  std::vector<NoteCommitment> leaves_;
  std::unordered_map<Bytes32, std::uint64_t, Bytes32Hash> positions_;
  std::set<Nullifier> nullifiers_;
};

}  // namespace zclaim
