#pragma once

// Simulated Zcash ledger: a block tree with a selected main chain, the
// main chain's shielded pool, a mempool, and a private adversary branch
// that can be mined in secret and later published.

#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "zclaim/shielded_pool.hpp"

namespace zclaim {

using BlockHash = Bytes32;

struct BlockHeader {
  std::uint64_t height = 0;
  BlockHash parent{};
  Bytes32 tree_root{};
  /// Cumulative chain work; every block weighs 1.
  std::uint64_t work = 0;
  Bytes32 txs_digest{};
  std::uint64_t nonce = 0;

  [[nodiscard]] BlockHash hash() const;
};

enum class Miner { honest, adversary };

struct Block {
  BlockHeader header;
  BlockHash hash{};
  Miner miner = Miner::honest;
  std::vector<ShieldedTx> txs;
  /// Funding allocations (outputs without spends), appended before txs.
  std::vector<NoteCommitment> allocations;
  CommitmentTree tree_after;
};

struct ReorgReport {
  std::uint64_t fork_height = 0;
  std::size_t abandoned_blocks = 0;
  std::size_t adopted_blocks = 0;
  std::vector<TxId> orphaned_txs;  // returned to the mempool
};

struct ChainConfig {
  std::uint32_t tree_depth = kDefaultTreeDepth;
  /// 0.00001 ZEC.
  Amount fee{1000};
};

class ZcashChain {
public:
  explicit ZcashChain(ChainConfig config = {}, const std::vector<Note>& genesis_notes = {});

  Result<TxId> submit_shielded_tx(const ShieldedTx& tx);
  /// Queues a value allocation (a coinbase-like output with no spends) for
  /// the next honest block. Used to fund simulation participants.
  void allocate(const Note& note);
  /// Queues a transaction for the adversary's private branch only.
  Result<TxId> submit_adversary_tx(const ShieldedTx& tx);

  const BlockHeader& mine_block(Miner miner);

  /// Starts (or restarts) the private adversary branch at `from`.
  void fork_adversary(const BlockHash& from);
  [[nodiscard]] std::optional<BlockHash> adversary_tip() const { return adversary_tip_; }

  Result<ReorgReport> reorg_to(const BlockHash& tip);

  Result<MerklePath> merkle_path(const NoteCommitment& cm, const BlockHash& at_block) const;
  /// Same as merkle_path but for any known block, including side branches.
  Result<MerklePath> branch_merkle_path(const NoteCommitment& cm, const BlockHash& at_block) const;

  [[nodiscard]] const Block* block(const BlockHash& hash) const;
  [[nodiscard]] const BlockHeader& tip() const { return blocks_.at(main_.back()).header; }
  [[nodiscard]] const BlockHash& tip_hash() const { return main_.back(); }
  [[nodiscard]] std::uint64_t height() const { return main_.size() - 1; }
  [[nodiscard]] const BlockHash& main_hash_at(std::uint64_t height) const { return main_.at(height); }
  [[nodiscard]] bool on_main_chain(const BlockHash& hash) const;
  /// Headers of the branch ending at `tip`, oldest first, stopping after the
  /// first ancestor for which `known` returns true (exclusive).
  template <class Known>
  std::vector<BlockHeader> branch_headers(const BlockHash& tip, Known&& known) const {
    std::vector<BlockHeader> out;
    const Block* b = block(tip);
    while (b != nullptr && !known(b->hash)) {
      out.push_back(b->header);
      if (b->header.height == 0) break;
      b = block(b->header.parent);
    }
    return {out.rbegin(), out.rend()};
  }

  [[nodiscard]] const ShieldedPool& pool() const { return pool_; }
  [[nodiscard]] const ChainConfig& config() const { return config_; }
  [[nodiscard]] std::size_t mempool_size() const { return mempool_.size(); }
  [[nodiscard]] const std::set<Nullifier>& reserved_nullifiers() const { return reserved_; }
  /// Height of the main-chain block containing `tx`, if any.
  [[nodiscard]] std::optional<std::uint64_t> confirmed_height(const TxId& tx) const;

  /// Rebuilds the main chain's pool from genesis; equals pool() whenever the
  /// incremental bookkeeping is correct.
  [[nodiscard]] ShieldedPool replay_main_chain() const;

private:
  ShieldedPool state_at(const BlockHash& tip) const;
  void apply_block(const Block& b);
  void rebuild_reserved();

  ChainConfig config_;
  std::unordered_map<BlockHash, Block, Bytes32Hash> blocks_;
  std::vector<BlockHash> main_;
  ShieldedPool pool_;
  std::unordered_map<TxId, std::uint64_t, Bytes32Hash> tx_height_;
  std::vector<ShieldedTx> mempool_;
  std::vector<NoteCommitment> pending_allocations_;
  std::set<Nullifier> reserved_;

  std::optional<BlockHash> adversary_tip_;
  ShieldedPool adversary_pool_;
  std::vector<ShieldedTx> adversary_mempool_;
  std::uint64_t nonce_ = 0;
};

}  // namespace zclaim
