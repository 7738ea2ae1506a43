#include "zclaim/zcash_chain.hpp"

#include <algorithm>
#include <stdexcept>

#include "zclaim/serialize.hpp"

namespace zclaim {

BlockHash BlockHeader::hash() const {
  ByteWriter w;
  w.u64(height).fixed(parent).fixed(tree_root).u64(work).fixed(txs_digest).u64(nonce);
  return tagged_hash("zclaim.block", w.data());
}

namespace {

Bytes32 digest_txs(const std::vector<ShieldedTx>& txs, const std::vector<NoteCommitment>& allocations) {
  ByteWriter w;
  for (const auto& tx : txs) w.fixed(tx.id());
  for (const auto& cm : allocations) w.fixed(cm.digest);
  return tagged_hash("zclaim.txs", w.data());
}

}  // namespace

ZcashChain::ZcashChain(ChainConfig config, const std::vector<Note>& genesis_notes)
    : config_(config), pool_(config.tree_depth), adversary_pool_(config.tree_depth) {
  Block genesis;
  genesis.tree_after = CommitmentTree(config_.tree_depth);
  for (const auto& note : genesis_notes) {
    genesis.allocations.push_back(commit_note(note));
    genesis.tree_after.append(genesis.allocations.back());
  }
  genesis.header.height = 0;
  genesis.header.work = 1;
  genesis.header.tree_root = genesis.tree_after.root();
  genesis.header.txs_digest = digest_txs({}, genesis.allocations);
  genesis.header.nonce = nonce_++;
  genesis.hash = genesis.header.hash();
  for (const auto& cm : genesis.allocations) pool_.append(cm);
  main_.push_back(genesis.hash);
  blocks_.emplace(genesis.hash, std::move(genesis));
}

Result<TxId> ZcashChain::submit_shielded_tx(const ShieldedTx& tx) {
  if (auto st = pool_.check(tx, reserved_); !st) return st.error();
  for (const auto& nf : tx.nullifiers) reserved_.insert(nf);
  mempool_.push_back(tx);
  return tx.id();
}

Result<TxId> ZcashChain::submit_adversary_tx(const ShieldedTx& tx) {
  if (!adversary_tip_) fork_adversary(tip_hash());
  std::set<Nullifier> pending;
  for (const auto& queued : adversary_mempool_) pending.insert(queued.nullifiers.begin(), queued.nullifiers.end());
  if (auto st = adversary_pool_.check(tx, pending); !st) return st.error();
  adversary_mempool_.push_back(tx);
  return tx.id();
}

void ZcashChain::allocate(const Note& note) { pending_allocations_.push_back(commit_note(note)); }

const BlockHeader& ZcashChain::mine_block(Miner miner) {
  const bool honest = miner == Miner::honest;
  if (!honest && !adversary_tip_) fork_adversary(tip_hash());
  const BlockHash parent_hash = honest ? tip_hash() : *adversary_tip_;
  const Block& parent = blocks_.at(parent_hash);
  ShieldedPool& state = honest ? pool_ : adversary_pool_;
  auto& queue = honest ? mempool_ : adversary_mempool_;

  Block b;
  b.miner = miner;
  b.tree_after = parent.tree_after;
  if (honest) {
    for (const auto& cm : pending_allocations_) {
      b.allocations.push_back(cm);
      b.tree_after.append(cm);
      state.append(cm);
    }
    pending_allocations_.clear();
  }
  // Transactions are re-validated in order; anything invalidated by an
  // earlier inclusion or a reorg is dropped.
  for (auto& tx : queue) {
    if (!state.check(tx)) continue;
    state.apply(tx);
    for (const auto& out : tx.outputs) b.tree_after.append(out.cm);
    b.txs.push_back(std::move(tx));
  }
  queue.clear();

  b.header.height = parent.header.height + 1;
  b.header.parent = parent_hash;
  b.header.work = parent.header.work + 1;
  b.header.tree_root = b.tree_after.root();
  b.header.txs_digest = digest_txs(b.txs, b.allocations);
  b.header.nonce = nonce_++;
  b.hash = b.header.hash();

  const BlockHash hash = b.hash;
  if (honest) {
    for (const auto& tx : b.txs) tx_height_[tx.id()] = b.header.height;
    main_.push_back(hash);
    rebuild_reserved();
  } else {
    adversary_tip_ = hash;
  }
  return blocks_.emplace(hash, std::move(b)).first->second.header;
}

void ZcashChain::fork_adversary(const BlockHash& from) {
  if (!blocks_.count(from)) throw std::invalid_argument("fork_adversary: unknown block");
  adversary_tip_ = from;
  adversary_pool_ = state_at(from);
  adversary_mempool_.clear();
}

Result<ReorgReport> ZcashChain::reorg_to(const BlockHash& tip) {
  auto it = blocks_.find(tip);
  if (it == blocks_.end()) return reject(Reject::unknown_entity, "reorg target unknown");
  if (it->second.header.work <= this->tip().work) {
    return reject(Reject::insufficient_work, "branch work does not exceed main chain");
  }

  // New branch, newest first, down to the fork point on the main chain.
  std::vector<const Block*> branch;
  const Block* b = &it->second;
  while (!on_main_chain(b->hash)) {
    branch.push_back(b);
    b = &blocks_.at(b->header.parent);
  }
  const std::uint64_t fork_height = b->header.height;

  ReorgReport report;
  report.fork_height = fork_height;
  std::set<TxId> adopted;
  for (const Block* nb : branch) {
    for (const auto& tx : nb->txs) adopted.insert(tx.id());
  }

  std::vector<ShieldedTx> orphaned;
  std::vector<Nullifier> spent;
  while (main_.size() - 1 > fork_height) {
    const Block& old = blocks_.at(main_.back());
    for (const auto& tx : old.txs) {
      spent.insert(spent.end(), tx.nullifiers.begin(), tx.nullifiers.end());
      tx_height_.erase(tx.id());
      if (!adopted.count(tx.id())) orphaned.push_back(tx);
    }
    pending_allocations_.insert(pending_allocations_.begin(), old.allocations.begin(), old.allocations.end());
    main_.pop_back();
    ++report.abandoned_blocks;
  }
  pool_.rollback(blocks_.at(main_.back()).tree_after, spent);

  for (auto rit = branch.rbegin(); rit != branch.rend(); ++rit) {
    apply_block(**rit);
    ++report.adopted_blocks;
  }

  // Orphans go back in front of whatever was already waiting.
  std::vector<ShieldedTx> queue;
  for (auto& tx : orphaned) {
    report.orphaned_txs.push_back(tx.id());
    queue.push_back(std::move(tx));
  }
  for (auto& tx : mempool_) {
    if (!adopted.count(tx.id())) queue.push_back(std::move(tx));
  }
  mempool_ = std::move(queue);
  rebuild_reserved();
  if (adversary_tip_ && *adversary_tip_ == tip) adversary_tip_.reset();
  return report;
}

void ZcashChain::apply_block(const Block& b) {
  for (const auto& cm : b.allocations) pool_.append(cm);
  for (const auto& tx : b.txs) {
    pool_.apply(tx);
    tx_height_[tx.id()] = b.header.height;
  }
  main_.push_back(b.hash);
}

void ZcashChain::rebuild_reserved() {
  reserved_.clear();
  for (const auto& tx : mempool_) reserved_.insert(tx.nullifiers.begin(), tx.nullifiers.end());
}

Result<MerklePath> ZcashChain::merkle_path(const NoteCommitment& cm, const BlockHash& at_block) const {
  const Block* b = block(at_block);
  if (b == nullptr || !on_main_chain(at_block)) return reject(Reject::not_found, "block not on main chain");
  const auto pos = pool_.position(cm);
  const std::uint64_t size = b->tree_after.size();
  if (!pos || *pos >= size) return reject(Reject::not_found, "commitment not in tree at block");
  std::vector<NoteCommitment> prefix(pool_.leaves().begin(), pool_.leaves().begin() + static_cast<std::ptrdiff_t>(size));
  return path_of(prefix, *pos, config_.tree_depth);
}

Result<MerklePath> ZcashChain::branch_merkle_path(const NoteCommitment& cm, const BlockHash& at_block) const {
  if (on_main_chain(at_block)) return merkle_path(cm, at_block);
  if (block(at_block) == nullptr) return reject(Reject::not_found, "unknown block");
  const ShieldedPool state = state_at(at_block);
  const auto pos = state.position(cm);
  if (!pos) return reject(Reject::not_found, "commitment not in tree at block");
  return path_of(state.leaves(), *pos, config_.tree_depth);
}

const Block* ZcashChain::block(const BlockHash& hash) const {
  auto it = blocks_.find(hash);
  return it == blocks_.end() ? nullptr : &it->second;
}

bool ZcashChain::on_main_chain(const BlockHash& hash) const {
  const Block* b = block(hash);
  return b != nullptr && b->header.height < main_.size() && main_[b->header.height] == hash;
}

std::optional<std::uint64_t> ZcashChain::confirmed_height(const TxId& tx) const {
  auto it = tx_height_.find(tx);
  if (it == tx_height_.end()) return std::nullopt;
  return it->second;
}

ShieldedPool ZcashChain::state_at(const BlockHash& tip) const {
  std::vector<const Block*> path;
  for (const Block* b = block(tip); b != nullptr; b = b->header.height == 0 ? nullptr : block(b->header.parent)) {
    path.push_back(b);
  }
  ShieldedPool state(config_.tree_depth);
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    for (const auto& cm : (*it)->allocations) state.append(cm);
    for (const auto& tx : (*it)->txs) state.apply(tx);
  }
  return state;
}

ShieldedPool ZcashChain::replay_main_chain() const { return state_at(tip_hash()); }

}  // namespace zclaim
