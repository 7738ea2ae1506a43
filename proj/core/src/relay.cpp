#include "zclaim/relay.hpp"

namespace zclaim {

Relay::Relay(const BlockHeader& genesis, std::uint64_t finality_depth) : k_(finality_depth) {
  const auto hash = genesis.hash();
  headers_.emplace(hash, genesis);
  best_chain_.push_back(hash);
}

Status Relay::submit_header(const BlockHeader& header) {
  const auto hash = header.hash();
  if (headers_.count(hash)) return ok_status();
  auto parent = headers_.find(header.parent);
  if (parent == headers_.end()) {
    ++metrics_.headers_rejected;
    return reject(Reject::orphan, "unknown parent");
  }
  if (header.height != parent->second.height + 1 || header.work != parent->second.work + 1) {
    ++metrics_.headers_rejected;
    return reject(Reject::invalid_argument, "header inconsistent with parent");
  }
  headers_.emplace(hash, header);
  ++metrics_.headers_accepted;
  if (header.work > best_tip().work) adopt_tip(hash);
  return ok_status();
}

void Relay::adopt_tip(const BlockHash& tip) {
  // Rewrite the best chain from the new tip down to the common ancestor.
  std::vector<BlockHash> fresh;
  BlockHash cur = tip;
  for (;;) {
    const auto& h = headers_.at(cur);
    if (h.height < best_chain_.size() && best_chain_[h.height] == cur) break;
    fresh.push_back(cur);
    cur = h.parent;
  }
  const auto fork_height = headers_.at(cur).height;
  if (best_chain_.back() != cur) ++metrics_.tip_switches;
  best_chain_.resize(fork_height + 1);
  best_chain_.insert(best_chain_.end(), fresh.rbegin(), fresh.rend());

  if (final_mark_ && (final_mark_->first >= best_chain_.size() || best_chain_[final_mark_->first] != final_mark_->second)) {
    ++metrics_.finality_reversions;
    final_mark_.reset();
  }
  if (auto f = latest_final()) {
    const auto height = headers_.at(*f).height;
    if (!final_mark_ || height > final_mark_->first) final_mark_ = {height, *f};
  }
}

bool Relay::is_final(const BlockHash& block) const {
  auto it = headers_.find(block);
  if (it == headers_.end()) return false;
  const auto height = it->second.height;
  if (height >= best_chain_.size() || best_chain_[height] != block) return false;
  return best_tip().height - height >= k_;
}

std::optional<BlockHash> Relay::latest_final() const {
  const auto tip_height = best_tip().height;
  if (tip_height < k_) return std::nullopt;
  return best_chain_[tip_height - k_];
}

Status Relay::verify_note_inclusion(const NoteCommitment& cm, const MerklePath& path, const BlockHash& block) const {
  if (!is_final(block)) return reject(Reject::not_final, "block not final");
  if (fold_path(cm, path) != headers_.at(block).tree_root) return reject(Reject::bad_path, "path does not fold to root");
  return ok_status();
}

}  // namespace zclaim
