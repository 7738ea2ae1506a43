#include "zclaim/merkle.hpp"

#include <stdexcept>

#include "zclaim/serialize.hpp"

namespace zclaim {

namespace {

Bytes32 node_hash(std::uint32_t level, const Bytes32& left, const Bytes32& right) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(level)).fixed(left).fixed(right);
  return tagged_hash("zclaim.node", w.data());
}

// empty_roots()[l] is the root of an empty subtree of height l.
const std::vector<Bytes32>& empty_roots() {
  static const std::vector<Bytes32> roots = [] {
    std::vector<Bytes32> r;
    r.push_back(tagged_hash("zclaim.empty", {}));
    for (std::uint32_t l = 0; l < 64; ++l) r.push_back(node_hash(l, r.back(), r.back()));
    return r;
  }();
  return roots;
}

void check_depth(std::uint32_t depth) {
  if (depth == 0 || depth > 32) throw std::invalid_argument("tree depth must be in [1, 32]");
}

}  // namespace

Bytes32 fold_path(const NoteCommitment& leaf, const MerklePath& path) {
  Bytes32 cur = leaf.digest;
  std::uint64_t idx = path.position;
  for (std::uint32_t level = 0; level < path.siblings.size(); ++level) {
    cur = (idx & 1) ? node_hash(level, path.siblings[level], cur) : node_hash(level, cur, path.siblings[level]);
    idx >>= 1;
  }
  return cur;
}

Bytes32 root_of(const std::vector<NoteCommitment>& leaves, std::uint32_t depth) {
  check_depth(depth);
  std::vector<Bytes32> layer;
  layer.reserve(leaves.size());
  for (const auto& cm : leaves) layer.push_back(cm.digest);
  for (std::uint32_t level = 0; level < depth; ++level) {
    std::vector<Bytes32> next;
    next.reserve((layer.size() + 1) / 2);
    for (std::size_t i = 0; i < layer.size(); i += 2) {
      const Bytes32& right = i + 1 < layer.size() ? layer[i + 1] : empty_roots()[level];
      next.push_back(node_hash(level, layer[i], right));
    }
    layer = std::move(next);
  }
  return layer.empty() ? empty_roots()[depth] : layer.front();
}

MerklePath path_of(const std::vector<NoteCommitment>& leaves, std::uint64_t position, std::uint32_t depth) {
  check_depth(depth);
  if (position >= leaves.size()) throw std::out_of_range("path_of: position beyond tree size");
  MerklePath path;
  path.position = position;
  std::vector<Bytes32> layer;
  layer.reserve(leaves.size());
  for (const auto& cm : leaves) layer.push_back(cm.digest);
  std::uint64_t idx = position;
  for (std::uint32_t level = 0; level < depth; ++level) {
    const std::uint64_t sib = idx ^ 1;
    path.siblings.push_back(sib < layer.size() ? layer[sib] : empty_roots()[level]);
    std::vector<Bytes32> next;
    next.reserve((layer.size() + 1) / 2);
    for (std::size_t i = 0; i < layer.size(); i += 2) {
      const Bytes32& right = i + 1 < layer.size() ? layer[i + 1] : empty_roots()[level];
      next.push_back(node_hash(level, layer[i], right));
    }
    layer = std::move(next);
    idx >>= 1;
  }
  return path;
}

CommitmentTree::CommitmentTree(std::uint32_t depth) : depth_(depth), filled_(depth) {
  check_depth(depth);
  root_ = empty_roots()[depth];
}

void CommitmentTree::append(const NoteCommitment& cm) {
  if (size_ >= capacity()) throw std::length_error("note commitment tree is full");
  Bytes32 cur = cm.digest;
  std::uint64_t idx = size_;
  for (std::uint32_t level = 0; level < depth_; ++level) {
    if ((idx & 1) == 0) {
      filled_[level] = cur;
      cur = node_hash(level, cur, empty_roots()[level]);
    } else {
      cur = node_hash(level, filled_[level], cur);
    }
    idx >>= 1;
  }
  root_ = cur;
  ++size_;
}

}  // namespace zclaim
