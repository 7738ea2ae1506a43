#pragma once

#include <cstdint>
#include <vector>

#include "zclaim/crypto.hpp"

namespace zclaim {

inline constexpr std::uint32_t kDefaultTreeDepth = 16;

struct MerklePath {
  std::uint64_t position = 0;
  std::vector<Bytes32> siblings;  // leaf level first; size == depth
};

/// Root obtained by folding `leaf` up through `path`.
Bytes32 fold_path(const NoteCommitment& leaf, const MerklePath& path);

/// Root of the depth-`depth` tree whose first leaves are `leaves` and the
/// rest empty. O(n); used to cross-check the incremental frontier.
Bytes32 root_of(const std::vector<NoteCommitment>& leaves, std::uint32_t depth);

/// Authentication path for leaf `position` in the tree holding `leaves`.
MerklePath path_of(const std::vector<NoteCommitment>& leaves, std::uint64_t position, std::uint32_t depth);

/// Append-only note-commitment tree with an O(depth) frontier, so each
/// block can keep a snapshot of the tree after its outputs. Leaves are not
/// stored here; the chain keeps them.
class CommitmentTree {
public:
  explicit CommitmentTree(std::uint32_t depth = kDefaultTreeDepth);

  void append(const NoteCommitment& cm);

  [[nodiscard]] const Bytes32& root() const { return root_; }
  [[nodiscard]] std::uint64_t size() const { return size_; }
  [[nodiscard]] std::uint32_t depth() const { return depth_; }
  [[nodiscard]] std::uint64_t capacity() const { return std::uint64_t{1} << depth_; }

  friend bool operator==(const CommitmentTree&, const CommitmentTree&) = default;

private:
  std::uint32_t depth_;
  std::uint64_t size_ = 0;
  std::vector<Bytes32> filled_;
  Bytes32 root_{};
};

}  // namespace zclaim
