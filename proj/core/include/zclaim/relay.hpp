#pragma once

#include <unordered_map>
#include <vector>

#include "zclaim/zcash_chain.hpp"

namespace zclaim {

inline constexpr std::uint64_t kDefaultFinalityDepth = 24;

struct RelayMetrics {
  std::uint64_t headers_accepted = 0;
  std::uint64_t headers_rejected = 0;
  std::uint64_t tip_switches = 0;
  /// Blocks that were final and later fell out of the finalized prefix.
  std::uint64_t finality_reversions = 0;
};

/// Issuing-chain view of Zcash: stores headers, follows the heaviest tip and
/// treats blocks buried at least `k` deep as final. Pure depth-k finality;
/// nullifier queries are deliberately not offered.
class Relay {
public:
  explicit Relay(const BlockHeader& genesis, std::uint64_t finality_depth = kDefaultFinalityDepth);

  Status submit_header(const BlockHeader& header);

  [[nodiscard]] bool is_final(const BlockHash& block) const;
  Status verify_note_inclusion(const NoteCommitment& cm, const MerklePath& path, const BlockHash& block) const;

  [[nodiscard]] bool knows(const BlockHash& hash) const { return headers_.count(hash) != 0; }
  [[nodiscard]] const BlockHeader& best_tip() const { return headers_.at(best_chain_.back()); }
  [[nodiscard]] const BlockHash& best_tip_hash() const { return best_chain_.back(); }
  [[nodiscard]] std::uint64_t finality_depth() const { return k_; }
  /// The highest block currently final, if any.
  [[nodiscard]] std::optional<BlockHash> latest_final() const;
  [[nodiscard]] const RelayMetrics& metrics() const { return metrics_; }

private:
  void adopt_tip(const BlockHash& tip);

  std::uint64_t k_;
  std::unordered_map<BlockHash, BlockHeader, Bytes32Hash> headers_;
  std::vector<BlockHash> best_chain_;  // indexed by height
  /// Highest height that has ever been final, and the block that was final there.
  std::optional<std::pair<std::uint64_t, BlockHash>> final_mark_;
  RelayMetrics metrics_;
};

}  // namespace zclaim
