#include "support.hpp"

#include "zclaim/relay.hpp"
#include "zclaim/zcash_chain.hpp"

using namespace zclaim;

namespace {

constexpr std::uint64_t kK = 24;

struct Fed {
  SpendingKey key = test::key_of(1);
  Note funds = test::note_to(key, Amount{100'000}, 1);
  ZcashChain chain{{}, {funds}};
  Relay relay{chain.block(chain.main_hash_at(0))->header, kK};

  void mine(int n) {
    for (int i = 0; i < n; ++i) {
      ASSERT_TRUE(relay.submit_header(chain.mine_block(Miner::honest)));
    }
  }
};

}  // namespace

TEST(Relay, AcceptsChildAndRejectsOrphan) {
  Fed f;
  f.mine(1);
  EXPECT_EQ(f.relay.best_tip_hash(), f.chain.tip_hash());
  BlockHeader orphan = f.chain.tip();
  orphan.parent = test::bytes_of(0x55);
  orphan.height += 1;
  orphan.work += 1;
  EXPECT_EQ(f.relay.submit_header(orphan).error().code, Reject::orphan);
  EXPECT_FALSE(f.relay.knows(orphan.hash()));

  BlockHeader bad_height = f.chain.tip();
  bad_height.parent = f.chain.tip_hash();
  bad_height.height += 2;
  bad_height.work += 1;
  EXPECT_FALSE(f.relay.submit_header(bad_height));
}

TEST(Relay, SwitchesToHeavierBranch) {
  Fed f;
  f.mine(3);
  f.chain.fork_adversary(f.chain.main_hash_at(1));
  std::vector<BlockHeader> side;
  for (int i = 0; i < 3; ++i) side.push_back(f.chain.mine_block(Miner::adversary));
  for (std::size_t i = 0; i < 2; ++i) ASSERT_TRUE(f.relay.submit_header(side[i]));
  EXPECT_EQ(f.relay.best_tip_hash(), f.chain.tip_hash());  // equal work keeps the old tip
  ASSERT_TRUE(f.relay.submit_header(side[2]));
  EXPECT_EQ(f.relay.best_tip_hash(), side[2].hash());
  EXPECT_EQ(f.relay.metrics().tip_switches, 1u);
}

TEST(Relay, FinalityBoundary) {
  Fed f;
  f.mine(1);
  const BlockHash b = f.chain.tip_hash();
  f.mine(static_cast<int>(kK) - 1);
  EXPECT_FALSE(f.relay.is_final(b));  // depth k-1
  f.mine(1);
  EXPECT_TRUE(f.relay.is_final(b));   // depth k
  f.mine(1);
  EXPECT_TRUE(f.relay.is_final(b));   // depth k+1
  EXPECT_FALSE(f.relay.is_final(test::bytes_of(0x77)));
}

TEST(Relay, AbandonedBranchIsNeverFinal) {
  Fed f;
  f.mine(2);
  f.chain.fork_adversary(f.chain.main_hash_at(1));
  const BlockHeader side = f.chain.mine_block(Miner::adversary);
  ASSERT_TRUE(f.relay.submit_header(side));
  f.mine(static_cast<int>(kK) + 10);
  EXPECT_FALSE(f.relay.is_final(side.hash()));
}

TEST(Relay, InclusionNeedsFinalityAndMatchingPath) {
  Fed f;
  const Note out = test::note_to(f.key, Amount{100'000}, 2);
  ASSERT_TRUE(f.chain.submit_shielded_tx(test::spend_tx(f.funds, f.key, {out}, Amount{})));
  f.mine(1);
  const BlockHash b = f.chain.tip_hash();
  const auto cm = commit_note(out);
  const auto path = *f.chain.merkle_path(cm, b);

  f.mine(static_cast<int>(kK) - 1);
  EXPECT_EQ(f.relay.verify_note_inclusion(cm, path, b).error().code, Reject::not_final);
  f.mine(1);
  EXPECT_TRUE(f.relay.verify_note_inclusion(cm, path, b));
  EXPECT_EQ(f.relay.verify_note_inclusion(commit_note(f.funds), path, b).error().code, Reject::bad_path);
}
