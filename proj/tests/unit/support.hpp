#pragma once

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "zclaim/protocol.hpp"

namespace zclaim::test {

inline Bytes32 bytes_of(std::uint8_t fill) {
  Bytes32 b{};
  b.fill(fill);
  return b;
}

inline SpendingKey key_of(std::uint8_t seed) {
  Diversifier d{};
  d.fill(static_cast<std::uint8_t>(seed + 1));
  return make_spending_key(bytes_of(seed), d);
}

inline Note note_to(const SpendingKey& key, Amount value, std::uint8_t rcm_seed) {
  return Note{key.address, value, bytes_of(rcm_seed)};
}

/// Spends `in` (owned by `key`) into `outs`, leaving `value_out` as fee.
inline ShieldedTx spend_tx(const Note& in, const SpendingKey& key, const std::vector<Note>& outs, Amount value_out) {
  ShieldedTx tx;
  tx.nullifiers.push_back(derive_nullifier(in, key.nullifier_key));
  tx.spend_witnesses.push_back({in, key.nullifier_key});
  for (const auto& n : outs) {
    tx.outputs.push_back({commit_note(n), {}});
    tx.output_notes.push_back(n);
  }
  tx.value_out = value_out;
  return tx;
}

/// One engine with a funded user and one vault at the 294 i boundary scale:
/// v_max 100 ZEC, f = 2/100, sigma = 3/2, rate 2 i/ZEC.
struct Bridge {
  ProtocolParams params;
  Engine engine;
  ActorId alice;
  ActorId owner;
  VaultId vault{};

  static ProtocolParams defaults() {
    ProtocolParams p;
    p.registry.poc_validity = 400;
    p.registry.pob_period = 400;
    return p;
  }

  explicit Bridge(ProtocolParams p = defaults(), Amount collateral = Amount::coins(600))
      : params(p), engine(p, 7) {
    alice = engine.add_participant("alice", Amount::coins(10), {Amount::coins(60), Amount::coins(60)});
    owner = engine.add_participant("owner", collateral + Amount::coins(5), {Amount::coins(60)});
    EXPECT_TRUE(engine.oracle().set_rate(0, Ratio{2, 1}));
    vault = *engine.register_vault(owner, collateral);
    engine.tick();
  }

  void advance(Tick n) {
    for (Tick i = 0; i < n; ++i) engine.tick();
  }

  /// Ticks until the lock of `id` is final and a mint can be built.
  Result<MintPackage> wait_for_mint(RequestId id, MintOptions opts = {}) {
    for (int i = 0; i < 200; ++i) {
      auto pkg = engine.make_mint(alice, id, opts);
      if (pkg) return pkg;
      engine.tick();
    }
    return reject(Reject::not_final, "lock never became final");
  }

  /// Runs a full honest issue of `lock` ZEC; returns the request.
  RequestId issue(Amount lock) {
    EXPECT_TRUE(engine.submit_poc(vault));
    const auto id = engine.request_lock(alice, vault);
    EXPECT_TRUE(id);
    EXPECT_TRUE(engine.do_lock(alice, *id, lock));
    const auto pkg = wait_for_mint(*id);
    EXPECT_TRUE(pkg);
    EXPECT_TRUE(engine.do_mint(alice, *id, *pkg));
    EXPECT_TRUE(engine.confirm_issue(vault, *id));
    return *id;
  }

  Result<InclusionProof> wait_for_release(RequestId id) {
    for (int i = 0; i < 200; ++i) {
      auto proof = engine.release_proof(vault, id);
      if (proof) return proof;
      engine.tick();
    }
    return reject(Reject::not_final, "release never became final");
  }
};

}  // namespace zclaim::test
