#include <stdexcept>

#include "zclaim/relay.hpp"
#include "zclaim/rng.hpp"
#include "zclaim/sim/scenario.hpp"
#include "zclaim/zcash_chain.hpp"

namespace zclaim::sim {

RaceResult relay_race(double alpha, std::uint64_t blocks, std::uint64_t seed, std::uint64_t finality_depth,
                      std::uint64_t give_up) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("relay_race: alpha must be in [0, 1)");
  constexpr std::uint64_t kScale = std::uint64_t{1} << 53;
  const auto threshold = static_cast<std::uint64_t>(alpha * static_cast<double>(kScale));

  Rng rng(seed);
  ZcashChain chain;
  Relay relay(chain.tip(), finality_depth);
  auto forward = [&] {
    const auto headers = chain.branch_headers(chain.tip_hash(), [&](const BlockHash& h) { return relay.knows(h); });
    for (const auto& h : headers) (void)relay.submit_header(h);
  };
  chain.fork_adversary(chain.tip_hash());

  RaceResult out;
  for (std::uint64_t i = 0; i < blocks; ++i) {
    ++out.blocks;
    if (uniform_int(rng, 0, kScale - 1) < threshold) {
      chain.mine_block(Miner::adversary);
      ++out.adversary_blocks;
    } else {
      chain.mine_block(Miner::honest);
      forward();
    }

    const auto& adv = chain.block(*chain.adversary_tip())->header;
    if (adv.work > chain.tip().work) {
      const auto report = chain.reorg_to(*chain.adversary_tip());
      if (report) {
        ++out.reorgs;
        out.deepest_reorg = std::max<std::uint64_t>(out.deepest_reorg, report->abandoned_blocks);
        forward();
      }
      chain.fork_adversary(chain.tip_hash());
    } else if (chain.tip().height > adv.height + give_up) {
      chain.fork_adversary(chain.tip_hash());
    }
  }
  out.finality_reversions = relay.metrics().finality_reversions;
  return out;
}

}  // namespace zclaim::sim
