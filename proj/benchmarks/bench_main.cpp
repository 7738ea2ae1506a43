#include <benchmark/benchmark.h>

#include "zclaim/merkle.hpp"
#include "zclaim/sim/config.hpp"
#include "zclaim/sim/scenario.hpp"
#include "zclaim/splitting.hpp"

namespace {

using namespace zclaim;

void BM_Split(benchmark::State& state) {
  const auto cfg = split::make_config(10, 8);
  Rng rng(1);
  std::uint64_t t = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(split::split(t, cfg, rng));
    t = t % cfg.max_total() + 1;
  }
}
BENCHMARK(BM_Split);

void BM_SplitModel(benchmark::State& state) {
  const auto cfg = split::make_config(static_cast<unsigned>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(split::SplitModel(cfg));
}
BENCHMARK(BM_SplitModel)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_CheckBounds(benchmark::State& state) {
  const auto cfg = split::make_config(10, 8);
  for (auto _ : state) benchmark::DoNotOptimize(split::check_bounds(cfg));
}
BENCHMARK(BM_CheckBounds)->Unit(benchmark::kMillisecond);

void BM_MerkleAppend(benchmark::State& state) {
  CommitmentTree tree(32);
  NoteCommitment leaf{};
  for (auto _ : state) {
    leaf.digest[0]++;
    tree.append(leaf);
    benchmark::DoNotOptimize(tree.root());
  }
}
BENCHMARK(BM_MerkleAppend);

void BM_Scenario(benchmark::State& state) {
  const auto cfg = sim::load_scenario(ZCLAIM_SCENARIO_DIR "/redeem_happy.cfg");
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_scenario(cfg));
}
BENCHMARK(BM_Scenario)->Unit(benchmark::kMillisecond);

void BM_RandomEpisode(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_scenario(sim::random_episode(seed++)));
}
BENCHMARK(BM_RandomEpisode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
