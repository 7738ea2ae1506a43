#include "zclaim/sim/scenario.hpp"

#include <charconv>
#include <fstream>

#include "actors.hpp"

namespace zclaim::sim {

namespace {

constexpr const char* kMetricsHeader =
    "tick,wzec_supply,zec_locked,zec_released,issues_completed,redeems_completed,slashes,slashed,"
    "challenges_upheld,liquidations,liquidated,safety_violations,zcash_height,relay_height,finality_reversions";

std::string units(Amount a) { return std::to_string(a.units()); }

std::string metrics_row(const Engine& e) {
  const auto& m = e.metrics();
  const auto a = e.accounting();
  std::string row = std::to_string(e.now());
  for (const auto& v : {units(a.wzec_supply), units(a.zec_locked), units(a.zec_released),
                        std::to_string(m.issues_completed), std::to_string(m.redeems_completed),
                        std::to_string(m.slashes), units(m.slashed), std::to_string(m.challenges_upheld),
                        std::to_string(m.liquidations), units(m.liquidated), std::to_string(m.safety_violations),
                        std::to_string(e.zcash().height()), std::to_string(e.relay().best_tip().height),
                        std::to_string(e.relay().metrics().finality_reversions)}) {
    row += ',' + v;
  }
  return row;
}

std::map<std::string, std::string> summarize(const Engine& e, const detail::World& w, const detail::Adversary& adv) {
  std::map<std::string, std::string> s;
  const auto& m = e.metrics();
  const auto a = e.accounting();
  s["supply"] = units(a.wzec_supply);
  s["minted"] = units(a.minted);
  s["burnt"] = units(a.burnt);
  s["zec_locked"] = units(a.zec_locked);
  s["zec_released"] = units(m.zec_released);
  s["zec_forfeited"] = units(m.zec_forfeited);
  s["issues_completed"] = std::to_string(m.issues_completed);
  s["redeems_completed"] = std::to_string(m.redeems_completed);
  s["slashes"] = std::to_string(m.slashes);
  s["slashed"] = units(m.slashed);
  s["auto_confirms"] = std::to_string(m.auto_confirms);
  s["mint_timeouts"] = std::to_string(m.mint_timeouts);
  s["redeem_timeouts"] = std::to_string(m.redeem_timeouts);
  s["challenges_upheld"] = std::to_string(m.challenges_upheld);
  s["challenges_rejected"] = std::to_string(m.challenges_rejected);
  s["replays_rejected"] = std::to_string(m.replays_rejected);
  s["attacks_rejected"] = std::to_string(w.attacks_rejected);
  s["liquidations"] = std::to_string(m.liquidations);
  s["liquidated"] = units(m.liquidated);
  s["safety_violations"] = std::to_string(m.safety_violations);
  s["zcash_reorgs"] = std::to_string(adv.reorgs());
  s["relay_tip_switches"] = std::to_string(e.relay().metrics().tip_switches);
  s["finality_reversions"] = std::to_string(e.relay().metrics().finality_reversions);
  s["accepted_pocs"] = std::to_string(w.pocs.size());
  for (const auto& [name, id] : w.people) {
    s["i." + name] = units(e.issuing().balance(id));
    s["zec." + name] = units(e.zcash_balance(id));
    s["wzec." + name] = units(e.wzec_balance(id));
  }
  for (const auto& [name, id] : w.vaults) {
    s["collateral." + name] = units(e.registry().find(id)->collateral);
  }
  for (const auto& [label, id] : w.issues) s["issue." + label] = to_string(e.request(id)->state);
  for (const auto& [label, id] : w.redeems) s["redeem." + label] = to_string(e.request(id)->state);
  return s;
}

std::optional<std::int64_t> to_int(std::string_view s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool meets(const std::string& actual, const std::string& expected) {
  for (const std::string op : {">=", "<=", ">", "<"}) {
    if (expected.rfind(op, 0) != 0) continue;
    const auto want = to_int(expected.substr(op.size()));
    const auto got = to_int(actual);
    if (!want || !got) return false;
    if (op == ">=") return *got >= *want;
    if (op == "<=") return *got <= *want;
    if (op == ">") return *got > *want;
    return *got < *want;
  }
  return actual == expected;
}

}  // namespace

std::string ScenarioResult::summary_csv() const {
  std::string out = "metric,value\n";
  for (const auto& [k, v] : summary) out += k + ',' + v + '\n';
  out += "invariant_failures," + std::to_string(invariant_failures.size()) + '\n';
  out += "conformance_violations," + std::to_string(conformance.violations.size()) + '\n';
  return out;
}

std::string ScenarioResult::expectations_csv() const {
  std::string out = "metric,expected,actual,pass\n";
  for (const auto& x : expectations) {
    out += x.metric + ',' + x.expected + ',' + x.actual + ',' + (x.pass ? "true" : "false") + '\n';
  }
  return out;
}

bool ScenarioResult::ok() const {
  if (!invariant_failures.empty() || !conformance.ok()) return false;
  for (const auto& x : expectations) {
    if (!x.pass) return false;
  }
  return true;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  check_references(cfg);
  const std::uint64_t seed = opts.seed.value_or(cfg.seed);
  Engine engine(cfg.params, seed);
  for (const auto& [tick, rate] : cfg.rates) (void)engine.oracle().set_rate(tick, rate);
  engine.set_relay_muted(cfg.relay_muted);

  detail::World world{engine, {}, {}, {}, {}, {}, 0};
  std::vector<detail::VaultAgent> vaults;
  for (const auto& spec : cfg.vaults) {
    const ActorId owner = engine.add_participant(spec.name, spec.collateral + spec.i_balance, spec.zec);
    const auto id = engine.register_vault(owner, spec.collateral);
    if (!id) throw std::runtime_error("vault " + spec.name + " could not register");
    world.people[spec.name] = owner;
    world.vaults[spec.name] = *id;
    vaults.emplace_back(spec, *id);
  }
  for (const auto& spec : cfg.users) world.people[spec.name] = engine.add_participant(spec.name, spec.i_balance, spec.zec);
  std::vector<detail::IssueAgent> issuers(cfg.issues.begin(), cfg.issues.end());
  std::vector<detail::RedeemAgent> redeemers(cfg.redeems.begin(), cfg.redeems.end());
  // A separate stream so the adversary's coin flips do not shift the engine's.
  detail::Adversary adversary(cfg.adversary, cfg.params.finality_depth, seed ^ 0x9e3779b97f4a7c15ULL);

  ScenarioResult result;
  result.name = cfg.name;
  result.seed = seed;
  result.metrics_csv = std::string(kMetricsHeader) + '\n';

  auto check = [&](Engine::InvariantScope scope) {
    for (const auto& bad : engine.check_invariants(scope)) {
      result.invariant_failures.push_back(std::to_string(engine.now()) + ':' + bad);
    }
  };

  while (engine.now() < cfg.horizon) {
    (void)engine.tick();
    adversary.step(world);
    for (auto& v : vaults) v.step(world);
    for (auto& i : issuers) i.step(world);
    for (auto& r : redeemers) r.step(world);
    if (opts.check_every_tick) check(Engine::InvariantScope::ledger);
    result.metrics_csv += metrics_row(engine) + '\n';
  }
  check(Engine::InvariantScope::full);

  result.trace_csv = engine.trace_csv();
  result.public_log = engine.public_view();
  result.events_csv = "tick,kind,request_id,vault_id\n";
  for (const auto& ev : engine.events()) {
    result.events_csv += std::to_string(ev.tick) + ',' + ev.kind + ',' +
                         (ev.request ? std::to_string(raw(*ev.request)) : "-") + ',' +
                         (ev.vault ? std::to_string(raw(*ev.vault)) : "-") + '\n';
  }
  result.summary = summarize(engine, world, adversary);
  result.conformance = check_conformance(engine.trace());
  result.accepted_pocs = world.pocs;
  for (const auto& [name, id] : world.vaults) {
    auto& seen = result.vault_received[name];
    for (const auto& note : engine.vault_received(id)) seen.push_back(note.value);
  }

  for (const auto& [metric, expected] : cfg.expect) {
    Expectation x{metric, expected, "<missing>", false};
    if (metric == "invariant_failures") {
      x.actual = std::to_string(result.invariant_failures.size());
    } else if (metric == "conformance_violations") {
      x.actual = std::to_string(result.conformance.violations.size());
    } else if (const auto it = result.summary.find(metric); it != result.summary.end()) {
      x.actual = it->second;
    }
    x.pass = x.actual != "<missing>" && meets(x.actual, expected);
    result.expectations.push_back(std::move(x));
  }
  return result;
}

void write_outputs(const ScenarioResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << body;
  };
  put("trace.csv", result.trace_csv);
  put("public.log", result.public_log);
  put("metrics.csv", result.metrics_csv);
  put("events.csv", result.events_csv);
  put("summary.csv", result.summary_csv());
  put("expectations.csv", result.expectations_csv());
}

ScenarioConfig random_episode(std::uint64_t seed) {
  Rng rng(seed);
  // Half of all actors are honest; the rest draw any strategy, honest included.
  auto pick = [&](const std::vector<std::string>& from) {
    return bernoulli(rng, 1, 2) ? from.front() : from[uniform_int(rng, 0, from.size() - 1)];
  };

  ScenarioConfig cfg;
  cfg.name = "episode-" + std::to_string(seed);
  cfg.seed = seed;
  cfg.horizon = 60;
  cfg.params.finality_depth = 3;
  cfg.params.delta_mint = 10;
  cfg.params.delta_confirm_issue = 3;
  cfg.params.delta_confirm_redeem = 10;
  cfg.params.registry.poc_validity = 25;
  cfg.params.registry.pob_period = 20;
  cfg.rates[0] = Ratio{2, 1};
  if (bernoulli(rng, 1, 2)) {
    const std::int64_t num = static_cast<std::int64_t>(uniform_int(rng, 2, 8));
    cfg.rates[uniform_int(rng, 10, 50)] = Ratio{num, 2};
  }

  const auto vault_count = uniform_int(rng, 1, 3);
  for (std::uint64_t i = 0; i < vault_count; ++i) {
    VaultSpec v;
    v.name = "v" + std::to_string(i);
    v.collateral = Amount::coins(uniform_int(rng, 250, 1200));
    v.zec = {Amount::coins(5)};
    v.strategy = pick(vault_strategies());
    v.poi = bernoulli(rng, 1, 4);
    cfg.vaults.push_back(v);
  }
  for (const char* name : {"alice", "bob"}) {
    UserSpec u;
    u.name = name;
    u.zec = {Amount::coins(100), Amount::coins(100)};
    cfg.users.push_back(u);
  }

  const bool eclipse = bernoulli(rng, 1, 8);
  if (eclipse) {
    cfg.adversary.strategy = "eclipse";
    cfg.adversary.at = uniform_int(rng, 2, 10);
    cfg.adversary.blocks = cfg.params.finality_depth + 3;
  } else if (bernoulli(rng, 1, 4)) {
    cfg.adversary.strategy = "reorg_race";
    cfg.adversary.alpha = Ratio{static_cast<std::int64_t>(uniform_int(rng, 1, 3)), 10};
  }

  const auto issue_count = uniform_int(rng, 1, 4);
  for (std::uint64_t i = 0; i < issue_count; ++i) {
    IssueSpec s;
    s.label = "i" + std::to_string(i);
    s.user = cfg.users[uniform_int(rng, 0, 1)].name;
    s.vault = cfg.vaults[uniform_int(rng, 0, cfg.vaults.size() - 1)].name;
    s.at = uniform_int(rng, 1, 25);
    s.amount = Amount::coins(uniform_int(rng, 1, 60)) + Amount{uniform_int(rng, 0, kCoin - 1)};
    s.strategy = pick(issue_strategies());
    if (s.strategy == "replay") {
      if (i == 0) s.strategy = "honest";
      else s.replay_of = "i" + std::to_string(uniform_int(rng, 0, i - 1));
    }
    if (s.strategy == "adversary_lock") {
      if (eclipse) s.at = cfg.adversary.at + 1;
      else s.strategy = "honest";
    }
    cfg.issues.push_back(s);
  }

  const auto redeem_count = uniform_int(rng, 0, 2);
  for (std::uint64_t i = 0; i < redeem_count; ++i) {
    RedeemSpec s;
    s.label = "r" + std::to_string(i);
    s.user = cfg.users[uniform_int(rng, 0, 1)].name;
    s.vault = cfg.vaults[uniform_int(rng, 0, cfg.vaults.size() - 1)].name;
    s.at = uniform_int(rng, 20, 40);
    s.amount = Amount::coins(uniform_int(rng, 1, 20));
    s.strategy = pick(redeem_strategies());
    if (s.strategy == "reuse_note") {
      if (i == 0) {
        s.strategy = "honest";
      } else {
        s.reuse_of = "r" + std::to_string(i - 1);
        s.amount = cfg.redeems[i - 1].amount;
      }
    }
    cfg.redeems.push_back(s);
  }
  return cfg;
}

}  // namespace zclaim::sim
