#include "zclaim/sim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace zclaim::sim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

class Line {
public:
  Line(std::size_t number, std::string key, std::string value)
      : number_(number), key_(std::move(key)), value_(std::move(value)) {}

  [[nodiscard]] std::size_t number() const { return number_; }
  [[nodiscard]] const std::string& key() const { return key_; }
  [[nodiscard]] const std::string& text() const { return value_; }

  [[noreturn]] void fail(const std::string& why) const { throw ConfigError(number_, key_ + ": " + why); }

  [[nodiscard]] std::uint64_t u64() const {
    std::uint64_t v = 0;
    const auto* end = value_.data() + value_.size();
    const auto [ptr, ec] = std::from_chars(value_.data(), end, v);
    if (ec != std::errc() || ptr != end) fail("expected a non-negative integer, got '" + value_ + "'");
    return v;
  }
  [[nodiscard]] Amount amount() const { return Amount{u64()}; }
  [[nodiscard]] std::vector<Amount> amounts() const {
    std::vector<Amount> out;
    for (const auto& part : split(value_, ',')) {
      if (part.empty()) continue;
      out.push_back(Line(number_, key_, part).amount());
    }
    return out;
  }
  [[nodiscard]] Ratio ratio() const {
    try {
      return parse_ratio(value_);
    } catch (const std::exception& e) {
      fail(std::string("expected num/den: ") + e.what());
    }
  }
  [[nodiscard]] bool boolean() const {
    if (value_ == "true" || value_ == "1" || value_ == "yes") return true;
    if (value_ == "false" || value_ == "0" || value_ == "no") return false;
    fail("expected true or false");
  }
  [[nodiscard]] std::string name() const {
    if (value_.empty()) fail("empty value");
    return value_;
  }
  [[nodiscard]] std::string one_of(const std::vector<std::string>& allowed) const {
    if (std::find(allowed.begin(), allowed.end(), value_) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail("unknown strategy '" + value_ + "' (known: " + list + ")");
    }
    return value_;
  }

private:
  std::size_t number_;
  std::string key_;
  std::string value_;
};

template <class T>
T& entry(std::vector<T>& list, const std::string& name) {
  for (auto& x : list) {
    if constexpr (requires { x.label; }) {
      if (x.label == name) return x;
    } else {
      if (x.name == name) return x;
    }
  }
  T fresh;
  if constexpr (requires { fresh.label; }) {
    fresh.label = name;
  } else {
    fresh.name = name;
  }
  list.push_back(std::move(fresh));
  return list.back();
}

void apply_params(ScenarioConfig& cfg, const std::string& field, const Line& line) {
  auto& r = cfg.params.registry;
  if (field == "v_max") r.v_max = line.amount();
  else if (field == "fee") r.fee = line.ratio();
  else if (field == "sigma") r.sigma_std = line.ratio();
  else if (field == "i_w") r.i_w = line.amount();
  else if (field == "poc_validity") r.poc_validity = line.u64();
  else if (field == "pob_period") r.pob_period = line.u64();
  else if (field == "liq_margin") r.liq_margin = line.ratio();
  else line.fail("unknown parameter");
}

void apply_protocol(ScenarioConfig& cfg, const std::string& field, const Line& line) {
  auto& p = cfg.params;
  if (field == "delta_mint") p.delta_mint = line.u64();
  else if (field == "delta_confirm_issue") p.delta_confirm_issue = line.u64();
  else if (field == "delta_confirm_redeem") p.delta_confirm_redeem = line.u64();
  else if (field == "zc_block_interval") p.zc_block_interval = line.u64();
  else if (field == "zcash_fee") p.zcash.fee = line.amount();
  else line.fail("unknown protocol setting");
}

void apply(ScenarioConfig& cfg, const Line& line) {
  const auto parts = split(line.key(), '.');
  const auto& head = parts[0];
  const std::size_t n = parts.size();

  if (n == 1) {
    if (head == "name") cfg.name = line.name();
    else if (head == "seed") cfg.seed = line.u64();
    else if (head == "horizon") cfg.horizon = line.u64();
    else line.fail("unknown key");
    return;
  }
  if (head == "params" && n == 2) return apply_params(cfg, parts[1], line);
  if (head == "protocol" && n == 2) return apply_protocol(cfg, parts[1], line);
  if (head == "relay" && n == 2) {
    if (parts[1] == "k") cfg.params.finality_depth = line.u64();
    else if (parts[1] == "muted") cfg.relay_muted = line.boolean();
    else line.fail("unknown relay setting");
    return;
  }
  if (head == "oracle" && n == 3 && parts[1] == "rate") {
    const Tick at = Line(line.number(), line.key(), parts[2]).u64();
    const Ratio r = line.ratio();
    if (r.num <= 0) line.fail("rate must be positive");
    cfg.rates[at] = r;
    return;
  }
  if (head == "vault" && n == 3) {
    auto& v = entry(cfg.vaults, parts[1]);
    const auto& f = parts[2];
    if (f == "collateral") v.collateral = line.amount();
    else if (f == "i") v.i_balance = line.amount();
    else if (f == "zec") v.zec = line.amounts();
    else if (f == "strategy") v.strategy = line.one_of(vault_strategies());
    else if (f == "poi") v.poi = line.boolean();
    else line.fail("unknown vault field");
    return;
  }
  if (head == "user" && n == 3) {
    auto& u = entry(cfg.users, parts[1]);
    const auto& f = parts[2];
    if (f == "i") u.i_balance = line.amount();
    else if (f == "zec") u.zec = line.amounts();
    else line.fail("unknown user field");
    return;
  }
  if (head == "issue" && n == 3) {
    auto& s = entry(cfg.issues, parts[1]);
    const auto& f = parts[2];
    if (f == "user") s.user = line.name();
    else if (f == "vault") s.vault = line.name();
    else if (f == "at") s.at = line.u64();
    else if (f == "amount") s.amount = line.amount();
    else if (f == "strategy") s.strategy = line.one_of(issue_strategies());
    else if (f == "replay_of") s.replay_of = line.name();
    else line.fail("unknown issue field");
    return;
  }
  if (head == "redeem" && n == 3) {
    auto& s = entry(cfg.redeems, parts[1]);
    const auto& f = parts[2];
    if (f == "user") s.user = line.name();
    else if (f == "vault") s.vault = line.name();
    else if (f == "at") s.at = line.u64();
    else if (f == "amount") s.amount = line.amount();
    else if (f == "strategy") s.strategy = line.one_of(redeem_strategies());
    else if (f == "reuse_of") s.reuse_of = line.name();
    else line.fail("unknown redeem field");
    return;
  }
  if (head == "adversary" && n == 2) {
    auto& a = cfg.adversary;
    if (parts[1] == "strategy") a.strategy = line.one_of(adversary_strategies());
    else if (parts[1] == "at") a.at = line.u64();
    else if (parts[1] == "blocks") a.blocks = line.u64();
    else if (parts[1] == "alpha") {
      a.alpha = line.ratio();
      if (a.alpha.num >= a.alpha.den) line.fail("alpha must be below 1");
    }
    else line.fail("unknown adversary setting");
    return;
  }
  if (head == "expect") {
    cfg.expect[line.key().substr(head.size() + 1)] = line.name();
    return;
  }
  line.fail("unknown key");
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig cfg;
  std::set<std::string> seen;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view raw_line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    ++number;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;

    if (const auto hash = raw_line.find('#'); hash != std::string_view::npos) raw_line = raw_line.substr(0, hash);
    const auto body = trim(raw_line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError(number, "expected 'key = value'");
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key.empty()) throw ConfigError(number, "empty key");
    if (!seen.insert(key).second) throw ConfigError(number, key + ": duplicate key");
    apply(cfg, Line(number, key, value));
  }
  check_references(cfg);
  try {
    validate(cfg.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void check_references(const ScenarioConfig& cfg) {
  std::set<std::string> users, vaults, issues, redeems;
  for (const auto& u : cfg.users) users.insert(u.name);
  for (const auto& v : cfg.vaults) {
    if (v.collateral.is_zero()) throw ConfigError(0, "vault " + v.name + " needs collateral");
    vaults.insert(v.name);
  }
  for (const auto& i : cfg.issues) {
    if (!users.count(i.user)) throw ConfigError(0, "issue " + i.label + " names unknown user '" + i.user + "'");
    if (!vaults.count(i.vault)) throw ConfigError(0, "issue " + i.label + " names unknown vault '" + i.vault + "'");
    if (i.strategy == "replay" && !issues.count(i.replay_of)) {
      throw ConfigError(0, "issue " + i.label + " replays unknown or later issue '" + i.replay_of + "'");
    }
    issues.insert(i.label);
  }
  for (const auto& r : cfg.redeems) {
    if (!users.count(r.user)) throw ConfigError(0, "redeem " + r.label + " names unknown user '" + r.user + "'");
    if (!vaults.count(r.vault)) throw ConfigError(0, "redeem " + r.label + " names unknown vault '" + r.vault + "'");
    if (r.strategy == "reuse_note" && !redeems.count(r.reuse_of)) {
      throw ConfigError(0, "redeem " + r.label + " reuses unknown or later redeem '" + r.reuse_of + "'");
    }
    redeems.insert(r.label);
  }
  if (cfg.rates.empty()) throw ConfigError(0, "at least one oracle.rate.<tick> is required");
}

}  // namespace zclaim::sim
