#include "zclaim/vault_registry.hpp"

#include <gmpxx.h>

#include <sstream>
#include <stdexcept>

#include "zclaim/issuing_chain.hpp"

namespace zclaim {

namespace {

mpz_class z(std::uint64_t v) { return mpz_class(std::to_string(v)); }
mpz_class z(std::int64_t v) { return mpz_class(std::to_string(v)); }
mpq_class q(const Ratio& r) {
  mpq_class out(z(r.num), z(r.den));
  out.canonicalize();
  return out;
}
mpq_class q(Amount a) { return mpq_class(z(a.units())); }

Amount to_amount_ceil(const mpq_class& v) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  if (c < 0) return Amount{};
  return Amount{std::stoull(c.get_str())};
}

}  // namespace

void validate(const RegistryParams& p) {
  if (p.fee.den <= 0 || p.fee.num < 0 || p.fee.num >= p.fee.den) throw std::invalid_argument("fee must satisfy 0 <= f < 1");
  if (p.sigma_std.den <= 0 || p.sigma_std.num < p.sigma_std.den) throw std::invalid_argument("sigma_std must be >= 1");
  if (p.liq_margin.den <= 0 || p.liq_margin.num < 0) throw std::invalid_argument("liq_margin must be >= 0");
}

bool satisfies_capacity(Amount collateral, Amount obligations, const RegistryParams& p, Ratio xr) {
  const mpq_class backing = q(p.sigma_std) * q(xr);
  const mpq_class free = q(collateral) - q(obligations) * backing;
  return free >= q(p.v_max) * (1 - q(p.fee)) * backing;
}

bool satisfies_balance(Amount collateral, Amount obligations, Ratio sigma, Ratio xr) {
  return q(collateral) >= q(obligations) * q(sigma) * q(xr);
}

const char* to_string(IssueSide s) {
  switch (s) {
    case IssueSide::registered: return "VaultRegistered";
    case IssueSide::issue_start: return "IssueStart";
    case IssueSide::not_issuing: return "NotIssuing";
  }
  return "?";
}

const char* to_string(RedeemSide s) {
  return s == RedeemSide::redeem_start ? "RedeemStart" : "NotRedeeming";
}

Amount replay_history(const std::vector<HistoryEntry>& history) {
  Amount total;
  for (const auto& e : history) {
    total = e.kind == HistoryEntry::Kind::issue ? total + e.amount : saturating_sub(total, e.amount);
  }
  return total;
}

VaultRegistry::VaultRegistry(RegistryParams params) : params_(params) { validate(params_); }

Result<VaultId> VaultRegistry::register_vault(ActorId owner, Amount collateral, const Address& address, Tick now) {
  if (collateral.is_zero()) return reject(Reject::invalid_argument, "collateral must be positive");
  VaultRecord v;
  v.id = VaultId{next_id_++};
  v.owner = owner;
  v.address = address;
  v.collateral = collateral;
  v.last_statement_tick = now;
  const auto id = v.id;
  vaults_.emplace(id, std::move(v));
  private_.emplace(id, Private{});
  return id;
}

VaultRecord& VaultRegistry::at(VaultId id) {
  auto it = vaults_.find(id);
  if (it == vaults_.end()) throw std::out_of_range("unknown vault");
  return it->second;
}

const VaultRecord* VaultRegistry::find(VaultId id) const {
  auto it = vaults_.find(id);
  return it == vaults_.end() ? nullptr : &it->second;
}

void VaultRegistry::note_statement(VaultRecord& v, Ratio xr, Tick now) {
  v.last_statement_rate = xr;
  v.last_statement_tick = now;
  v.has_statement = true;
}

Status VaultRegistry::submit_poc(VaultId id, Amount claimed_obligations, Ratio xr, Tick now) {
  if (!find(id)) return reject(Reject::unknown_entity, "vault");
  auto& v = at(id);
  if (claimed_obligations != private_.at(id).obligations) return reject(Reject::inconsistent_witness, "obligations");
  if (!satisfies_capacity(v.collateral, claimed_obligations, params_, xr)) {
    return reject(Reject::undercollateralized, "free collateral below capacity requirement");
  }
  v.issue_side = IssueSide::issue_start;
  v.xr_cap = xr;
  v.poc_expiry = now + params_.poc_validity;
  note_statement(v, xr, now);
  return ok_status();
}

Status VaultRegistry::submit_pob(VaultId id, const std::vector<HistoryEntry>& witness, Ratio xr, Tick now) {
  if (!find(id)) return reject(Reject::unknown_entity, "vault");
  auto& v = at(id);
  const auto& priv = private_.at(id);
  if (witness != priv.history || replay_history(witness) != priv.obligations) {
    return reject(Reject::inconsistent_witness, "history does not replay to obligations");
  }
  if (!satisfies_balance(v.collateral, priv.obligations, params_.sigma_std, xr)) {
    return reject(Reject::undercollateralized, "collateral below obligations * sigma * xr");
  }
  v.issue_side = IssueSide::not_issuing;
  note_statement(v, xr, now);
  return ok_status();
}

Status VaultRegistry::submit_poi(VaultId id, Amount claimed_obligations, Tick now) {
  if (!find(id)) return reject(Reject::unknown_entity, "vault");
  auto& v = at(id);
  if (claimed_obligations != private_.at(id).obligations) return reject(Reject::inconsistent_witness, "obligations");
  if (claimed_obligations >= params_.v_max) return reject(Reject::undercollateralized, "obligations not below v_max");
  v.redeem_side = RedeemSide::not_redeeming;
  v.poi_expiry = now + params_.poc_validity;
  return ok_status();
}

std::optional<Liquidation> VaultRegistry::check_liquidation(VaultId id, Ratio xr, Tick now) {
  auto& v = at(id);
  auto& priv = private_.at(id);
  if (now - v.last_statement_tick <= params_.pob_period) return std::nullopt;
  if (v.has_statement) {
    const mpq_class last = q(v.last_statement_rate);
    mpq_class moved = q(xr) - last;
    if (moved < 0) moved = -moved;
    if (moved <= q(params_.liq_margin) * last) return std::nullopt;
  }
  if (satisfies_balance(v.collateral, priv.obligations, params_.sigma_std, xr)) return std::nullopt;

  // Seizing L = D*xr of collateral retires D of obligations:
  //   C - L >= (O - D)*sigma*xr  <=>  D >= (O*sigma*xr - C) / (xr*(sigma - 1)).
  const mpq_class rate = q(xr);
  const mpq_class sigma = q(params_.sigma_std);
  Amount covered = priv.obligations;
  if (sigma > 1) {
    const mpq_class need = (q(priv.obligations) * sigma * rate - q(v.collateral)) / (rate * (sigma - 1));
    covered = std::min(to_amount_ceil(need), priv.obligations);
    for (;;) {
      const Amount seized = std::min(v.collateral, to_amount_ceil(q(covered) * rate));
      if (covered == priv.obligations ||
          satisfies_balance(v.collateral - seized, priv.obligations - covered, params_.sigma_std, xr)) {
        break;
      }
      covered += Amount{1};
    }
  }
  const Amount seized = std::min(v.collateral, to_amount_ceil(q(covered) * rate));
  v.collateral -= seized;
  priv.obligations -= covered;
  priv.history.push_back({RequestId{0}, HistoryEntry::Kind::liquidation, covered});
  return Liquidation{seized, covered};
}

void VaultRegistry::slash_warranty(IssuingChain& chain, WarrantySource source, VaultId vault, RequestId request,
                                   Amount amount, ActorId to) {
  if (source == WarrantySource::vault_collateral) {
    auto& v = at(vault);
    const Amount taken = std::min(v.collateral, amount);
    v.collateral -= taken;
    chain.credit(to, taken);
  } else {
    chain.release_warranty(request, to);
  }
}

void VaultRegistry::record_issue(VaultId id, RequestId request, Amount wzec_created) {
  auto& v = at(id);
  auto& priv = private_.at(id);
  priv.obligations += wzec_created;
  priv.history.push_back({request, HistoryEntry::Kind::issue, wzec_created});
  // The capacity proved by the last POC is used up, and taking part in an
  // issue ends any redeem exemption.
  v.issue_side = IssueSide::not_issuing;
  v.redeem_side = RedeemSide::redeem_start;
}

void VaultRegistry::record_redeem(VaultId id, RequestId request, Amount wzec_burnt) {
  auto& priv = private_.at(id);
  priv.obligations = saturating_sub(priv.obligations, wzec_burnt);
  priv.history.push_back({request, HistoryEntry::Kind::redeem, wzec_burnt});
}

void VaultRegistry::set_active_issue(VaultId id, std::optional<RequestId> request) { at(id).active_issue = request; }
void VaultRegistry::set_active_redeem(VaultId id, std::optional<RequestId> request) { at(id).active_redeem = request; }

std::vector<VaultId> VaultRegistry::expire(Tick now) {
  std::vector<VaultId> changed;
  for (auto& [id, v] : vaults_) {
    bool touched = false;
    if (v.issue_side == IssueSide::issue_start && now > v.poc_expiry) {
      v.issue_side = IssueSide::not_issuing;
      touched = true;
    }
    if (v.redeem_side == RedeemSide::not_redeeming && now > v.poi_expiry) {
      v.redeem_side = RedeemSide::redeem_start;
      touched = true;
    }
    if (touched) changed.push_back(id);
  }
  return changed;
}

void VaultRegistry::add_collateral(VaultId id, Amount amount) { at(id).collateral += amount; }

Amount VaultRegistry::total_collateral() const {
  Amount total;
  for (const auto& [id, v] : vaults_) total += v.collateral;
  return total;
}

std::string VaultRegistry::public_view() const {
  std::ostringstream out;
  for (const auto& [id, v] : vaults_) {
    out << "vault=" << raw(id) << " owner=" << raw(v.owner) << " address=" << to_hex(v.address.pk_d).substr(0, 16)
        << " collateral=" << v.collateral.units() << " issue=" << to_string(v.issue_side)
        << " redeem=" << to_string(v.redeem_side) << " xr_cap=" << to_string(v.xr_cap) << "\n";
  }
  return out.str();
}

Amount VaultRegistry::obligations(VaultId id) const { return private_.at(id).obligations; }
const std::vector<HistoryEntry>& VaultRegistry::history(VaultId id) const { return private_.at(id).history; }

}  // namespace zclaim
