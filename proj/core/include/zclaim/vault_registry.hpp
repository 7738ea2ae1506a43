#pragma once

// Vault registry: public collateral and availability flags, plus a separate
// private store for each vault's ZEC obligations and request history. The
// private store stands in for the witness side of the vault's proofs and is
// never reachable from the public serialization.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zclaim/crypto.hpp"
#include "zclaim/result.hpp"

namespace zclaim {

class IssuingChain;

struct RegistryParams {
  Amount v_max = Amount::coins(100);
  Ratio fee{2, 100};
  Ratio sigma_std{3, 2};
  Amount i_w = Amount::coins(1);
  Tick poc_validity = 100;
  Tick pob_period = 100;
  Ratio liq_margin{1, 10};
};

/// Throws std::invalid_argument unless 0 <= f < 1, sigma_std >= 1, margin >= 0.
void validate(const RegistryParams& params);

/// Eq. (1) on free collateral, by exact cross-multiplication:
/// collateral - obligations*sigma*xr >= v_max*(1-f)*sigma*xr.
bool satisfies_capacity(Amount collateral, Amount obligations, const RegistryParams& params, Ratio xr);
/// collateral >= obligations*sigma*xr.
bool satisfies_balance(Amount collateral, Amount obligations, Ratio sigma, Ratio xr);

enum class IssueSide { registered, issue_start, not_issuing };
enum class RedeemSide { redeem_start, not_redeeming };

const char* to_string(IssueSide s);
const char* to_string(RedeemSide s);

struct VaultRecord {
  VaultId id{};
  ActorId owner{};
  Address address;
  Amount collateral;
  IssueSide issue_side = IssueSide::registered;
  RedeemSide redeem_side = RedeemSide::redeem_start;
  Ratio xr_cap{};
  Ratio last_statement_rate{};
  Tick last_statement_tick = 0;
  Tick poc_expiry = 0;
  Tick poi_expiry = 0;
  bool has_statement = false;
  std::optional<RequestId> active_issue;
  std::optional<RequestId> active_redeem;

  [[nodiscard]] bool issue_available(Tick now) const {
    return issue_side == IssueSide::issue_start && now <= poc_expiry;
  }
  [[nodiscard]] bool redeem_exempt(Tick now) const {
    return redeem_side == RedeemSide::not_redeeming && now <= poi_expiry;
  }
};

struct HistoryEntry {
  enum class Kind { issue, redeem, liquidation };
  RequestId request{};
  Kind kind = Kind::issue;
  Amount amount;
  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

/// Obligations implied by a history: issues add, redeems and liquidations
/// subtract (saturating).
Amount replay_history(const std::vector<HistoryEntry>& history);

struct Liquidation {
  Amount collateral_seized;
  Amount obligations_covered;
};

class VaultRegistry {
public:
  explicit VaultRegistry(RegistryParams params = {});

  Result<VaultId> register_vault(ActorId owner, Amount collateral, const Address& address, Tick now);

  /// `claimed_obligations` is the proof's witness; the simulated verifier
  /// checks it against the private store.
  Status submit_poc(VaultId id, Amount claimed_obligations, Ratio xr, Tick now);
  Status submit_pob(VaultId id, const std::vector<HistoryEntry>& witness, Ratio xr, Tick now);
  Status submit_poi(VaultId id, Amount claimed_obligations, Tick now);

  /// Partial liquidation when the vault's last statement is older than
  /// pob_period and the rate has moved by more than liq_margin since. The
  /// seized collateral covers obligations at `xr` so that afterwards
  /// collateral >= obligations * sigma * xr holds again.
  std::optional<Liquidation> check_liquidation(VaultId id, Ratio xr, Tick now);

  enum class WarrantySource { vault_collateral, locked_warranty };
  /// Moves `amount` to `to`'s balance on the issuing chain, either out of a
  /// vault's collateral or out of the warranty locked for `request`.
  void slash_warranty(IssuingChain& chain, WarrantySource source, VaultId vault, RequestId request, Amount amount,
                      ActorId to);

  // Bookkeeping driven by the protocol.
  void record_issue(VaultId id, RequestId request, Amount wzec_created);
  void record_redeem(VaultId id, RequestId request, Amount wzec_burnt);
  void set_active_issue(VaultId id, std::optional<RequestId> request);
  void set_active_redeem(VaultId id, std::optional<RequestId> request);
  /// Clears availability flags whose proof windows have lapsed; returns the
  /// vaults whose state changed.
  std::vector<VaultId> expire(Tick now);
  void add_collateral(VaultId id, Amount amount);

  [[nodiscard]] const VaultRecord* find(VaultId id) const;
  [[nodiscard]] const std::map<VaultId, VaultRecord>& vaults() const { return vaults_; }
  [[nodiscard]] const RegistryParams& params() const { return params_; }
  [[nodiscard]] Amount total_collateral() const;

  /// Public registry state, one line per vault. Contains no witness data.
  [[nodiscard]] std::string public_view() const;

  // Witness-side accessors (the vault's own knowledge).
  [[nodiscard]] Amount obligations(VaultId id) const;
  [[nodiscard]] const std::vector<HistoryEntry>& history(VaultId id) const;

private:
  struct Private {
    Amount obligations;
    std::vector<HistoryEntry> history;
  };

  VaultRecord& at(VaultId id);
  void note_statement(VaultRecord& v, Ratio xr, Tick now);

  RegistryParams params_;
  std::map<VaultId, VaultRecord> vaults_;
  std::map<VaultId, Private> private_;
  std::uint32_t next_id_ = 1;
};

}  // namespace zclaim
