#pragma once

// Privacy analysis: exhaustive bound checks for one (h, k) plus an end-to-end
// run in which a single user splits a total across k vaults.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zclaim/sim/scenario.hpp"
#include "zclaim/splitting.hpp"

namespace zclaim::sim {

/// Largest h the analysis accepts; the exact tables grow as 2^h.
inline constexpr unsigned kMaxPrivacyH = 16;

class PrivacyRefused : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct PrivacyOptions {
  unsigned h = 10;
  unsigned k = 8;
  /// Total to split end to end, in piece units. Defaults to 600 when it fits
  /// under 2^h, otherwise to a draw from the prior.
  std::optional<std::uint64_t> total;
  std::uint64_t seed = 1;
};

/// Value of one piece unit on Zcash.
inline constexpr Amount kPieceUnit{kCoin / 100};

/// What one vault holds after the end-to-end run.
struct VaultView {
  std::string vault;
  std::vector<std::uint64_t> pieces;  // lock notes it decrypted, in piece units
  /// Distinct floor(log2 t) classes the vault cannot rule out.
  std::size_t candidate_scales = 0;
  /// The vault's exact posterior ratio for the true total, recomputed
  /// independently of the splitting model.
  split::Rational ratio_at_total;
  bool ratio_matches = false;
};

struct PrivacyResult {
  split::SplitConfig cfg;
  split::BoundsReport bounds;
  std::uint64_t total = 0;
  split::SplitResult split;
  std::vector<std::uint64_t> assignment;  // piece per vault, in vault order
  ScenarioResult e2e;
  std::vector<VaultView> views;
  /// The public log mentions the total (it must not).
  bool total_visible = false;
  std::string distribution_csv;
  std::string inference_csv;

  [[nodiscard]] bool views_ok() const;
  [[nodiscard]] bool inference_ok() const;
  [[nodiscard]] bool ok() const { return bounds.primary_pass() && e2e.ok() && views_ok() && inference_ok(); }
  [[nodiscard]] std::string views_csv() const;
};

/// Throws PrivacyRefused when h > kMaxPrivacyH, std::invalid_argument for an
/// unusable (h, k).
PrivacyResult run_privacy_analysis(const PrivacyOptions& opts);

/// bounds_report.csv, distribution.csv, views.csv, inference.csv and the
/// end-to-end scenario files under e2e/.
void write_privacy_outputs(const PrivacyResult& result, const std::filesystem::path& dir);

/// The end-to-end scenario: one user, k vaults, one Issue per piece.
ScenarioConfig split_scenario(const split::SplitConfig& cfg, const std::vector<std::uint64_t>& assignment);

}  // namespace zclaim::sim
