#include "zclaim/sim/privacy.hpp"

#include <fstream>
#include <set>

namespace zclaim::sim {

using split::Rational;

ScenarioConfig split_scenario(const split::SplitConfig& cfg, const std::vector<std::uint64_t>& assignment) {
  const Amount largest{kPieceUnit.units() << cfg.m};
  ScenarioConfig s;
  s.name = "split-h" + std::to_string(cfg.h) + "-k" + std::to_string(cfg.k);
  s.horizon = s.params.finality_depth + 30;
  s.params.registry.v_max = std::max(Amount::coins(1), largest);
  s.rates[0] = Ratio{1, 1};

  UserSpec user;
  user.name = "user";
  user.i_balance = Amount::coins(assignment.size() + 1);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    // One note per piece so all locks can be in flight at once.
    user.zec.push_back(largest + Amount::coins(1));
  }
  s.users.push_back(user);

  for (std::size_t i = 0; i < assignment.size(); ++i) {
    VaultSpec v;
    v.name = "v" + std::to_string(i);
    v.collateral = s.params.registry.v_max + s.params.registry.v_max;
    s.vaults.push_back(v);

    IssueSpec issue;
    issue.label = "piece" + std::to_string(i);
    issue.user = user.name;
    issue.vault = v.name;
    issue.at = 2;
    issue.amount = Amount{assignment[i] * kPieceUnit.units()};
    s.issues.push_back(issue);
  }
  s.expect["issues_completed"] = std::to_string(assignment.size());
  s.expect["invariant_failures"] = "0";
  return s;
}

bool PrivacyResult::views_ok() const {
  if (total_visible || views.size() != assignment.size()) return false;
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (views[i].pieces.size() != 1 || views[i].pieces[0] != assignment[i]) return false;
  }
  return true;
}

bool PrivacyResult::inference_ok() const {
  for (const auto& v : views) {
    if (!v.ratio_matches) return false;
  }
  return !views.empty();
}

std::string PrivacyResult::views_csv() const {
  std::string out = "vault,pieces_seen,piece,piece_index,candidate_scales,ratio_at_total,ratio_matches\n";
  for (const auto& v : views) {
    out += v.vault + ',' + std::to_string(v.pieces.size()) + ',';
    if (v.pieces.size() == 1) {
      out += std::to_string(v.pieces[0]) + ',' + std::to_string(split::size_index(v.pieces[0]));
    } else {
      out += "-,-";
    }
    out += ',' + std::to_string(v.candidate_scales) + ',' + split::to_string(v.ratio_at_total) + ',' +
           (v.ratio_matches ? "true" : "false") + '\n';
  }
  return out;
}

PrivacyResult run_privacy_analysis(const PrivacyOptions& opts) {
  if (opts.h > kMaxPrivacyH) {
    throw PrivacyRefused("h = " + std::to_string(opts.h) + " is too large: the exact tables have 2^h rows; use h <= " +
                         std::to_string(kMaxPrivacyH) + " (check-bounds takes the same limit)");
  }
  PrivacyResult res;
  res.cfg = split::make_config(opts.h, opts.k);
  const auto& cfg = res.cfg;
  const split::SplitModel model(cfg);
  res.bounds = split::check_bounds(model);

  Rng rng(opts.seed);
  res.total = opts.total.value_or(600 <= cfg.max_total() ? 600 : split::sample_prior(cfg.h, rng));
  if (res.total == 0 || res.total > cfg.max_total()) {
    throw std::invalid_argument("total must be in [1, 2^h - 1]");
  }
  res.split = split::split(res.total, cfg, rng);
  res.assignment = res.split.pieces;
  // Vault order must not reveal which piece is which.
  for (std::size_t i = res.assignment.size(); i > 1; --i) {
    std::swap(res.assignment[i - 1], res.assignment[uniform_int(rng, 0, i - 1)]);
  }

  ScenarioConfig scenario = split_scenario(cfg, res.assignment);
  scenario.seed = opts.seed;
  res.e2e = run_scenario(scenario);
  const std::string total_units = std::to_string(res.total * kPieceUnit.units());
  res.total_visible = res.e2e.public_log.find(total_units) != std::string::npos;

  // Each vault's inference, recomputed from per-total enumeration rather
  // than from the model's tables.
  const std::size_t n = cfg.indices();
  split::PieceDistribution marginal(n, Rational(0));
  for (std::uint64_t t = 1; t <= cfg.max_total(); ++t) {
    const auto cond = split::exact_conditional_expectation(t, cfg);
    const Rational prior = split::prior_pmf(cfg.h, t);
    for (std::size_t j = 0; j < n; ++j) marginal[j] += prior * cond[j];
  }

  for (std::size_t i = 0; i < res.assignment.size(); ++i) {
    VaultView view;
    view.vault = "v" + std::to_string(i);
    for (const auto& a : res.e2e.vault_received["v" + std::to_string(i)]) {
      view.pieces.push_back(a.units() / kPieceUnit.units());
    }
    res.views.push_back(std::move(view));
  }

  std::vector<std::set<unsigned>> scales(res.views.size());
  std::vector<bool> matches(res.views.size(), true);
  res.inference_csv = "vault,piece,t,ratio\n";
  res.distribution_csv = "t,j,expectation_num,expectation_den\n";
  for (std::uint64_t t = 1; t <= cfg.max_total(); ++t) {
    const auto cond = split::exact_conditional_expectation(t, cfg);
    for (std::size_t j = 0; j < n; ++j) {
      if (cond[j] == 0) continue;
      res.distribution_csv += std::to_string(t) + ',' + std::to_string(j) + ',' + cond[j].get_num().get_str() + ',' +
                              cond[j].get_den().get_str() + '\n';
    }
    for (std::size_t v = 0; v < res.views.size(); ++v) {
      auto& view = res.views[v];
      if (view.pieces.size() != 1) continue;
      const std::size_t j = split::size_index(view.pieces[0]);
      const Rational independent = cond[j] / marginal[j];
      const Rational from_model = model.posterior_ratio(t, view.pieces[0]);
      if (independent != from_model) matches[v] = false;
      if (t == res.total) view.ratio_at_total = independent;
      if (independent == 0) continue;
      scales[v].insert(split::floor_log2(t));
      res.inference_csv += view.vault + ',' + std::to_string(view.pieces[0]) + ',' + std::to_string(t) + ',' +
                           split::to_string(independent) + '\n';
    }
  }
  for (std::size_t v = 0; v < res.views.size(); ++v) {
    res.views[v].candidate_scales = scales[v].size();
    res.views[v].ratio_matches = res.views[v].pieces.size() == 1 && matches[v];
  }
  return res;
}

void write_privacy_outputs(const PrivacyResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << body;
  };
  put("bounds_report.csv", result.bounds.to_csv());
  put("distribution.csv", result.distribution_csv);
  put("views.csv", result.views_csv());
  put("inference.csv", result.inference_csv);
  std::string split_csv = "total,withheld,assignment\n" + std::to_string(result.total) + ',' +
                          std::to_string(result.split.withheld) + ',';
  for (std::size_t i = 0; i < result.assignment.size(); ++i) {
    split_csv += (i ? " " : "") + std::to_string(result.assignment[i]);
  }
  put("split.csv", split_csv + '\n');
  write_outputs(result.e2e, dir / "e2e");
}

}  // namespace zclaim::sim
