#pragma once

// Amount splitting for privacy: a scale-free prior on totals, the two
// splitting procedures, and exact Bayesian analysis of what one vault learns
// from the single piece it receives.
//
// Index convention for piece tables: index 0 is the empty piece and index
// j >= 1 is a piece of size 2^(j-1), so a table for exponent bound m has
// m + 2 entries.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zclaim/rng.hpp"

namespace zclaim::split {

using Rational = mpq_class;

struct SplitConfig {
  unsigned h = 0;
  unsigned k = 0;
  unsigned log2k = 0;
  /// Largest piece exponent: m = h + 1 - log2 k.
  unsigned m = 0;

  [[nodiscard]] std::uint64_t max_total() const { return (std::uint64_t{1} << h) - 1; }
  [[nodiscard]] std::size_t indices() const { return m + 2; }
};

/// Throws std::invalid_argument unless k is a power of two >= 2, m >= 1,
/// m >= k/2 (every branch then has e >= 1) and h <= 40.
SplitConfig make_config(unsigned h, unsigned k);

struct SplitResult {
  std::vector<std::uint64_t> pieces;  // exactly k entries
  std::uint64_t withheld = 0;
};

enum class Branch { small, gap, large };
const char* to_string(Branch b);

/// Everything about split(t) that does not depend on the random draw i.
struct SplitPlan {
  Branch branch = Branch::small;
  std::uint64_t e = 1;
  std::uint64_t full_pieces = 0;  // d pieces of size 2^m
  std::uint64_t withheld = 0;
  /// Amount divided into i*e and (remainder - i*e).
  std::uint64_t remainder = 0;
  /// Number of equiprobable values of i, drawn from [0, draws - 1].
  std::uint64_t draws = 1;
};

SplitPlan plan(std::uint64_t t, const SplitConfig& cfg);
/// The split for a fixed draw i in [0, plan(t).draws - 1].
SplitResult split_with(std::uint64_t t, const SplitConfig& cfg, std::uint64_t i);
SplitResult split(std::uint64_t t, const SplitConfig& cfg, Rng& rng);

/// 0 -> 0, 2^(j-1) -> j. Throws for anything that is not zero or a power of two.
std::size_t size_index(std::uint64_t v);
std::uint64_t index_size(std::size_t j);
unsigned floor_log2(std::uint64_t v);

/// Pr[T = t] = (1/h) * 2^-floor(log2 t), for N uniform on [0, h-1].
Rational prior_pmf(unsigned h, std::uint64_t t);
std::uint64_t sample_prior(unsigned h, Rng& rng);

/// Table indexed 0..m+1 (see the index convention above).
using PieceDistribution = std::vector<Rational>;

/// Exact E[X_j | T = t] by enumerating every draw of i.
PieceDistribution exact_conditional_expectation(std::uint64_t t, const SplitConfig& cfg);

/// Conditional and marginal piece tables for a whole configuration. Counts
/// are kept as integers; rationals are formed on demand.
class SplitModel {
public:
  explicit SplitModel(const SplitConfig& cfg);

  [[nodiscard]] const SplitConfig& config() const { return cfg_; }
  /// E[X_j | T = t] as count/draws.
  [[nodiscard]] Rational conditional(std::uint64_t t, std::size_t j) const;
  [[nodiscard]] bool possible(std::uint64_t t, std::size_t j) const { return count(t, j) != 0; }
  [[nodiscard]] const PieceDistribution& marginal() const { return marginal_; }
  /// Pr[T=t | V=v] / Pr[T=t] = E[X_j | T=t] / E[X_j]. Throws
  /// std::domain_error when v never occurs under this configuration.
  [[nodiscard]] Rational posterior_ratio(std::uint64_t t, std::uint64_t v) const;
  [[nodiscard]] Rational posterior(std::uint64_t t, std::uint64_t v) const;

private:
  [[nodiscard]] std::uint64_t count(std::uint64_t t, std::size_t j) const { return counts_[t * cfg_.indices() + j]; }

  SplitConfig cfg_;
  std::vector<std::uint64_t> counts_;  // [t][j]: pieces of index j summed over all draws
  std::vector<std::uint64_t> draws_;   // [t]
  PieceDistribution marginal_;
};

PieceDistribution marginal_expectation(const SplitConfig& cfg);
Rational posterior_ratio(std::uint64_t t, std::uint64_t v, const SplitConfig& cfg);

// ---------------------------------------------------------------------------
// Bound checks

struct Lemma1Clauses {
  bool i = false;
  bool ii = false;
  bool iii = false;
  [[nodiscard]] bool all() const { return i && ii && iii; }
};

struct Lemma1Report {
  unsigned c = 0;
  std::uint64_t a = 0;
  /// Bits numbered from 0 (Y_0 is the least significant bit).
  Lemma1Clauses zero_based;
  /// Bits numbered from 1 (Y_1 is the least significant bit).
  Lemma1Clauses one_based;
  /// Pr[bit b = 1] for b = 0..c+1, as ones/(2^c + a + 1).
  std::vector<std::uint64_t> ones;
  std::uint64_t draws = 0;
};

/// Enumerates i uniform on [0, 2^c + a].
Lemma1Report check_lemma1(unsigned c, std::uint64_t a);

/// Every (c, a) with c <= max_c, enumerated incrementally in a; calls
/// `visit` for each report.
template <class Visit>
void sweep_lemma1(unsigned max_c, Visit&& visit);

struct BoundRow {
  std::string claim;
  int param_j = 0;
  std::optional<std::uint64_t> param_t;
  Rational lhs;
  /// Absent when the bound is vacuous (infinite).
  std::optional<Rational> rhs;
  bool pass = true;
  /// Rows under the adopted reading decide the verdict; the others are
  /// reported for comparison.
  bool primary = true;
  std::uint64_t cases = 0;
};

struct BoundsReport {
  SplitConfig cfg;
  std::vector<BoundRow> rows;
  [[nodiscard]] bool primary_pass() const;
  [[nodiscard]] std::string to_csv() const;
};

/// Lemma 2, Lemma 3, the Theorem's ratio bounds and the anonymity floor,
/// each reduced to its worst case over t (one row per claim and index).
BoundsReport check_bounds(const SplitConfig& cfg);
BoundsReport check_bounds(const SplitModel& model);

std::string to_string(const Rational& r);

// ---------------------------------------------------------------------------

template <class Visit>
void sweep_lemma1(unsigned max_c, Visit&& visit) {
  for (unsigned c = 0; c <= max_c; ++c) {
    // Start from i in [0, 2^c] and add one value of i per step of a.
    Lemma1Report r;
    r.c = c;
    r.ones.assign(c + 2, 0);
    const std::uint64_t base = std::uint64_t{1} << c;
    for (std::uint64_t i = 0; i <= base; ++i) {
      for (unsigned b = 0; b < c + 2; ++b) r.ones[b] += (i >> b) & 1U;
    }
    for (std::uint64_t a = 0; a < base; ++a) {
      if (a > 0) {
        const std::uint64_t i = base + a;
        for (unsigned b = 0; b < c + 2; ++b) r.ones[b] += (i >> b) & 1U;
      }
      r.a = a;
      r.draws = base + a + 1;
      const auto n = r.draws;
      auto within = [&](unsigned b) { return 4 * r.ones[b] >= n && 4 * r.ones[b] <= 3 * n; };
      std::uint64_t total = 0;
      for (auto o : r.ones) total += o;
      // c/4 <= total/n <= (3c+2)/4
      r.zero_based.iii = c * n <= 4 * total && 4 * total <= (3 * c + 2) * n;
      r.one_based.iii = r.zero_based.iii;
      r.zero_based.i = true;
      for (unsigned b = 0; b <= c; ++b) r.zero_based.i = r.zero_based.i && within(b);
      r.zero_based.ii = 2 * r.ones[c + 1] <= n;
      r.one_based.i = true;
      for (unsigned b = 0; b < c; ++b) r.one_based.i = r.one_based.i && within(b);
      r.one_based.ii = 2 * r.ones[c] <= n;
      visit(static_cast<const Lemma1Report&>(r));
    }
  }
}

}  // namespace zclaim::split
