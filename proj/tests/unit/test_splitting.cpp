#include <gtest/gtest.h>

#include <array>
#include <map>

#include "split_oracle.hpp"
#include "zclaim/splitting.hpp"

namespace zclaim::split {
namespace {

using test::ref_conditional;
using test::ref_draws;
using test::ref_prior;
using test::ref_split;

std::vector<std::uint64_t> sorted_desc(std::vector<std::uint64_t> v) {
  std::sort(v.rbegin(), v.rend());
  return v;
}

struct HK {
  unsigned h, k;
};

class SplitAgainstReference : public ::testing::TestWithParam<HK> {};

TEST_P(SplitAgainstReference, EveryTotalAndDraw) {
  const auto [h, k] = GetParam();
  const auto cfg = make_config(h, k);
  ASSERT_EQ(cfg.m, h + 1 - test::ref_log2(k));
  for (std::uint64_t t = 1; t <= cfg.max_total(); ++t) {
    const auto p = plan(t, cfg);
    ASSERT_EQ(p.draws, ref_draws(t, h, k)) << "t=" << t;
    for (std::uint64_t i = 0; i < p.draws; ++i) {
      const auto got = split_with(t, cfg, i);
      const auto want = ref_split(t, h, k, i);
      ASSERT_EQ(sorted_desc(got.pieces), want.pieces) << "t=" << t << " i=" << i;
      ASSERT_EQ(got.withheld, want.withheld) << "t=" << t;

      // Structural laws, checked on the library output directly.
      ASSERT_EQ(got.pieces.size(), k);
      std::uint64_t sum = got.withheld;
      for (const auto piece : got.pieces) {
        ASSERT_TRUE(piece == 0 || ((piece & (piece - 1)) == 0 && piece <= (std::uint64_t{1} << cfg.m)));
        sum += piece;
      }
      ASSERT_EQ(sum, t);
      ASSERT_LT(got.withheld, want.e);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Configs, SplitAgainstReference, ::testing::Values(HK{7, 4}, HK{8, 4}, HK{10, 8}));

TEST(Split, HandExecutedExamples) {
  const auto c74 = make_config(7, 4);
  EXPECT_EQ(c74.m, 6U);
  for (std::uint64_t i = 0; i < plan(1, c74).draws; ++i) {
    const auto r = split_with(1, c74, i);
    EXPECT_EQ(sorted_desc(r.pieces), (std::vector<std::uint64_t>{1, 0, 0, 0}));
    EXPECT_EQ(r.withheld, 0U);
  }
  const auto p5 = plan(5, c74);
  EXPECT_EQ(p5.e, 2U);
  EXPECT_EQ(p5.withheld, 1U);
  const auto r5 = split_with(5, c74, 1);
  EXPECT_EQ(sorted_desc(r5.pieces), (std::vector<std::uint64_t>{2, 2, 0, 0}));
  EXPECT_EQ(r5.withheld, 1U);

  const auto c108 = make_config(10, 8);
  EXPECT_EQ(c108.m, 8U);
  const auto p600 = plan(600, c108);
  EXPECT_EQ(p600.full_pieces, 1U);
  EXPECT_EQ(p600.e, 32U);
  EXPECT_EQ(p600.withheld, 24U);
  const auto r600 = split_with(600, c108, 3);
  EXPECT_EQ(sorted_desc(r600.pieces), (std::vector<std::uint64_t>{256, 128, 64, 64, 32, 32, 0, 0}));
  EXPECT_EQ(r600.withheld, 24U);
}

TEST(Split, RejectsBadConfigAndTotals) {
  EXPECT_THROW(make_config(8, 3), std::invalid_argument);
  EXPECT_THROW(make_config(8, 1), std::invalid_argument);
  EXPECT_THROW(make_config(3, 16), std::invalid_argument);
  const auto cfg = make_config(7, 4);
  EXPECT_THROW(plan(0, cfg), std::out_of_range);
  EXPECT_THROW(plan(128, cfg), std::out_of_range);
  EXPECT_THROW(split_with(5, cfg, plan(5, cfg).draws), std::out_of_range);
}

TEST(Split, SizeIndexConvention) {
  EXPECT_EQ(size_index(0), 0U);
  EXPECT_EQ(size_index(1), 1U);
  EXPECT_EQ(size_index(256), 9U);
  EXPECT_THROW(size_index(6), std::invalid_argument);
  for (std::size_t j = 0; j < 20; ++j) EXPECT_EQ(size_index(index_size(j)), j);
  EXPECT_EQ(floor_log2(1), 0U);
  EXPECT_EQ(floor_log2(600), 9U);
}

TEST(Prior, ExactValues) {
  EXPECT_EQ(prior_pmf(10, 1), Rational(1, 10));
  EXPECT_EQ(prior_pmf(10, 5), Rational(1, 40));
  for (const unsigned h : {1U, 4U, 10U}) {
    Rational sum = 0;
    for (std::uint64_t t = 1; t < (std::uint64_t{1} << h); ++t) {
      EXPECT_EQ(prior_pmf(h, t), ref_prior(h, t));
      sum += prior_pmf(h, t);
    }
    EXPECT_EQ(sum, 1) << "h=" << h;
  }
  EXPECT_THROW(prior_pmf(4, 0), std::out_of_range);
  EXPECT_THROW(prior_pmf(4, 16), std::out_of_range);
}

TEST(Prior, SamplerMatchesPmf) {
  Rng rng(11);
  for (int n = 0; n < 1000; ++n) EXPECT_EQ(sample_prior(1, rng), 1U);

  // h = 4: each band [2^n, 2^(n+1) - 1] has probability 1/4; chi-square over
  // the 15 individual totals with 14 degrees of freedom.
  constexpr int kDraws = 1'000'000;
  std::map<std::uint64_t, int> freq;
  for (int n = 0; n < kDraws; ++n) ++freq[sample_prior(4, rng)];
  std::array<int, 4> bands{};
  double chi2 = 0;
  for (std::uint64_t t = 1; t < 16; ++t) {
    bands[floor_log2(t)] += freq[t];
    const double expected = kDraws * prior_pmf(4, t).get_d();
    chi2 += (freq[t] - expected) * (freq[t] - expected) / expected;
  }
  for (const int b : bands) EXPECT_NEAR(static_cast<double>(b) / kDraws, 0.25, 0.005);
  EXPECT_LT(chi2, 36.1);  // p = 0.001 at 14 dof

  Rng a(5), b(5);
  for (int n = 0; n < 100; ++n) EXPECT_EQ(sample_prior(10, a), sample_prior(10, b));
}

TEST(Conditional, MatchesEnumeration) {
  for (const auto [h, k] : {HK{7, 4}, HK{10, 8}}) {
    const auto cfg = make_config(h, k);
    const SplitModel model(cfg);
    for (std::uint64_t t = 1; t <= cfg.max_total(); ++t) {
      const auto want = ref_conditional(t, h, k);
      const auto got = exact_conditional_expectation(t, cfg);
      ASSERT_EQ(got.size(), cfg.indices());
      Rational row = 0;
      for (std::size_t j = 0; j < cfg.indices(); ++j) {
        ASSERT_EQ(got[j], want[j]) << "t=" << t << " j=" << j;
        ASSERT_EQ(model.conditional(t, j), want[j]);
        row += got[j];
      }
      ASSERT_EQ(row, Rational(k));
    }
    const auto one = exact_conditional_expectation(1, cfg);
    EXPECT_EQ(one[1], 1);
    EXPECT_EQ(one[0], Rational(k - 1));
  }
}

TEST(Marginal, MatchesPriorWeightedSumAndLowerBounds) {
  const unsigned h = 10, k = 8;
  const auto cfg = make_config(h, k);
  std::vector<Rational> want(cfg.indices(), Rational(0));
  for (std::uint64_t t = 1; t <= cfg.max_total(); ++t) {
    const auto cond = ref_conditional(t, h, k);
    for (std::size_t j = 0; j < want.size(); ++j) want[j] += ref_prior(h, t) * cond[j];
  }
  const auto got = marginal_expectation(cfg);
  Rational sum = 0;
  for (std::size_t j = 0; j < want.size(); ++j) {
    EXPECT_EQ(got[j], want[j]) << "j=" << j;
    sum += got[j];
  }
  EXPECT_EQ(sum, Rational(k));
  EXPECT_GE(got[0], Rational(1));
  for (unsigned j = 1; j <= cfg.m - k / 2; ++j) EXPECT_GE(got[j], Rational(1, 5)) << "j=" << j;
}

TEST(Posterior, RatioProperties) {
  const auto cfg = make_config(10, 8);
  const SplitModel model(cfg);
  for (std::uint64_t t = 1; t <= cfg.max_total(); ++t) {
    for (std::size_t j = 1; j < cfg.indices(); ++j) {
      const auto v = index_size(j);
      if (v > t) {
        ASSERT_EQ(model.posterior_ratio(t, v), 0) << t << " " << v;
      }
    }
    ASSERT_LE(model.posterior_ratio(t, 0), 8);
  }
  EXPECT_EQ(posterior_ratio(600, 256, cfg), model.posterior_ratio(600, 256));
  EXPECT_THROW((void)model.posterior_ratio(5, 3), std::invalid_argument);

  // Bayes consistency: sum_t Pr[T=t | V=v] = 1.
  for (std::size_t j = 0; j < cfg.indices(); ++j) {
    Rational sum = 0;
    for (std::uint64_t t = 1; t <= cfg.max_total(); ++t) sum += model.posterior(t, index_size(j));
    EXPECT_EQ(sum, 1) << "j=" << j;
  }
}

// Lemma 1 by direct enumeration, one (c, a) at a time.
struct DirectLemma1 {
  bool zero_i = true, zero_ii, one_i = true, one_ii, iii;
};

DirectLemma1 direct_lemma1(unsigned c, std::uint64_t a) {
  const std::uint64_t n = (std::uint64_t{1} << c) + a + 1;
  std::vector<std::uint64_t> ones(c + 2, 0);
  std::uint64_t total = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    for (unsigned b = 0; b < c + 2; ++b) ones[b] += (i >> b) & 1U;
    total += static_cast<std::uint64_t>(__builtin_popcountll(i));
  }
  auto pr = [&](unsigned b) { return Rational(mpz_class(std::to_string(ones[b])), mpz_class(std::to_string(n))); };
  DirectLemma1 d;
  for (unsigned b = 0; b <= c; ++b) d.zero_i = d.zero_i && pr(b) >= Rational(1, 4) && pr(b) <= Rational(3, 4);
  d.zero_ii = pr(c + 1) <= Rational(1, 2);
  for (unsigned b = 0; b < c; ++b) d.one_i = d.one_i && pr(b) >= Rational(1, 4) && pr(b) <= Rational(3, 4);
  d.one_ii = pr(c) <= Rational(1, 2);
  const Rational mean(mpz_class(std::to_string(total)), mpz_class(std::to_string(n)));
  d.iii = mean >= Rational(c, 4) && mean <= Rational(3 * c + 2, 4);
  return d;
}

Rational ratio_of(std::uint64_t num, std::uint64_t den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

TEST(Lemma1, SmallExamples) {
  const auto r = check_lemma1(2, 1);
  EXPECT_EQ(r.draws, 6U);
  EXPECT_EQ(ratio_of(r.ones[0], r.draws), Rational(1, 2));
  ASSERT_GE(r.ones.size(), 4U);
  EXPECT_EQ(r.ones[3], 0U);

  // Bits numbered from 0: bit 2 of i in [0, 4] is set only for i = 4.
  const auto z = check_lemma1(2, 0);
  EXPECT_EQ(ratio_of(z.ones[2], z.draws), Rational(1, 5));
  EXPECT_FALSE(z.zero_based.i);
  EXPECT_TRUE(z.one_based.all());
}

TEST(Lemma1, SweepMatchesDirectEnumeration) {
  std::uint64_t visited = 0, zero_failures = 0;
  sweep_lemma1(12, [&](const Lemma1Report& r) {
    ++visited;
    if (r.c <= 9 || r.a % 97 == 0) {
      const auto d = direct_lemma1(r.c, r.a);
      ASSERT_EQ(r.zero_based.i, d.zero_i) << r.c << "," << r.a;
      ASSERT_EQ(r.zero_based.ii, d.zero_ii) << r.c << "," << r.a;
      ASSERT_EQ(r.one_based.i, d.one_i) << r.c << "," << r.a;
      ASSERT_EQ(r.one_based.ii, d.one_ii) << r.c << "," << r.a;
      ASSERT_EQ(r.one_based.iii, d.iii) << r.c << "," << r.a;
      const auto single = check_lemma1(r.c, r.a);
      ASSERT_EQ(single.ones, r.ones);
    }
    EXPECT_TRUE(r.one_based.all()) << r.c << "," << r.a;
    if (!r.zero_based.all()) ++zero_failures;
  });
  EXPECT_EQ(visited, (std::uint64_t{1} << 13) - 1);
  EXPECT_GT(zero_failures, 0U);
}

TEST(Bounds, AdoptedReadingPasses) {
  for (const auto [h, k] : {HK{8, 4}, HK{10, 8}}) {
    const auto report = check_bounds(make_config(h, k));
    EXPECT_TRUE(report.primary_pass()) << report.to_csv();
    for (const auto& row : report.rows) {
      if (row.claim.rfind("anonymity_floor[index=j]", 0) == 0) {
        EXPECT_GE(row.lhs, Rational(test::ref_log2(k)));
      }
    }
    const auto csv = report.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')).rfind("claim,param_j,param_t,lhs,rhs,pass", 0), 0U);
  }
}

TEST(Bounds, Lemma2FirstClauseAgainstReference) {
  const unsigned h = 10, k = 8;
  const auto cfg = make_config(h, k);
  Rational worst = 0;
  for (std::uint64_t t = 1; t <= cfg.max_total(); ++t) {
    const auto cond = ref_conditional(t, h, k);
    for (unsigned j = 1; j <= cfg.m - k / 2; ++j) worst = std::max(worst, cond[j]);
    ASSERT_LE(cond[0], Rational(k));
  }
  EXPECT_LE(worst, Rational(3, 2));
  const auto report = check_bounds(cfg);
  for (const auto& row : report.rows) {
    if (row.claim == "lemma2_i") {
      EXPECT_LE(row.lhs, worst);
    }
  }
}

}  // namespace
}  // namespace zclaim::split
