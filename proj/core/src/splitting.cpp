#include "zclaim/splitting.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>
#include <stdexcept>

namespace zclaim::split {

namespace {

Rational rat(std::uint64_t num, std::uint64_t den = 1) {
  Rational r(mpz_class(std::to_string(num)), mpz_class(std::to_string(den)));
  r.canonicalize();
  return r;
}

Rational frac(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

void expand(std::uint64_t x, std::vector<std::uint64_t>& out) {
  for (unsigned b = 0; x != 0; ++b, x >>= 1) {
    if (x & 1U) out.push_back(std::uint64_t{1} << b);
  }
}

}  // namespace

std::string to_string(const Rational& r) { return r.get_str(); }

const char* to_string(Branch b) {
  switch (b) {
    case Branch::small: return "small";
    case Branch::gap: return "gap";
    case Branch::large: return "large";
  }
  return "?";
}

SplitConfig make_config(unsigned h, unsigned k) {
  if (k < 2 || !std::has_single_bit(k)) throw std::invalid_argument("k must be a power of two >= 2");
  if (h == 0 || h > 40) throw std::invalid_argument("h must be in [1, 40]");
  SplitConfig cfg;
  cfg.h = h;
  cfg.k = k;
  cfg.log2k = static_cast<unsigned>(std::countr_zero(k));
  if (h + 1 <= cfg.log2k) throw std::invalid_argument("m = h + 1 - log2 k must be >= 1");
  cfg.m = h + 1 - cfg.log2k;
  if (cfg.m < k / 2) {
    throw std::invalid_argument("m = h + 1 - log2 k must be at least k/2 for every branch to have e >= 1");
  }
  return cfg;
}

unsigned floor_log2(std::uint64_t v) {
  if (v == 0) throw std::invalid_argument("floor_log2(0)");
  return static_cast<unsigned>(std::bit_width(v) - 1);
}

std::size_t size_index(std::uint64_t v) {
  if (v == 0) return 0;
  if (!std::has_single_bit(v)) throw std::invalid_argument("piece is not a power of two");
  return floor_log2(v) + 1;
}

std::uint64_t index_size(std::size_t j) { return j == 0 ? 0 : std::uint64_t{1} << (j - 1); }

SplitPlan plan(std::uint64_t t, const SplitConfig& cfg) {
  if (t == 0 || t > cfg.max_total()) throw std::out_of_range("total outside [1, 2^h - 1]");
  const std::uint64_t top = std::uint64_t{1} << cfg.m;
  SplitPlan p;
  if (t < top) {
    const int shift = static_cast<int>(floor_log2(t)) + 1 - static_cast<int>(cfg.k / 2);
    p.branch = Branch::small;
    p.e = shift > 0 ? std::uint64_t{1} << shift : 1;
    const std::uint64_t q = t / p.e;
    p.withheld = t - p.e * q;
    p.remainder = p.e * q;
    p.draws = q + 1;
    return p;
  }
  // Totals in [2^m, 2^(m+1)) fall between the two procedures; they take the
  // large-total route with no full pieces.
  p.branch = t < 2 * top ? Branch::gap : Branch::large;
  const std::uint64_t d = t / top - 1;
  const std::uint64_t c = (cfg.k - d) / 2;
  p.full_pieces = d;
  p.e = std::uint64_t{1} << (cfg.m - c);
  const std::uint64_t q = t / p.e;
  p.withheld = t - p.e * q;
  p.remainder = p.e * q - d * top;
  p.draws = q - d * (top / p.e) + 1;
  return p;
}

SplitResult split_with(std::uint64_t t, const SplitConfig& cfg, std::uint64_t i) {
  const SplitPlan p = plan(t, cfg);
  if (i >= p.draws) throw std::out_of_range("draw outside the procedure's range");
  SplitResult r;
  r.withheld = p.withheld;
  r.pieces.assign(p.full_pieces, std::uint64_t{1} << cfg.m);
  const std::uint64_t first = i * p.e;
  expand(first, r.pieces);
  expand(p.remainder - first, r.pieces);
  if (r.pieces.size() > cfg.k) throw std::logic_error("split produced more than k pieces");
  std::sort(r.pieces.begin(), r.pieces.end(), std::greater<>());
  r.pieces.resize(cfg.k, 0);
  return r;
}

SplitResult split(std::uint64_t t, const SplitConfig& cfg, Rng& rng) {
  const SplitPlan p = plan(t, cfg);
  return split_with(t, cfg, uniform_int(rng, 0, p.draws - 1));
}

Rational prior_pmf(unsigned h, std::uint64_t t) {
  if (h == 0 || h > 62) throw std::invalid_argument("h out of range");
  if (t == 0 || t >= (std::uint64_t{1} << h)) throw std::out_of_range("total outside [1, 2^h - 1]");
  return rat(1, static_cast<std::uint64_t>(h) << floor_log2(t));
}

std::uint64_t sample_prior(unsigned h, Rng& rng) {
  if (h == 0 || h > 62) throw std::invalid_argument("h out of range");
  const std::uint64_t n = uniform_int(rng, 0, h - 1);
  const std::uint64_t a = uniform_int(rng, 0, (std::uint64_t{1} << n) - 1);
  return (std::uint64_t{1} << n) + a;
}

PieceDistribution exact_conditional_expectation(std::uint64_t t, const SplitConfig& cfg) {
  const SplitPlan p = plan(t, cfg);
  std::vector<std::uint64_t> counts(cfg.indices(), 0);
  for (std::uint64_t i = 0; i < p.draws; ++i) {
    for (auto piece : split_with(t, cfg, i).pieces) ++counts[size_index(piece)];
  }
  PieceDistribution out;
  out.reserve(counts.size());
  for (auto c : counts) out.push_back(rat(c, p.draws));
  return out;
}

SplitModel::SplitModel(const SplitConfig& cfg) : cfg_(cfg) {
  const std::uint64_t n = cfg.max_total() + 1;
  const std::size_t width = cfg.indices();
  counts_.assign(n * width, 0);
  draws_.assign(n, 0);
  std::vector<std::uint64_t> pieces;
  for (std::uint64_t t = 1; t < n; ++t) {
    const SplitPlan p = plan(t, cfg);
    draws_[t] = p.draws;
    std::uint64_t* row = &counts_[t * width];
    row[cfg.m + 1] += p.full_pieces * p.draws;
    for (std::uint64_t i = 0; i < p.draws; ++i) {
      pieces.clear();
      expand(i * p.e, pieces);
      expand(p.remainder - i * p.e, pieces);
      for (auto piece : pieces) ++row[size_index(piece)];
      row[0] += cfg.k - p.full_pieces - pieces.size();
    }
  }

  // E[X_j] = sum_t (1/h) 2^-n(t) count/draws, grouped by n = floor(log2 t).
  marginal_.assign(width, Rational(0));
  for (unsigned scale = 0; scale < cfg.h; ++scale) {
    std::vector<Rational> band(width, Rational(0));
    const std::uint64_t lo = std::uint64_t{1} << scale;
    for (std::uint64_t t = lo; t < 2 * lo; ++t) {
      for (std::size_t j = 0; j < width; ++j) {
        if (count(t, j) != 0) band[j] += rat(count(t, j), draws_[t]);
      }
    }
    for (std::size_t j = 0; j < width; ++j) marginal_[j] += band[j] / rat(static_cast<std::uint64_t>(cfg.h) << scale);
  }
}

Rational SplitModel::conditional(std::uint64_t t, std::size_t j) const {
  if (t == 0 || t > cfg_.max_total() || j >= cfg_.indices()) throw std::out_of_range("conditional");
  return rat(count(t, j), draws_[t]);
}

Rational SplitModel::posterior_ratio(std::uint64_t t, std::uint64_t v) const {
  const std::size_t j = size_index(v);
  if (j >= cfg_.indices()) throw std::domain_error("piece larger than 2^m never occurs");
  if (marginal_[j] == 0) throw std::domain_error("piece value never occurs under this configuration");
  return conditional(t, j) / marginal_[j];
}

Rational SplitModel::posterior(std::uint64_t t, std::uint64_t v) const {
  return posterior_ratio(t, v) * prior_pmf(cfg_.h, t);
}

PieceDistribution marginal_expectation(const SplitConfig& cfg) { return SplitModel(cfg).marginal(); }

Rational posterior_ratio(std::uint64_t t, std::uint64_t v, const SplitConfig& cfg) {
  return SplitModel(cfg).posterior_ratio(t, v);
}

Lemma1Report check_lemma1(unsigned c, std::uint64_t a) {
  if (c > 40 || a >= (std::uint64_t{1} << c)) throw std::invalid_argument("need 0 <= a < 2^c");
  Lemma1Report r;
  r.c = c;
  r.a = a;
  r.draws = (std::uint64_t{1} << c) + a + 1;
  r.ones.assign(c + 2, 0);
  for (std::uint64_t i = 0; i < r.draws; ++i) {
    for (unsigned b = 0; b < c + 2; ++b) r.ones[b] += (i >> b) & 1U;
  }
  const Rational n = rat(r.draws);
  auto pr = [&](unsigned b) -> Rational { return rat(r.ones[b]) / n; };
  auto within = [&](unsigned b) { return pr(b) >= frac(1, 4) && pr(b) <= frac(3, 4); };
  Rational expected(0);
  for (unsigned b = 0; b < c + 2; ++b) expected += pr(b);
  const bool iii = expected >= frac(c, 4) && expected <= frac(3 * c + 2, 4);

  r.zero_based.i = true;
  for (unsigned b = 0; b <= c; ++b) r.zero_based.i = r.zero_based.i && within(b);
  r.zero_based.ii = pr(c + 1) <= frac(1, 2);
  r.zero_based.iii = iii;
  r.one_based.i = true;
  for (unsigned b = 0; b < c; ++b) r.one_based.i = r.one_based.i && within(b);
  r.one_based.ii = pr(c) <= frac(1, 2);
  r.one_based.iii = iii;
  return r;
}

// ---------------------------------------------------------------------------

bool BoundsReport::primary_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const BoundRow& r) { return !r.primary || r.pass; });
}

std::string BoundsReport::to_csv() const {
  std::ostringstream out;
  out << "claim,param_j,param_t,lhs,rhs,pass\n";
  for (const auto& r : rows) {
    out << r.claim << ',' << r.param_j << ',' << (r.param_t ? std::to_string(*r.param_t) : "-") << ','
        << to_string(r.lhs) << ',' << (r.rhs ? to_string(*r.rhs) : "inf") << ',' << (r.pass ? "pass" : "fail")
        << '\n';
  }
  return out.str();
}

namespace {

/// Tracks the case with the largest lhs - rhs (or lhs/rhs for ratios) for an
/// upper bound lhs <= rhs.
struct WorstUpper {
  std::optional<std::uint64_t> t;
  Rational lhs{0};
  Rational rhs{0};
  Rational slack{0};
  bool seen = false;
  bool pass = true;
  std::uint64_t cases = 0;

  void offer(std::uint64_t at, const Rational& l, const Rational& r) {
    ++cases;
    const Rational s = l - r;
    if (l > r) pass = false;
    if (!seen || s > slack) {
      seen = true;
      t = at;
      lhs = l;
      rhs = r;
      slack = s;
    }
  }
};

BoundRow row_from(std::string claim, int j, const WorstUpper& w, bool primary) {
  BoundRow row;
  row.claim = std::move(claim);
  row.param_j = j;
  row.param_t = w.t;
  row.lhs = w.lhs;
  row.rhs = w.rhs;
  row.pass = w.pass;
  row.primary = primary;
  row.cases = w.cases;
  return row;
}

BoundRow lower_row(std::string claim, int j, const Rational& lhs, const Rational& rhs) {
  BoundRow row;
  row.claim = std::move(claim);
  row.param_j = j;
  row.lhs = lhs;
  row.rhs = rhs;
  row.pass = lhs >= rhs;
  row.cases = 1;
  return row;
}

/// 3h / min{k/2, max{m+1-j, log2 k}}.
Rational theorem_bound(const SplitConfig& cfg, int j) {
  const long inner = std::max<long>(static_cast<long>(cfg.m) + 1 - j, static_cast<long>(cfg.log2k));
  const long denom = std::min<long>(static_cast<long>(cfg.k / 2), inner);
  return frac(3 * static_cast<long>(cfg.h), denom);
}

}  // namespace

BoundsReport check_bounds(const SplitConfig& cfg) { return check_bounds(SplitModel(cfg)); }

BoundsReport check_bounds(const SplitModel& model) {
  const SplitConfig& cfg = model.config();
  BoundsReport report;
  report.cfg = cfg;
  auto& rows = report.rows;
  const std::uint64_t tmax = cfg.max_total();
  const std::uint64_t top = std::uint64_t{1} << cfg.m;
  const int m = static_cast<int>(cfg.m);
  const int half_k = static_cast<int>(cfg.k / 2);
  const auto& marginal = model.marginal();

  // Lemma 2 (i): E[X_j | T=t] <= 3/2 for 1 <= j <= m - k/2.
  for (int j = 1; j <= m - half_k; ++j) {
    WorstUpper w;
    for (std::uint64_t t = 1; t <= tmax; ++t) w.offer(t, model.conditional(t, j), Rational(3, 2));
    rows.push_back(row_from("lemma2_i", j, w, true));
  }
  // Lemma 2 (ii), four readings: X_m or X_{m+1} (the 2^m piece), against
  // floor(t/2^m) or floor(t/(2m)). The adopted one is X_{m+1} vs floor(t/2^m).
  struct Reading {
    const char* name;
    int index;
    bool power;
  };
  for (const Reading rd : {Reading{"lemma2_ii[X_m+1;t/2^m]", m + 1, true}, Reading{"lemma2_ii[X_m;t/2^m]", m, true},
                           Reading{"lemma2_ii[X_m+1;t/2m]", m + 1, false}, Reading{"lemma2_ii[X_m;t/2m]", m, false}}) {
    WorstUpper w;
    for (std::uint64_t t = 1; t <= tmax; ++t) {
      const std::uint64_t bound = rd.power ? t / top : t / (2 * cfg.m);
      w.offer(t, model.conditional(t, rd.index), Rational(mpz_class(std::to_string(bound))));
    }
    rows.push_back(row_from(rd.name, rd.index, w, rd.index == m + 1 && rd.power));
  }
  // Lemma 2 (iii): E[X_0 | T=t] <= k.
  {
    WorstUpper w;
    for (std::uint64_t t = 1; t <= tmax; ++t) w.offer(t, model.conditional(t, 0), Rational(cfg.k));
    rows.push_back(row_from("lemma2_iii", 0, w, true));
  }

  // Lemma 3 on the marginals.
  for (int j = 1; j <= m - half_k; ++j) {
    rows.push_back(lower_row("lemma3_i", j, marginal[j], frac(cfg.k, 4 * cfg.h)));
  }
  for (int j = m - half_k + 1; j < m + 1; ++j) {
    const int num = std::max(m + 1 - j, static_cast<int>(cfg.log2k));
    rows.push_back(lower_row("lemma3_ii", j, marginal[j], frac(num, 2 * cfg.h)));
  }
  {
    const long num = 3 * (static_cast<long>(cfg.k) - 2 * static_cast<long>(cfg.log2k));
    rows.push_back(lower_row("lemma3_iii", m + 1, marginal[m + 1], frac(num, 4 * cfg.h)));
  }
  rows.push_back(lower_row("lemma3_iv", 0, marginal[0], frac(cfg.k, 8)));

  // Theorem, first bound. Adopted reading: the received piece has index j,
  // i.e. size 2^(j-1). Literal reading: size 2^(j+1), i.e. index j + 2.
  for (int offset : {0, 2}) {
    const bool primary = offset == 0;
    const std::string claim = primary ? "theorem_ratio[index=j]" : "theorem_ratio[index=j+2]";
    for (int index = 1; index <= m + 1; ++index) {
      const int j = index - offset;
      WorstUpper w;
      for (std::uint64_t t = 1; t <= tmax; ++t) {
        if (!model.possible(t, index)) continue;
        if (!((j >= 1 && j < m + 1) || t < 2 * top)) continue;
        w.offer(t, model.posterior_ratio(t, index_size(index)), theorem_bound(cfg, j));
      }
      if (w.cases > 0) rows.push_back(row_from(claim, j, w, primary));
    }
  }
  // Theorem, V = 0.
  {
    WorstUpper w;
    for (std::uint64_t t = 1; t <= tmax; ++t) {
      if (model.possible(t, 0)) w.offer(t, model.posterior_ratio(t, 0), Rational(8));
    }
    rows.push_back(row_from("theorem_zero", 0, w, true));
  }
  // Theorem, V = 2^m and t >= 2^(m+1). The bound is infinite when
  // k = 2 log2 k.
  {
    const long denom = 3 * (static_cast<long>(cfg.k) - 2 * static_cast<long>(cfg.log2k));
    WorstUpper w;
    for (std::uint64_t t = 2 * top; t <= tmax; ++t) {
      if (!model.possible(t, m + 1)) continue;
      const Rational ratio = model.posterior_ratio(t, top);
      if (denom > 0) {
        const Rational bound = Rational(mpz_class(std::to_string(4 * cfg.h * (t / top)))) / Rational(denom);
        w.offer(t, ratio, bound);
      } else {
        ++w.cases;
        if (!w.seen || ratio > w.lhs) {
          w.seen = true;
          w.t = t;
          w.lhs = ratio;
        }
      }
    }
    BoundRow row = row_from("theorem_top", m + 1, w, true);
    if (denom <= 0) row.rhs.reset();
    rows.push_back(row);
  }

  // Anonymity floor: a piece of index j leaves at least log2 k possible
  // scales n = floor(log2 t).
  for (int offset : {0, 2}) {
    const bool primary = offset == 0;
    for (int j = 1; j <= m; ++j) {
      const int index = j + offset;
      if (index > m + 1) continue;
      std::set<unsigned> scales;
      std::uint64_t cases = 0;
      for (std::uint64_t t = 1; t <= tmax; ++t) {
        if (!model.possible(t, index)) continue;
        if (!((j >= 1 && j < m + 1) || t < 2 * top)) continue;
        scales.insert(floor_log2(t));
        ++cases;
      }
      BoundRow row = lower_row(primary ? "anonymity_floor[index=j]" : "anonymity_floor[index=j+2]", j,
                               Rational(static_cast<long>(scales.size())), Rational(cfg.log2k));
      row.primary = primary;
      row.cases = cases;
      rows.push_back(row);
    }
  }
  return report;
}

}  // namespace zclaim::split
