#pragma once

// Precision weights and the hypothesis tests used by the analysis pipeline.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "inclab/distributions.hpp"
#include "inclab/error.hpp"

namespace inclab {

struct WeightedSample {
  std::vector<double> values;
  std::vector<double> weights;

  static WeightedSample unit(std::vector<double> values) {
    std::vector<double> w(values.size(), 1.0);
    return {std::move(values), std::move(w)};
  }
};

struct TestResult {
  double statistic = 0.0;
  double df = std::numeric_limits<double>::quiet_NaN();
  double df2 = std::numeric_limits<double>::quiet_NaN();  // second df for F-type tests
  double p_raw = 1.0;
  double p_corrected = 1.0;
  double effect_size = std::numeric_limits<double>::quiet_NaN();
};

// ---------------------------------------------------------------------------
// Precision weights

/// Factor applied to the largest finite weight of a group to obtain the
/// weight of a degenerate (zero-variance) member.
inline constexpr double kDegenerateWeightFactor = 1.25;

namespace detail {

// Replace non-finite entries by 1.25 x the largest finite entry.
inline std::vector<double> resolve_degenerate(std::vector<double> raw) {
  double max_finite = -1.0;
  bool any_degenerate = false;
  for (double w : raw) {
    if (std::isfinite(w)) {
      max_finite = std::max(max_finite, w);
    } else {
      any_degenerate = true;
    }
  }
  if (any_degenerate) {
    if (max_finite <= 0.0) throw StatsError("weight group has no finite weight to scale degenerate members from");
    for (double& w : raw) {
      if (!std::isfinite(w)) w = kDegenerateWeightFactor * max_finite;
    }
  }
  return raw;
}

}  // namespace detail

struct RelianceObservation {
  double n = 0;    // decisions completed
  double p = 0.0;  // fraction accepted
};

/// n / (p (1 - p)) for every member of one treatment group; members with
/// p in {0, 1} get 1.25 x the group's largest finite weight.
inline std::vector<double> reliance_weights(std::span<const RelianceObservation> group) {
  std::vector<double> raw;
  raw.reserve(group.size());
  for (const auto& obs : group) {
    if (!(obs.n > 0)) throw StatsError("reliance weight needs n_i > 0");
    if (!(obs.p >= 0.0 && obs.p <= 1.0)) throw StatsError("reliance weight needs p_i in [0,1]");
    const double var = obs.p * (1.0 - obs.p);
    raw.push_back(var > 0.0 ? obs.n / var : std::numeric_limits<double>::infinity());
  }
  return detail::resolve_degenerate(std::move(raw));
}

/// Weight of a single member given its whole group (which should include it).
inline double reliance_weight(double n_i, double p_i, std::span<const RelianceObservation> group) {
  if (!(n_i > 0)) throw StatsError("reliance weight needs n_i > 0");
  if (!(p_i >= 0.0 && p_i <= 1.0)) throw StatsError("reliance weight needs p_i in [0,1]");
  const double var = p_i * (1.0 - p_i);
  if (var > 0.0) return n_i / var;
  std::vector<RelianceObservation> with_member(group.begin(), group.end());
  with_member.push_back({n_i, p_i});
  return reliance_weights(with_member).back();
}

/// n / s^2 with s^2 the (n-1) sample variance of a 0/1 correctness vector.
/// Returns +inf for zero variance; resolve with `accuracy_weights`.
inline double accuracy_weight(std::span<const int> correct) {
  const auto n = static_cast<double>(correct.size());
  if (correct.size() < 2) throw StatsError("accuracy weight needs at least two observations");
  const double k = static_cast<double>(std::count_if(correct.begin(), correct.end(), [](int c) { return c != 0; }));
  const double var = (k - k * k / n) / (n - 1.0);
  if (var <= 0.0) return std::numeric_limits<double>::infinity();
  return n / var;
}

/// Accuracy weights for a treatment group, with the 125% rule for
/// zero-variance members.
inline std::vector<double> accuracy_weights(std::span<const std::vector<int>> group) {
  std::vector<double> raw;
  raw.reserve(group.size());
  for (const auto& v : group) raw.push_back(accuracy_weight(v));
  return detail::resolve_degenerate(std::move(raw));
}

// Same from summary counts: n observations with k successes.
inline double accuracy_weight_from_counts(double n, double k) {
  if (n < 2) throw StatsError("accuracy weight needs at least two observations");
  const double var = (k - k * k / n) / (n - 1.0);
  if (var <= 0.0) return std::numeric_limits<double>::infinity();
  return n / var;
}

inline std::vector<double> resolve_weights(std::vector<double> raw) {
  return detail::resolve_degenerate(std::move(raw));
}

/// Combine two precision weights by their harmonic mean.
inline double harmonic_mean_weight(double w1, double w2) { return 2.0 / (1.0 / w1 + 1.0 / w2); }

// ---------------------------------------------------------------------------
// Winsorization

/// Percentile (0..100) by linear interpolation between order statistics,
/// position p/100 * (n-1).
inline double percentile(std::span<const double> values, double pct) {
  if (values.empty()) throw StatsError("percentile of an empty vector");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = pct / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline std::vector<double> winsorize_weights(std::span<const double> weights, double lower_pct = 5.0,
                                             double upper_pct = 95.0) {
  if (weights.empty()) throw StatsError("winsorize_weights needs a nonempty vector");
  const double lo = percentile(weights, lower_pct);
  const double hi = percentile(weights, upper_pct);
  std::vector<double> out(weights.begin(), weights.end());
  for (double& w : out) w = std::clamp(w, lo, hi);
  return out;
}

// ---------------------------------------------------------------------------
// Weighted Welch t-test

struct WeightedMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased under the effective sample size
  double n_eff = 0.0;     // (sum w)^2 / sum w^2
};

inline WeightedMoments weighted_moments(const WeightedSample& s) {
  if (s.values.size() != s.weights.size()) throw StatsError("values and weights differ in length");
  double sw = 0.0, sw2 = 0.0, swx = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    const double w = s.weights[i];
    if (!(w > 0.0) || !std::isfinite(w)) throw StatsError("weights must be finite and > 0");
    sw += w;
    sw2 += w * w;
    swx += w * s.values[i];
  }
  WeightedMoments m;
  m.mean = swx / sw;
  m.n_eff = sw * sw / sw2;
  double ss = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    const double d = s.values[i] - m.mean;
    ss += s.weights[i] * d * d;
  }
  // biased weighted variance times n_eff / (n_eff - 1)
  m.variance = m.n_eff > 1.0 ? (ss / sw) * m.n_eff / (m.n_eff - 1.0) : 0.0;
  return m;
}

/// Two-sided Welch t-test of mean(a) - mean(b) on weighted samples.
inline TestResult weighted_welch_t(const WeightedSample& a, const WeightedSample& b) {
  if (a.values.size() < 2 || b.values.size() < 2) throw StatsError("Welch test needs >= 2 members per group");
  const auto ma = weighted_moments(a);
  const auto mb = weighted_moments(b);
  const double va = ma.variance / ma.n_eff;
  const double vb = mb.variance / mb.n_eff;
  const double se2 = va + vb;
  TestResult r;
  const double diff = ma.mean - mb.mean;
  if (!(se2 > 0.0)) {
    if (diff == 0.0) throw StatsError("Welch test undefined: both groups have zero variance");
    throw StatsError("Welch test undefined: zero variance in both groups with distinct means");
  }
  r.statistic = diff / std::sqrt(se2);
  r.df = se2 * se2 / (va * va / (ma.n_eff - 1.0) + vb * vb / (mb.n_eff - 1.0));
  r.p_raw = tail_probability(Distribution::t, r.statistic, {r.df}, Tail::two_sided);
  r.p_corrected = r.p_raw;
  const double pooled =
      ((ma.n_eff - 1.0) * ma.variance + (mb.n_eff - 1.0) * mb.variance) / (ma.n_eff + mb.n_eff - 2.0);
  r.effect_size = pooled > 0.0 ? diff / std::sqrt(pooled) : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Multiple comparisons

inline double bonferroni(double p, int m) {
  if (m < 1) throw StatsError("Bonferroni needs m >= 1");
  return std::min(1.0, p * m);
}

inline std::vector<double> bonferroni(std::span<const double> p_values, int m) {
  std::vector<double> out;
  out.reserve(p_values.size());
  for (double p : p_values) out.push_back(bonferroni(p, m));
  return out;
}

inline void apply_bonferroni(std::span<TestResult> results, int m) {
  for (auto& r : results) r.p_corrected = bonferroni(r.p_raw, m);
}

// ---------------------------------------------------------------------------
// Rank and distribution tests

/// Average ranks (1-based) with ties sharing the mean rank.
inline std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline TestResult kruskal_wallis(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw StatsError("Kruskal-Wallis needs at least two groups");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) throw StatsError("Kruskal-Wallis groups must be nonempty");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const auto ranks = average_ranks(pooled);
  const double n = static_cast<double>(pooled.size());

  double h = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rank_sum += ranks[offset + i];
    h += rank_sum * rank_sum / static_cast<double>(g.size());
    offset += g.size();
  }
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

  // tie correction 1 - sum(t^3 - t) / (n^3 - n)
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double ties = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  const double correction = 1.0 - ties / (n * n * n - n);
  if (correction <= 0.0) throw StatsError("Kruskal-Wallis undefined: all values identical");
  h /= correction;

  TestResult r;
  r.statistic = std::max(0.0, h);
  r.df = static_cast<double>(groups.size() - 1);
  r.p_raw = r.p_corrected = tail_probability(Distribution::chi_square, r.statistic, {r.df});
  return r;
}

/// One-sided two-sample KS: D = sup_x (F_a(x) - F_b(x)), large when a tends
/// to be smaller than b. p = exp(-2 m n D^2 / (m + n)).
inline TestResult ks_one_sided(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw StatsError("KS test needs nonempty samples");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double m = static_cast<double>(sa.size());
  const double n = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() || j < sb.size()) {
    double x;
    if (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) {
      x = sa[i];
    } else {
      x = sb[j];
    }
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    d = std::max(d, static_cast<double>(i) / m - static_cast<double>(j) / n);
  }
  TestResult r;
  r.statistic = d;
  r.p_raw = r.p_corrected = std::min(1.0, std::exp(-2.0 * m * n * d * d / (m + n)));
  return r;
}

/// One-way ANOVA F statistic and its upper-tail p-value.
inline TestResult one_way_anova(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw StatsError("ANOVA needs at least two groups");
  double n = 0.0, grand = 0.0;
  for (const auto& g : groups) {
    if (g.empty()) throw StatsError("ANOVA groups must be nonempty");
    n += static_cast<double>(g.size());
    grand += std::accumulate(g.begin(), g.end(), 0.0);
  }
  grand /= n;
  const double k = static_cast<double>(groups.size());
  double between = 0.0, within = 0.0;
  for (const auto& g : groups) {
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    between += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
    for (double x : g) within += (x - mean) * (x - mean);
  }
  TestResult r;
  r.df = k - 1.0;
  r.df2 = n - k;
  if (!(r.df2 > 0.0)) throw StatsError("ANOVA needs more observations than groups");
  if (within <= 0.0) {
    if (between <= 0.0) {
      r.statistic = 0.0;
      r.p_raw = r.p_corrected = 1.0;
      return r;
    }
    throw StatsError("ANOVA undefined: zero within-group variance");
  }
  r.statistic = (between / r.df) / (within / r.df2);
  r.p_raw = r.p_corrected = tail_probability(Distribution::f, r.statistic, {r.df, r.df2});
  return r;
}

/// Levene's test (mean-centred): ANOVA on |x - group mean|.
inline TestResult levene(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw StatsError("Levene's test needs at least two groups");
  std::vector<std::vector<double>> deviations;
  deviations.reserve(groups.size());
  bool any_spread = false;
  for (const auto& g : groups) {
    if (g.size() < 2) throw StatsError("Levene's test needs >= 2 members per group");
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    auto& dev = deviations.emplace_back();
    for (double x : g) {
      dev.push_back(std::abs(x - mean));
      any_spread = any_spread || dev.back() > 0.0;
    }
  }
  if (!any_spread) throw StatsError("Levene's test undefined: every group is constant");
  return one_way_anova(deviations);
}

}  // namespace inclab
