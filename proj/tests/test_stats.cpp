#include <gtest/gtest.h>

#include <algorithm>

#include "inclab/random.hpp"
#include "inclab/stats.hpp"
#include "test_support.hpp"

using namespace inclab;

TEST(Percentile, MatchesNumpyLinear) {
  for (const auto& c : oracles()["percentile"]) {
    const auto v = doubles(c["values"]);
    EXPECT_NEAR(percentile(v, c["pct"].get<double>()), c["value"].get<double>(), 1e-9);
  }
}

TEST(Percentile, EmptyThrows) {
  std::vector<double> v;
  EXPECT_THROW(percentile(v, 50), StatsError);
  EXPECT_THROW(winsorize_weights(v), StatsError);
}

TEST(Winsorize, CapsAtInterpolatedPercentiles) {
  std::vector<double> w;
  for (int i = 1; i <= 100; ++i) w.push_back(i);
  const auto out = winsorize_weights(w);
  EXPECT_NEAR(out.front(), 5.95, 1e-12);
  EXPECT_NEAR(out.back(), 95.05, 1e-12);
  EXPECT_EQ(out[49], 50.0);
  EXPECT_EQ(std::count(out.begin(), out.end(), out.front()), 5);
}

TEST(Winsorize, IdempotentWhenPercentilePositionIsIntegral) {
  // 21 values: the 5th/95th percentiles sit exactly on order statistics.
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> w;
    for (int i = 0; i < 21; ++i) w.push_back(rng.uniform(1, 500));
    const auto once = winsorize_weights(w);
    EXPECT_EQ(winsorize_weights(once), once);
  }
}

TEST(Winsorize, PropertyBoundsAndOrder) {
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> w(2 + rng.below(80));
    for (auto& x : w) x = std::exp(rng.normal(3, 2));
    const auto out = winsorize_weights(w);
    const double lo = percentile(w, 5), hi = percentile(w, 95);
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_GE(out[i], lo);
      EXPECT_LE(out[i], hi);
      if (w[i] >= lo && w[i] <= hi) { EXPECT_EQ(out[i], w[i]); }
      for (std::size_t j = 0; j < w.size(); ++j)
        if (w[i] <= w[j]) { EXPECT_LE(out[i], out[j]); }
    }
    // a second pass only narrows the range further and keeps the order
    const auto twice = winsorize_weights(out);
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_GE(twice[i], lo);
      EXPECT_LE(twice[i], hi);
      for (std::size_t j = 0; j < w.size(); ++j)
        if (out[i] <= out[j]) { EXPECT_LE(twice[i], twice[j]); }
    }
  }
}

TEST(RelianceWeights, DefinitionAndDegenerateRule) {
  std::vector<RelianceObservation> g{{20, 0.5}, {10, 0.2}, {30, 1.0}, {30, 0.0}};
  const auto w = reliance_weights(g);
  EXPECT_DOUBLE_EQ(w[0], 80.0);
  EXPECT_DOUBLE_EQ(w[1], 62.5);
  EXPECT_DOUBLE_EQ(w[2], 100.0);
  EXPECT_DOUBLE_EQ(w[3], 100.0);

  std::vector<RelianceObservation> h{{100, 0.5}};
  EXPECT_DOUBLE_EQ(reliance_weight(100, 0.5, h), 400.0);
  EXPECT_DOUBLE_EQ(reliance_weight(12, 1.0, h), 500.0);
}

TEST(RelianceWeights, Errors) {
  std::vector<RelianceObservation> all_degenerate{{10, 0.0}, {10, 1.0}};
  EXPECT_THROW(reliance_weights(all_degenerate), StatsError);
  std::vector<RelianceObservation> bad_n{{0, 0.5}};
  EXPECT_THROW(reliance_weights(bad_n), StatsError);
  std::vector<RelianceObservation> bad_p{{5, 1.5}};
  EXPECT_THROW(reliance_weights(bad_p), StatsError);
}

TEST(AccuracyWeights, DefinitionAndDegenerateRule) {
  // 4 of 5 correct: s^2 = 0.2, weight 25.
  std::vector<std::vector<int>> g{{1, 1, 1, 1, 0}, {1, 1, 1, 1, 1}, {1, 0}};
  const auto w = accuracy_weights(g);
  EXPECT_NEAR(w[0], 25.0, 1e-12);
  EXPECT_NEAR(w[2], 4.0, 1e-12);
  EXPECT_NEAR(w[1], 1.25 * 25.0, 1e-12);
  EXPECT_NEAR(accuracy_weight_from_counts(5, 4), 25.0, 1e-12);
  EXPECT_TRUE(std::isinf(accuracy_weight_from_counts(8, 0)));
  std::vector<int> one{1};
  EXPECT_THROW(accuracy_weight(one), StatsError);
}

TEST(HarmonicMean, Values) {
  EXPECT_DOUBLE_EQ(harmonic_mean_weight(2, 2), 2.0);
  EXPECT_DOUBLE_EQ(harmonic_mean_weight(1, 3), 1.5);
}

TEST(WeightedWelch, UnitWeightsMatchClassicWelch) {
  for (const auto& c : oracles()["welch"]) {
    const auto r = weighted_welch_t(WeightedSample::unit(doubles(c["a"])), WeightedSample::unit(doubles(c["b"])));
    EXPECT_TRUE(close(r.statistic, c["t"], 1e-10));
    EXPECT_TRUE(close(r.df, c["df"], 1e-10));
    EXPECT_TRUE(close(r.p_raw, c["p"], 1e-9, 1e-14));
    EXPECT_TRUE(close(r.effect_size, c["d"], 1e-10));
  }
}

TEST(WeightedWelch, HandCase) {
  const auto& c = oracles()["weighted_welch_hand"];
  const WeightedSample a{doubles(c["a"]), doubles(c["wa"])};
  const WeightedSample b{doubles(c["b"]), doubles(c["wb"])};
  const auto ma = weighted_moments(a);
  EXPECT_DOUBLE_EQ(ma.mean, 2.25);
  EXPECT_NEAR(ma.n_eff, 16.0 / 6.0, 1e-14);
  const auto r = weighted_welch_t(a, b);
  EXPECT_NEAR(r.statistic, c["t"].get<double>(), 1e-12);
  EXPECT_NEAR(r.df, c["df"].get<double>(), 1e-12);
  EXPECT_NEAR(r.p_raw, c["p"].get<double>(), 1e-12);
  EXPECT_NEAR(r.effect_size, c["d"].get<double>(), 1e-12);
  EXPECT_NEAR(r.statistic, -0.86844, 1e-5);
  EXPECT_NEAR(r.df, 3.5285, 1e-4);
}

TEST(WeightedWelch, Fixtures) {
  for (const auto& c : oracles()["weighted_welch"]) {
    const WeightedSample a{doubles(c["a"]), doubles(c["wa"])};
    const WeightedSample b{doubles(c["b"]), doubles(c["wb"])};
    const auto r = weighted_welch_t(a, b);
    EXPECT_TRUE(close(weighted_moments(a).mean, c["mean_a"], 1e-12));
    EXPECT_TRUE(close(weighted_moments(b).n_eff, c["neff_b"], 1e-12));
    EXPECT_TRUE(close(r.statistic, c["t"], 1e-10));
    EXPECT_TRUE(close(r.df, c["df"], 1e-10));
    EXPECT_TRUE(close(r.p_raw, c["p"], 1e-9, 1e-14));
    EXPECT_TRUE(close(r.effect_size, c["d"], 1e-10));
  }
}

TEST(WeightedWelch, PropertyScaleInvarianceAndAntisymmetry) {
  Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    WeightedSample a, b;
    for (std::size_t i = 0, n = 3 + rng.below(20); i < n; ++i) {
      a.values.push_back(rng.uniform());
      a.weights.push_back(rng.uniform(1, 100));
    }
    for (std::size_t i = 0, n = 3 + rng.below(20); i < n; ++i) {
      b.values.push_back(rng.uniform());
      b.weights.push_back(rng.uniform(1, 100));
    }
    const auto r = weighted_welch_t(a, b);
    const auto flipped = weighted_welch_t(b, a);
    EXPECT_NEAR(flipped.statistic, -r.statistic, 1e-12);
    EXPECT_NEAR(flipped.p_raw, r.p_raw, 1e-12);
    auto a2 = a;
    for (auto& w : a2.weights) w *= 7.5;
    EXPECT_NEAR(weighted_welch_t(a2, b).statistic, r.statistic, 1e-9);
    EXPECT_GE(r.p_raw, 0.0);
    EXPECT_LE(r.p_raw, 1.0);
  }
}

TEST(WeightedWelch, Errors) {
  const auto a = WeightedSample::unit({1.0});
  const auto b = WeightedSample::unit({1.0, 2.0});
  EXPECT_THROW(weighted_welch_t(a, b), StatsError);
  const auto c = WeightedSample::unit({3.0, 3.0});
  const auto d = WeightedSample::unit({3.0, 3.0});
  EXPECT_THROW(weighted_welch_t(c, d), StatsError);
  const WeightedSample bad{{1.0, 2.0}, {1.0, 0.0}};
  EXPECT_THROW(weighted_welch_t(bad, b), StatsError);
}

TEST(Bonferroni, ScalesAndCaps) {
  EXPECT_DOUBLE_EQ(bonferroni(0.01, 3), 0.03);
  EXPECT_DOUBLE_EQ(bonferroni(0.5, 3), 1.0);
  std::vector<double> p{0.001, 0.02, 0.4};
  const auto q = bonferroni(p, 2);
  EXPECT_DOUBLE_EQ(q[1], 0.04);
  EXPECT_DOUBLE_EQ(q[2], 0.8);
  EXPECT_THROW(bonferroni(0.1, 0), StatsError);
}

TEST(KruskalWallis, HandCase) {
  std::vector<std::vector<double>> g{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const auto r = kruskal_wallis(g);
  EXPECT_NEAR(r.statistic, 7.2, 1e-12);
  EXPECT_NEAR(r.p_raw, std::exp(-3.6), 1e-12);
  EXPECT_EQ(r.df, 2.0);
}

TEST(KruskalLeveneAnova, Fixtures) {
  for (const auto& c : oracles()["kruskal_levene"]) {
    std::vector<std::vector<double>> g;
    for (const auto& x : c["groups"]) g.push_back(doubles(x));
    const auto kw = kruskal_wallis(g);
    EXPECT_TRUE(close(kw.statistic, c["H"], 1e-10, 1e-12));
    EXPECT_TRUE(close(kw.p_raw, c["p"], 1e-9, 1e-14));
    const auto lv = levene(g);
    EXPECT_TRUE(close(lv.statistic, c["levene_W"], 1e-10, 1e-12));
    EXPECT_TRUE(close(lv.p_raw, c["levene_p"], 1e-9, 1e-14));
    const auto an = one_way_anova(g);
    EXPECT_TRUE(close(an.statistic, c["anova_F"], 1e-10, 1e-12));
    EXPECT_TRUE(close(an.p_raw, c["anova_p"], 1e-9, 1e-14));
  }
}

TEST(KruskalWallis, PropertyPermutationInvariance) {
  Rng rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::vector<double>> g(3);
    for (auto& x : g)
      for (std::size_t i = 0, n = 2 + rng.below(10); i < n; ++i) x.push_back(static_cast<double>(rng.below(6)));
    g[0].push_back(100.0);
    const auto r = kruskal_wallis(g);
    for (auto& x : g) rng.shuffle(std::span<double>(x));
    std::swap(g[0], g[2]);
    EXPECT_NEAR(kruskal_wallis(g).statistic, r.statistic, 1e-10);
    EXPECT_GE(r.statistic, 0.0);
  }
}

TEST(KruskalWallis, Errors) {
  std::vector<std::vector<double>> one{{1, 2}};
  EXPECT_THROW(kruskal_wallis(one), StatsError);
  std::vector<std::vector<double>> empty{{1, 2}, {}};
  EXPECT_THROW(kruskal_wallis(empty), StatsError);
  std::vector<std::vector<double>> same{{2, 2}, {2, 2}};
  EXPECT_THROW(kruskal_wallis(same), StatsError);
  EXPECT_THROW(levene(same), StatsError);
}

TEST(KolmogorovSmirnov, Fixtures) {
  for (const auto& c : oracles()["ks"]) {
    const auto a = doubles(c["a"]);
    const auto b = doubles(c["b"]);
    const auto r = ks_one_sided(a, b);
    EXPECT_NEAR(r.statistic, c["D"].get<double>(), 1e-12);
    EXPECT_TRUE(close(r.p_raw, c["p"], 1e-10, 1e-15));
  }
}

TEST(KolmogorovSmirnov, Extremes) {
  std::vector<double> lo{1, 2, 3}, hi{10, 11, 12};
  EXPECT_DOUBLE_EQ(ks_one_sided(lo, hi).statistic, 1.0);
  EXPECT_DOUBLE_EQ(ks_one_sided(hi, lo).statistic, 0.0);
  EXPECT_DOUBLE_EQ(ks_one_sided(hi, lo).p_raw, 1.0);
  EXPECT_NEAR(ks_one_sided(lo, hi).p_raw, std::exp(-3.0), 1e-15);
  EXPECT_DOUBLE_EQ(ks_one_sided(lo, lo).statistic, 0.0);
  std::vector<double> none;
  EXPECT_THROW(ks_one_sided(none, lo), StatsError);
}
