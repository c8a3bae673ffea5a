#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "inclab/task_bank.hpp"
#include "test_support.hpp"

using namespace inclab;

TEST(Bins, EdgesAreLeftClosed) {
  EXPECT_EQ(bin_confidence(0.0), ConfidenceBin::very_low);
  EXPECT_EQ(bin_confidence(0.2499), ConfidenceBin::very_low);
  EXPECT_EQ(bin_confidence(0.25), ConfidenceBin::low);
  EXPECT_EQ(bin_confidence(0.5), ConfidenceBin::high);
  EXPECT_EQ(bin_confidence(0.75), ConfidenceBin::very_high);
  EXPECT_EQ(bin_confidence(1.0), ConfidenceBin::very_high);
  EXPECT_THROW(bin_confidence(1.01), DomainError);
  EXPECT_THROW(bin_confidence(std::nan("")), DomainError);
  EXPECT_TRUE(is_low_confidence(ConfidenceBin::low));
  EXPECT_FALSE(is_low_confidence(ConfidenceBin::high));
  for (auto b : kAllBins) EXPECT_EQ(confidence_bin_from_string(to_string(b)), b);
  EXPECT_THROW(confidence_bin_from_string("medium"), FormatError);
}

TEST(Scenarios, Classification) {
  EXPECT_EQ(classify_scenario(5, true), Scenario::S2);
  EXPECT_EQ(classify_scenario(4, true), Scenario::S2);
  EXPECT_EQ(classify_scenario(3, true), Scenario::S1);
  EXPECT_EQ(classify_scenario(1, false), Scenario::S3);
  EXPECT_EQ(classify_scenario(6, false), Scenario::S1);
  EXPECT_THROW(classify_scenario(7, true), DomainError);
  EXPECT_DOUBLE_EQ(human_accuracy_proxy(0), 1.0);
  EXPECT_DOUBLE_EQ(human_accuracy_proxy(3), 0.5);
}

TEST(Temperature, MatchesScipyMinimiser) {
  for (const auto& c : oracles()["temperature"]) {
    std::vector<CalibrationSample> s;
    for (std::size_t i = 0; i < c["labels"].size(); ++i)
      s.push_back({doubles(c["logits"][i]), c["labels"][i].get<int>()});
    TemperatureSearch search;
    search.tolerance = 1e-9;
    const double t = temperature_scale(s, search);
    EXPECT_NEAR(t, c["T"].get<double>(), 1e-5 * c["T"].get<double>());
    EXPECT_NEAR(mean_nll(s, t), c["nll"].get<double>(), 1e-9);
  }
}

TEST(Temperature, RecoversKnownDistortion) {
  // Labels drawn from softmax(z); logits handed over as 2.5 z.
  Rng rng(8);
  std::vector<CalibrationSample> s;
  for (int i = 0; i < 4000; ++i) {
    std::vector<double> z(5);
    for (auto& v : z) v = rng.normal(0, 1.5);
    const auto p = softmax(z);
    double u = rng.uniform();
    int label = 0;
    while (label < 4 && u >= p[static_cast<std::size_t>(label)]) u -= p[static_cast<std::size_t>(label++)];
    for (auto& v : z) v *= 2.5;
    s.push_back({z, label});
  }
  EXPECT_NEAR(temperature_scale(s), 2.5, 0.15);
}

TEST(Temperature, Errors) {
  std::vector<CalibrationSample> one{{{1.0, 0.0}, 0}};
  EXPECT_THROW(temperature_scale(one), CalibrationError);
  std::vector<CalibrationSample> same_label{{{1.0, 0.0}, 0}, {{0.0, 1.0}, 0}};
  EXPECT_THROW(temperature_scale(same_label), CalibrationError);
  std::vector<CalibrationSample> flat{{{1.0, 1.0}, 0}, {{2.0, 2.0}, 1}};
  EXPECT_THROW(temperature_scale(flat), CalibrationError);
  std::vector<CalibrationSample> bad_label{{{1.0, 0.0}, 0}, {{0.0, 1.0}, 2}};
  EXPECT_THROW(temperature_scale(bad_label), CalibrationError);
}

TEST(Pool, ScaledConfidenceIsCalibrated) {
  const auto pool = build_pool(7);
  std::array<double, 4> conf{}, hits{}, count{};
  for (const auto& it : pool.items) {
    const auto b = static_cast<std::size_t>(bin_confidence(it.confidence));
    conf[b] += it.confidence;
    hits[b] += it.ai_label == it.true_label;
    ++count[b];
  }
  double ece = 0.0;
  for (std::size_t b = 0; b < 4; ++b) ece += std::abs(hits[b] - conf[b]) / pool.items.size();
  EXPECT_LT(ece, 0.05);
  EXPECT_GT(pool.temperature, 1.0);
}

TEST(Bank, QuotasAndDeterminism) {
  for (std::uint64_t seed : {1u, 7u, 42u, 2024u}) {
    const auto bank = build_bank(seed);
    ASSERT_EQ(bank.size(), 30u);
    std::array<int, 3> sc{};
    int low = 0;
    std::set<std::string> ids, refs;
    for (const auto& t : bank) {
      ++sc[static_cast<std::size_t>(t.scenario)];
      low += is_low_confidence(t.confidence_bin);
      ids.insert(t.id);
      refs.insert(t.stimulus_ref);
      EXPECT_NO_THROW(validate(t));
      EXPECT_DOUBLE_EQ(t.p_h_proxy, human_accuracy_proxy(t.annotator_disagreement));
    }
    EXPECT_EQ(sc, (std::array<int, 3>{10, 10, 10}));
    EXPECT_EQ(low, 15);
    EXPECT_EQ(ids.size(), 30u);
    EXPECT_EQ(refs.size(), 30u);
    EXPECT_EQ(build_bank(seed), bank);
  }
  EXPECT_NE(build_bank(1), build_bank(2));
}

TEST(Bank, CustomQuotas) {
  BankScheme s;
  s.scenario_quota = {6, 4, 2};
  s.low_confidence_count = 5;
  const auto bank = build_bank(3, s);
  ASSERT_EQ(bank.size(), 12u);
  int low = 0;
  for (const auto& t : bank) low += is_low_confidence(t.confidence_bin);
  EXPECT_EQ(low, 5);
}

TEST(Bank, TrainingIsDisjoint) {
  const auto pool = build_pool(7);
  const auto bank = select_bank(pool, 7);
  const auto training = select_training(pool, bank, 2, 7);
  ASSERT_EQ(training.size(), 2u);
  for (const auto& tr : training)
    for (const auto& t : bank) EXPECT_NE(tr.stimulus_ref, t.stimulus_ref);
  EXPECT_NE(training[0].stimulus_ref, training[1].stimulus_ref);
}

TEST(Manifest, RoundTrip) {
  const auto bank = build_bank(11);
  std::stringstream ss;
  write_manifest(ss, bank);
  const auto back = read_manifest(ss);
  ASSERT_EQ(back.size(), bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    EXPECT_EQ(back[i].id, bank[i].id);
    EXPECT_EQ(back[i].true_label, bank[i].true_label);
    EXPECT_EQ(back[i].ai_confidence, bank[i].ai_confidence);
    EXPECT_EQ(back[i].scenario, bank[i].scenario);
  }
  EXPECT_EQ(back, bank);
}

TEST(Manifest, RejectsInconsistentRecords) {
  std::stringstream bad_bin(
      R"({"id":"x","true_label":1,"ai_label":1,"ai_confidence":0.9,"confidence_bin":"low","disagreement":2,"scenario":"S1","stimulus_ref":"r"})");
  EXPECT_THROW(read_manifest(bad_bin), FormatError);
  std::stringstream bad_sc(
      R"({"id":"x","true_label":1,"ai_label":1,"ai_confidence":0.9,"confidence_bin":"very_high","disagreement":5,"scenario":"S1","stimulus_ref":"r"})");
  EXPECT_THROW(read_manifest(bad_sc), FormatError);
  std::stringstream missing(R"({"id":"x"})");
  EXPECT_THROW(read_manifest(missing), FormatError);
  std::stringstream garbage("{not json");
  EXPECT_THROW(read_manifest(garbage), FormatError);
}

TEST(Glyph, DeterministicAndShaped) {
  const auto bank = build_bank(5);
  const auto g = render_glyph(bank[0]);
  EXPECT_EQ(g, render_glyph(bank[0]));
  EXPECT_EQ(g.size(), static_cast<std::size_t>(kGlyphSize * (kGlyphSize + 1) - 1));
  EXPECT_EQ(std::count(g.begin(), g.end(), '\n'), kGlyphSize - 1);
  EXPECT_NE(render_glyph(bank[0]), render_glyph(bank[1]));
}
