#pragma once

// Task instances: confidence bins, complementarity scenarios, temperature
// scaling of classifier logits, and construction of the 30-instance bank
// from a synthetic candidate pool.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <json.hpp>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "inclab/error.hpp"
#include "inclab/random.hpp"

namespace inclab {

inline constexpr std::array<std::string_view, 16> kDefaultLabels = {
    "airplane", "bear",     "bicycle",  "bird",     "boat",     "bottle", "car",      "cat",
    "chair",    "clock",    "dog",      "elephant", "keyboard", "knife",  "oven",     "truck"};

// ---------------------------------------------------------------------------
// Confidence bins

enum class ConfidenceBin { very_low, low, high, very_high };

inline constexpr std::array<ConfidenceBin, 4> kAllBins = {ConfidenceBin::very_low, ConfidenceBin::low,
                                                          ConfidenceBin::high, ConfidenceBin::very_high};

inline std::string_view to_string(ConfidenceBin b) {
  switch (b) {
    case ConfidenceBin::very_low: return "very_low";
    case ConfidenceBin::low: return "low";
    case ConfidenceBin::high: return "high";
    case ConfidenceBin::very_high: return "very_high";
  }
  return "?";
}

inline ConfidenceBin confidence_bin_from_string(std::string_view s) {
  for (auto b : kAllBins)
    if (to_string(b) == s) return b;
  throw FormatError("unknown confidence bin '" + std::string(s) + "'");
}

/// Four equal-width bins, left-closed; the top bin also holds 1.0.
inline ConfidenceBin bin_confidence(double confidence) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) throw DomainError("confidence must lie in [0,1]");
  if (confidence < 0.25) return ConfidenceBin::very_low;
  if (confidence < 0.5) return ConfidenceBin::low;
  if (confidence < 0.75) return ConfidenceBin::high;
  return ConfidenceBin::very_high;
}

inline double bin_midpoint(ConfidenceBin b) { return 0.125 + 0.25 * static_cast<int>(b); }

inline bool is_low_confidence(ConfidenceBin b) { return b == ConfidenceBin::very_low || b == ConfidenceBin::low; }

// ---------------------------------------------------------------------------
// Complementarity scenarios

enum class Scenario { S1, S2, S3 };

inline constexpr std::array<Scenario, 3> kAllScenarios = {Scenario::S1, Scenario::S2, Scenario::S3};

inline std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::S1: return "S1";
    case Scenario::S2: return "S2";
    case Scenario::S3: return "S3";
  }
  return "?";
}

inline Scenario scenario_from_string(std::string_view s) {
  for (auto sc : kAllScenarios)
    if (to_string(sc) == s) return sc;
  throw FormatError("unknown scenario '" + std::string(s) + "'");
}

inline constexpr int kAnnotators = 6;
inline constexpr int kHighDisagreement = 4;  // at least 4 of 6 disagree

/// S2: humans struggle (high disagreement) but the AI is right.
/// S3: humans agree (low disagreement) but the AI is wrong.
/// S1: both easy or both hard.
inline Scenario classify_scenario(int disagreement, bool ai_correct) {
  if (disagreement < 0 || disagreement > kAnnotators) throw DomainError("disagreement must lie in 0..6");
  const bool hard_for_humans = disagreement >= kHighDisagreement;
  if (hard_for_humans && ai_correct) return Scenario::S2;
  if (!hard_for_humans && !ai_correct) return Scenario::S3;
  return Scenario::S1;
}

inline double human_accuracy_proxy(int disagreement) {
  return static_cast<double>(kAnnotators - disagreement) / kAnnotators;
}

// ---------------------------------------------------------------------------
// Instances

struct TaskInstance {
  std::string id;
  int true_label = 0;
  int ai_label = 0;
  double ai_confidence = 0.0;
  ConfidenceBin confidence_bin = ConfidenceBin::very_low;
  int annotator_disagreement = 0;
  double p_h_proxy = 1.0;
  Scenario scenario = Scenario::S1;
  std::string stimulus_ref;

  bool ai_correct() const { return ai_label == true_label; }
  bool operator==(const TaskInstance&) const = default;
};

inline void validate(const TaskInstance& t) {
  if (!(t.ai_confidence >= 0.0 && t.ai_confidence <= 1.0)) throw FormatError(t.id + ": ai_confidence outside [0,1]");
  if (t.confidence_bin != bin_confidence(t.ai_confidence)) throw FormatError(t.id + ": confidence_bin inconsistent");
  if (t.annotator_disagreement < 0 || t.annotator_disagreement > kAnnotators)
    throw FormatError(t.id + ": disagreement outside 0..6");
  if (t.scenario != classify_scenario(t.annotator_disagreement, t.ai_correct()))
    throw FormatError(t.id + ": scenario inconsistent with disagreement and AI correctness");
}

// ---------------------------------------------------------------------------
// Temperature scaling

struct CalibrationSample {
  std::vector<double> logits;
  int true_label = 0;
};

inline std::vector<double> softmax(std::span<const double> logits, double temperature = 1.0) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - mx) / temperature);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

inline std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

inline double calibrated_confidence(std::span<const double> logits, double temperature) {
  const auto p = softmax(logits, temperature);
  return *std::max_element(p.begin(), p.end());
}

/// Mean negative log-likelihood of softmax(logits / T).
inline double mean_nll(std::span<const CalibrationSample> samples, double temperature) {
  double total = 0.0;
  for (const auto& s : samples) {
    const double mx = *std::max_element(s.logits.begin(), s.logits.end());
    double sum = 0.0;
    for (double z : s.logits) sum += std::exp((z - mx) / temperature);
    total += std::log(sum) - (s.logits[static_cast<std::size_t>(s.true_label)] - mx) / temperature;
  }
  return total / static_cast<double>(samples.size());
}

struct TemperatureSearch {
  double min_temperature = 0.01;
  double max_temperature = 100.0;
  double tolerance = 1e-6;
};

/// Temperature minimizing the validation NLL. The NLL is convex in 1/T, so
/// a golden-section search over 1/T finds the global minimum.
inline double temperature_scale(std::span<const CalibrationSample> validation, const TemperatureSearch& search = {}) {
  if (validation.size() < 2) throw CalibrationError("temperature scaling needs at least two samples");
  const auto width = validation.front().logits.size();
  bool informative = false;
  int first_label = validation.front().true_label;
  bool two_labels = false;
  for (const auto& s : validation) {
    if (s.logits.size() != width || width < 2) throw CalibrationError("logit vectors must share one length >= 2");
    if (s.true_label < 0 || static_cast<std::size_t>(s.true_label) >= width)
      throw CalibrationError("true label outside the logit vector");
    for (double z : s.logits)
      if (!std::isfinite(z)) throw CalibrationError("logits must be finite");
    const auto [lo, hi] = std::minmax_element(s.logits.begin(), s.logits.end());
    informative = informative || *hi > *lo;
    two_labels = two_labels || s.true_label != first_label;
  }
  if (!two_labels) throw CalibrationError("temperature scaling needs at least two distinct labels");
  if (!informative) throw CalibrationError("all logit vectors are constant; temperature is unidentifiable");

  auto f = [&](double inv_t) { return mean_nll(validation, 1.0 / inv_t); };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 1.0 / search.max_temperature;
  double b = 1.0 / search.min_temperature;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  // stop once the bracket is narrower than `tolerance` in temperature units
  while ((1.0 / a - 1.0 / b) > search.tolerance && (b - a) > 1e-15) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 2.0 / (a + b);
}

// ---------------------------------------------------------------------------
// Synthetic candidate pool

struct BankScheme {
  int pool_size = 1200;
  int validation_size = 600;
  int n_classes = 16;
  double distortion_temperature = 1.8;  // over-confidence of the raw logits
  std::array<int, 3> scenario_quota = {10, 10, 10};
  int low_confidence_count = 15;
  int max_attempts = 1000;

  int bank_size() const { return scenario_quota[0] + scenario_quota[1] + scenario_quota[2]; }
};

struct PoolItem {
  std::vector<double> logits;  // raw (uncalibrated) classifier output
  int true_label = 0;
  int ai_label = 0;
  int disagreement = 0;
  double confidence = 0.0;  // after temperature scaling
};

struct TaskPool {
  std::uint64_t seed = 0;
  double temperature = 1.0;  // fitted on the validation split
  std::vector<PoolItem> items;
};

namespace detail {

// Logits whose softmax has maximum `target` at index `top`. The other
// classes sit at -a * u_j; `a` is found by bisection (max prob increases in a).
inline std::vector<double> logits_with_confidence(double target, int n_classes, int top, Rng& rng) {
  std::vector<double> u(static_cast<std::size_t>(n_classes));
  for (auto& x : u) x = rng.uniform(0.2, 1.0);
  auto top_prob = [&](double a) {
    double sum = 1.0;
    for (int j = 0; j < n_classes; ++j)
      if (j != top) sum += std::exp(-a * u[static_cast<std::size_t>(j)]);
    return 1.0 / sum;
  };
  double lo = 0.0, hi = 1.0;
  while (top_prob(hi) < target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (top_prob(mid) < target ? lo : hi) = mid;
  }
  const double a = 0.5 * (lo + hi);
  std::vector<double> z(static_cast<std::size_t>(n_classes));
  for (int j = 0; j < n_classes; ++j) z[static_cast<std::size_t>(j)] = j == top ? 0.0 : -a * u[static_cast<std::size_t>(j)];
  return z;
}

inline int sample_categorical(std::span<const double> probs, Rng& rng) {
  double u = rng.uniform();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    u -= probs[i];
    if (u < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

// Confidence drawn uniformly over a bin chosen uniformly. The lowest bin is
// centred on its midpoint (1/16 .. 3/16) because a 16-way softmax cannot go
// below 1/16, which keeps its expected accuracy at 0.125.
inline double draw_true_confidence(int n_classes, Rng& rng) {
  const double floor_p = 1.0 / n_classes + 1e-6;
  for (;;) {
    const auto bin = static_cast<int>(rng.below(4));
    double lo = 0.25 * bin;
    double hi = std::min(lo + 0.25, 0.999);
    if (hi <= floor_p) continue;
    if (lo < floor_p) {
      const double mid = lo + 0.125;
      lo = floor_p;
      if (2.0 * mid - lo > lo) hi = 2.0 * mid - lo;
    }
    return rng.uniform(lo, hi);
  }
}

struct RawDraw {
  std::vector<double> logits;
  int true_label;
  int ai_label;
};

// One classifier output: calibrated probabilities q with max `c`, the label
// drawn from q, raw logits sharpened by the distortion temperature.
inline RawDraw draw_classifier_output(const BankScheme& scheme, Rng& rng) {
  const double c = draw_true_confidence(scheme.n_classes, rng);
  const int top = static_cast<int>(rng.below(static_cast<std::uint64_t>(scheme.n_classes)));
  auto z = logits_with_confidence(c, scheme.n_classes, top, rng);
  const auto q = softmax(z);
  RawDraw d;
  d.true_label = sample_categorical(q, rng);
  d.ai_label = top;
  for (double& v : z) v *= scheme.distortion_temperature;
  d.logits = std::move(z);
  return d;
}

}  // namespace detail

inline void validate(const BankScheme& s) {
  if (s.n_classes < 2) throw SelectionError("need at least two classes");
  if (s.pool_size < s.bank_size() || s.validation_size < 2) throw SelectionError("pool or validation split too small");
  if (std::any_of(s.scenario_quota.begin(), s.scenario_quota.end(), [](int q) { return q < 0; }))
    throw SelectionError("scenario quotas must be >= 0");
  if (s.low_confidence_count < 0 || s.low_confidence_count > s.bank_size())
    throw SelectionError("low-confidence count must lie in 0..bank size");
  if (!(s.distortion_temperature > 0.0)) throw SelectionError("distortion temperature must be > 0");
}

/// Synthetic stand-in for an annotated image corpus: a validation split for
/// temperature scaling and a candidate pool with six-annotator disagreement.
inline TaskPool build_pool(std::uint64_t seed, const BankScheme& scheme = {}) {
  validate(scheme);
  Rng rng(derive_seed(seed, 0x706f6f6c));
  TaskPool pool;
  pool.seed = seed;

  std::vector<CalibrationSample> validation;
  validation.reserve(static_cast<std::size_t>(scheme.validation_size));
  for (int i = 0; i < scheme.validation_size; ++i) {
    auto d = detail::draw_classifier_output(scheme, rng);
    validation.push_back({std::move(d.logits), d.true_label});
  }
  pool.temperature = temperature_scale(validation);

  pool.items.reserve(static_cast<std::size_t>(scheme.pool_size));
  for (int i = 0; i < scheme.pool_size; ++i) {
    auto d = detail::draw_classifier_output(scheme, rng);
    PoolItem item;
    item.true_label = d.true_label;
    item.ai_label = d.ai_label;
    item.confidence = calibrated_confidence(d.logits, pool.temperature);
    item.logits = std::move(d.logits);
    // annotator skill independent of the classifier
    const double p_h = rng.uniform(0.05, 0.95);
    for (int a = 0; a < kAnnotators; ++a) item.disagreement += rng.bernoulli(1.0 - p_h) ? 1 : 0;
    pool.items.push_back(std::move(item));
  }
  return pool;
}

inline std::string synthetic_stimulus_ref(std::uint64_t pool_seed, std::size_t pool_index) {
  return "synthetic:" + std::to_string(pool_seed) + ":" + std::to_string(pool_index);
}

namespace detail {

inline TaskInstance make_instance(const TaskPool& pool, std::size_t index, std::string id) {
  const auto& item = pool.items[index];
  TaskInstance t;
  t.id = std::move(id);
  t.true_label = item.true_label;
  t.ai_label = item.ai_label;
  t.ai_confidence = item.confidence;
  t.confidence_bin = bin_confidence(item.confidence);
  t.annotator_disagreement = item.disagreement;
  t.p_h_proxy = human_accuracy_proxy(item.disagreement);
  t.scenario = classify_scenario(item.disagreement, item.ai_label == item.true_label);
  t.stimulus_ref = synthetic_stimulus_ref(pool.seed, index);
  return t;
}

struct SelectionSlot {
  ConfidenceBin bin;
  bool correct;
  Scenario scenario;
};

}  // namespace detail

/// Select the bank: bin counts split the low/high confidence halves, slot
/// correctness is drawn from the pool's per-bin accuracy (so bins stay
/// calibrated), and scenario quotas are met by choosing the annotator
/// disagreement class of each slot.
inline std::vector<TaskInstance> select_bank(const TaskPool& pool, std::uint64_t seed, const BankScheme& scheme = {}) {
  validate(scheme);
  Rng rng(derive_seed(seed, 0x62616e6b));
  const int total = scheme.bank_size();
  const int q1 = scheme.scenario_quota[0];
  const int q2 = scheme.scenario_quota[1];
  const int q3 = scheme.scenario_quota[2];

  // cells keyed by (bin, correct, hard-for-humans)
  std::map<std::tuple<int, bool, bool>, std::vector<std::size_t>> cells;
  std::array<std::vector<std::size_t>, 4> by_bin;
  for (std::size_t i = 0; i < pool.items.size(); ++i) {
    const auto& it = pool.items[i];
    const auto b = static_cast<int>(bin_confidence(it.confidence));
    cells[{b, it.ai_label == it.true_label, it.disagreement >= kHighDisagreement}].push_back(i);
    by_bin[static_cast<std::size_t>(b)].push_back(i);
  }

  auto split = [&](int count) {
    int first = count / 2;
    if (count % 2 == 1 && rng.bernoulli(0.5)) ++first;
    return std::pair{first, count - first};
  };

  for (int attempt = 0; attempt < scheme.max_attempts; ++attempt) {
    const auto [n_vlow, n_low] = split(scheme.low_confidence_count);
    const auto [n_high, n_vhigh] = split(total - scheme.low_confidence_count);
    const std::array<int, 4> bin_counts = {n_vlow, n_low, n_high, n_vhigh};

    std::vector<detail::SelectionSlot> slots;
    bool bins_ok = true;
    for (std::size_t b = 0; b < 4; ++b) {
      if (bin_counts[b] > 0 && by_bin[b].empty()) bins_ok = false;
      for (int k = 0; k < bin_counts[b] && bins_ok; ++k) {
        const auto& items = by_bin[b];
        const auto& it = pool.items[items[rng.below(items.size())]];
        slots.push_back({static_cast<ConfidenceBin>(b), it.ai_label == it.true_label, Scenario::S1});
      }
    }
    if (!bins_ok) throw SelectionError("pool has no instances in a required confidence bin");

    std::vector<std::size_t> correct_slots, wrong_slots;
    for (std::size_t i = 0; i < slots.size(); ++i) (slots[i].correct ? correct_slots : wrong_slots).push_back(i);
    if (static_cast<int>(correct_slots.size()) < q2 || static_cast<int>(wrong_slots.size()) < q3) continue;

    rng.shuffle(std::span(correct_slots));
    rng.shuffle(std::span(wrong_slots));
    for (int k = 0; k < q2; ++k) slots[correct_slots[static_cast<std::size_t>(k)]].scenario = Scenario::S2;
    for (int k = 0; k < q3; ++k) slots[wrong_slots[static_cast<std::size_t>(k)]].scenario = Scenario::S3;

    // draw concrete pool items per cell without replacement
    std::map<std::tuple<int, bool, bool>, std::vector<std::size_t>> remaining = cells;
    std::vector<std::size_t> chosen;
    bool feasible = true;
    for (const auto& slot : slots) {
      const bool hard = slot.scenario == Scenario::S2 || (slot.scenario == Scenario::S1 && !slot.correct);
      auto& cell = remaining[{static_cast<int>(slot.bin), slot.correct, hard}];
      if (cell.empty()) {
        feasible = false;
        break;
      }
      const auto pick = rng.below(cell.size());
      chosen.push_back(cell[pick]);
      cell.erase(cell.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    if (!feasible) continue;

    rng.shuffle(std::span(chosen));
    std::vector<TaskInstance> bank;
    bank.reserve(chosen.size());
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      std::ostringstream id;
      id << "t" << std::setw(2) << std::setfill('0') << (i + 1);
      bank.push_back(detail::make_instance(pool, chosen[i], id.str()));
    }
    std::array<int, 3> counts{};
    for (const auto& t : bank) ++counts[static_cast<std::size_t>(t.scenario)];
    if (counts != std::array<int, 3>{q1, q2, q3}) throw SelectionError("internal: scenario quotas not met");
    return bank;
  }
  throw SelectionError("could not satisfy the selection scheme within the attempt budget");
}

inline std::vector<TaskInstance> build_bank(std::uint64_t seed, const BankScheme& scheme = {}) {
  return select_bank(build_pool(seed, scheme), seed, scheme);
}

/// Practice instances drawn from the pool, disjoint from the bank.
inline std::vector<TaskInstance> select_training(const TaskPool& pool, std::span<const TaskInstance> bank,
                                                 int count, std::uint64_t seed) {
  std::vector<std::string> used;
  for (const auto& t : bank) used.push_back(t.stimulus_ref);
  Rng rng(derive_seed(seed, 0x747261696e));
  std::vector<TaskInstance> out;
  for (int guard = 0; static_cast<int>(out.size()) < count && guard < 100000; ++guard) {
    const auto idx = static_cast<std::size_t>(rng.below(pool.items.size()));
    const auto ref = synthetic_stimulus_ref(pool.seed, idx);
    if (std::find(used.begin(), used.end(), ref) != used.end()) continue;
    used.push_back(ref);
    out.push_back(detail::make_instance(pool, idx, "train" + std::to_string(out.size() + 1)));
  }
  if (static_cast<int>(out.size()) < count) throw SelectionError("pool too small for training instances");
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic stimuli

inline constexpr int kGlyphSize = 12;

/// Noisy glyph grid for a synthetic stimulus: the class template with a
/// fraction of cells flipped that grows with annotator disagreement.
/// Rows are '#'/'.' strings joined by '\n'.
inline std::string render_glyph(const TaskInstance& t) {
  Rng templ(derive_seed(0x676c797068, static_cast<std::uint64_t>(t.true_label)));
  std::uint64_t h = 1469598103934665603ULL;
  for (char ch : t.stimulus_ref) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ULL;
  Rng noise(h);
  const double flip = 0.05 + 0.4 * static_cast<double>(t.annotator_disagreement) / kAnnotators;
  std::string out;
  for (int r = 0; r < kGlyphSize; ++r) {
    for (int c = 0; c < kGlyphSize; ++c) {
      bool on = templ.bernoulli(0.45);
      if (noise.bernoulli(flip)) on = !on;
      out.push_back(on ? '#' : '.');
    }
    if (r + 1 < kGlyphSize) out.push_back('\n');
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifest I/O: one JSON object per line, fixed field order.

inline nlohmann::ordered_json to_json(const TaskInstance& t) {
  nlohmann::ordered_json j;
  j["id"] = t.id;
  j["true_label"] = t.true_label;
  j["ai_label"] = t.ai_label;
  j["ai_confidence"] = t.ai_confidence;
  j["confidence_bin"] = std::string(to_string(t.confidence_bin));
  j["disagreement"] = t.annotator_disagreement;
  j["scenario"] = std::string(to_string(t.scenario));
  j["stimulus_ref"] = t.stimulus_ref;
  return j;
}

inline TaskInstance instance_from_json(const nlohmann::json& j) {
  try {
    TaskInstance t;
    t.id = j.at("id").get<std::string>();
    t.true_label = j.at("true_label").get<int>();
    t.ai_label = j.at("ai_label").get<int>();
    t.ai_confidence = j.at("ai_confidence").get<double>();
    t.confidence_bin = confidence_bin_from_string(j.at("confidence_bin").get<std::string>());
    t.annotator_disagreement = j.at("disagreement").get<int>();
    t.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    t.stimulus_ref = j.at("stimulus_ref").get<std::string>();
    t.p_h_proxy = human_accuracy_proxy(t.annotator_disagreement);
    validate(t);
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad manifest record: ") + e.what());
  }
}

inline void write_manifest(std::ostream& os, std::span<const TaskInstance> bank) {
  for (const auto& t : bank) os << to_json(t).dump() << '\n';
}

inline std::vector<TaskInstance> read_manifest(std::istream& is) {
  std::vector<TaskInstance> bank;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      bank.push_back(instance_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return bank;
}

inline void save_manifest(const std::string& path, std::span<const TaskInstance> bank) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write manifest " + path);
  write_manifest(os, bank);
}

inline std::vector<TaskInstance> load_manifest(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot read manifest " + path);
  return read_manifest(is);
}

}  // namespace inclab
