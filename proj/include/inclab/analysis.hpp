#pragma once

// Weighted analysis of decision records: per-participant proportions,
// inverse-variance weights with the 125% rule, within-arm winsorization,
// weighted Welch tests with Bonferroni correction, task-completion tests and
// the cognitive-load mediation model.

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "inclab/mediation.hpp"
#include "inclab/records.hpp"
#include "inclab/stats.hpp"

namespace inclab {

enum class Metric { accuracy, reliance, arbitrage };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::accuracy: return "accuracy";
    case Metric::reliance: return "reliance";
    case Metric::arbitrage: return "arbitrage";
  }
  return "?";
}

using RecordFilter = std::function<bool(const DecisionRecord&)>;

struct ParticipantProportion {
  std::string participant_id;
  double n = 0;
  double k = 0;
  double value() const { return k / n; }
};

struct ArmSample {
  std::vector<ParticipantProportion> members;
  std::vector<double> weights;  // winsorized
  std::string error;            // set when no weights could be formed

  WeightedSample sample() const {
    WeightedSample s;
    for (const auto& m : members) s.values.push_back(m.value());
    s.weights = weights;
    return s;
  }
  double weighted_mean() const { return weighted_moments(sample()).mean; }
};

inline bool counts_toward(Metric m, const DecisionRecord& r) {
  switch (m) {
    case Metric::accuracy: return r.correct;
    case Metric::reliance: return r.meta_choice == MetaDecision::accept;
    case Metric::arbitrage: return r.meta_choice == MetaDecision::solve && r.matched_ai_advice;
  }
  return false;
}

/// Per-participant counts of `metric` over the records of one arm that pass
/// `filter`, in first-appearance order.
inline std::vector<ParticipantProportion> proportions(std::span<const DecisionRecord> records, TreatmentKind arm,
                                                      Metric metric, const RecordFilter& filter = {}) {
  std::vector<ParticipantProportion> out;
  std::map<std::string, std::size_t> index;
  for (const auto& r : records) {
    if (r.treatment != arm || (filter && !filter(r))) continue;
    auto [it, inserted] = index.try_emplace(r.participant_id, out.size());
    if (inserted) out.push_back({r.participant_id, 0, 0});
    auto& p = out[it->second];
    p.n += 1;
    p.k += counts_toward(metric, r) ? 1 : 0;
  }
  return out;
}

/// Raw inverse-variance weights for one arm with the 125% rule applied.
/// Accuracy uses the sample variance of the 0/1 outcomes (members with
/// n < 2 must be removed first); reliance and arbitrage use n / (p (1-p)).
inline std::vector<double> precision_weights(std::span<const ParticipantProportion> members, Metric metric) {
  if (metric == Metric::accuracy) {
    std::vector<double> raw;
    for (const auto& m : members) raw.push_back(accuracy_weight_from_counts(m.n, m.k));
    return resolve_weights(std::move(raw));
  }
  std::vector<RelianceObservation> obs;
  for (const auto& m : members) obs.push_back({m.n, m.value()});
  return reliance_weights(obs);
}

struct WeightingOptions {
  double lower_pct = 5.0;
  double upper_pct = 95.0;
};

inline ArmSample arm_sample(std::span<const DecisionRecord> records, TreatmentKind arm, Metric metric,
                            const RecordFilter& filter = {}, const WeightingOptions& opt = {}) {
  ArmSample s;
  s.members = proportions(records, arm, metric, filter);
  if (metric == Metric::accuracy) std::erase_if(s.members, [](const auto& m) { return m.n < 2; });
  if (s.members.empty()) return s;
  try {
    s.weights = winsorize_weights(precision_weights(s.members, metric), opt.lower_pct, opt.upper_pct);
  } catch (const StatsError& e) {
    s.error = e.what();
  }
  return s;
}

struct Comparison {
  std::string family;
  std::string label;
  std::string treatment;
  std::string reference;
  double treatment_mean = 0.0;
  double reference_mean = 0.0;
  std::size_t n_treatment = 0;
  std::size_t n_reference = 0;
  TestResult test;
  bool valid = false;
  std::string note;
};

inline Comparison compare(const std::string& family, const std::string& label, const std::string& treatment_name,
                          const ArmSample& treatment, const std::string& reference_name, const ArmSample& reference) {
  Comparison c;
  c.family = family;
  c.label = label;
  c.treatment = treatment_name;
  c.reference = reference_name;
  c.n_treatment = treatment.members.size();
  c.n_reference = reference.members.size();
  if (!treatment.error.empty() || !reference.error.empty()) {
    c.note = !treatment.error.empty() ? treatment.error : reference.error;
    return c;
  }
  try {
    const auto a = treatment.sample();
    const auto b = reference.sample();
    if (!a.values.empty()) c.treatment_mean = weighted_moments(a).mean;
    if (!b.values.empty()) c.reference_mean = weighted_moments(b).mean;
    c.test = weighted_welch_t(a, b);
    c.valid = true;
  } catch (const StatsError& e) {
    c.note = e.what();
  }
  return c;
}

inline void correct_family(std::span<Comparison> family) {
  const int m = static_cast<int>(family.size());
  for (auto& c : family)
    if (c.valid) c.test.p_corrected = bonferroni(c.test.p_raw, m);
}

struct ArmMean {
  std::string metric;
  std::string treatment;
  std::string subset;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
};

/// Two-sided t quantile by bisection on the tail probability.
inline double t_quantile_upper(double alpha_two_sided, double df) {
  double lo = 0.0, hi = 1.0;
  while (tail_probability(Distribution::t, hi, {df}, Tail::two_sided) > alpha_two_sided) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tail_probability(Distribution::t, mid, {df}, Tail::two_sided) > alpha_two_sided ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline ArmMean arm_mean(const std::string& metric, const std::string& treatment, const std::string& subset,
                        const ArmSample& s) {
  ArmMean m{metric, treatment, subset, 0.0, 0.0, 0.0, s.members.size()};
  if (s.members.empty() || !s.error.empty()) {
    m.mean = m.ci_low = m.ci_high = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  const auto mom = weighted_moments(s.sample());
  m.mean = mom.mean;
  if (mom.n_eff > 1.0) {
    const double half = t_quantile_upper(0.05, mom.n_eff - 1.0) * std::sqrt(mom.variance / mom.n_eff);
    m.ci_low = m.mean - half;
    m.ci_high = m.mean + half;
  } else {
    m.ci_low = m.ci_high = m.mean;
  }
  return m;
}

struct CompletionAnalysis {
  std::map<std::string, double> mean_completed;
  std::optional<TestResult> kruskal_wallis;
  std::optional<TestResult> levene;
  struct KsRow {
    std::string a, b;
    TestResult result;  // D = sup(F_a - F_b)
  };
  std::vector<KsRow> ks;
  std::vector<std::string> notes;
};

struct MediationTable {
  bool available = false;
  std::string note;
  std::string treatment;
  std::vector<std::string> coefficient_names;
  MediationResult result;
};

struct AnalysisOptions {
  WeightingOptions weighting;
  int mediation_sims = 5000;
  std::uint64_t mediation_seed = 1;
  unsigned threads = 0;
};

struct AnalysisReport {
  std::vector<std::string> arms;
  std::size_t excluded_participants = 0;
  std::vector<std::string> warnings;
  CompletionAnalysis completion;
  std::vector<Comparison> comparisons;
  std::vector<ArmMean> means;
  MediationTable mediation;

  const Comparison* find(std::string_view family, std::string_view label) const {
    for (const auto& c : comparisons)
      if (c.family == family && c.label == label) return &c;
    return nullptr;
  }
  const ArmMean* find_mean(std::string_view metric, std::string_view treatment, std::string_view subset = "all") const {
    for (const auto& m : means)
      if (m.metric == metric && m.treatment == treatment && m.subset == subset) return &m;
    return nullptr;
  }
};

namespace detail {

inline bool bonus_eligible_bin(const DecisionRecord& r) { return is_low_confidence(r.confidence_bin); }

// Within-participant comparison of reliance on bonus vs non-bonus instances
// for one arm. Each participant's two subset weights (each with the group
// 125% rule and winsorization) are merged by their harmonic mean.
inline Comparison bonus_reliance_comparison(std::span<const DecisionRecord> records, TreatmentKind arm,
                                            const WeightingOptions& opt) {
  const auto with = proportions(records, arm, Metric::reliance, bonus_eligible_bin);
  const auto without = proportions(records, arm, Metric::reliance, [](const DecisionRecord& r) { return !bonus_eligible_bin(r); });
  std::map<std::string, std::size_t> idx_without;
  for (std::size_t i = 0; i < without.size(); ++i) idx_without[without[i].participant_id] = i;

  std::vector<ParticipantProportion> a, b;
  for (const auto& p : with) {
    auto it = idx_without.find(p.participant_id);
    if (it == idx_without.end()) continue;
    a.push_back(p);
    b.push_back(without[it->second]);
  }
  ArmSample sa, sb;
  sa.members = a;
  sb.members = b;
  if (a.size() >= 2) {
    try {
      const auto wa = winsorize_weights(precision_weights(a, Metric::reliance), opt.lower_pct, opt.upper_pct);
      const auto wb = winsorize_weights(precision_weights(b, Metric::reliance), opt.lower_pct, opt.upper_pct);
      for (std::size_t i = 0; i < a.size(); ++i) sa.weights.push_back(harmonic_mean_weight(wa[i], wb[i]));
      sb.weights = sa.weights;
    } catch (const StatsError& e) {
      sa.error = e.what();
    }
  } else {
    sa.weights.assign(a.size(), 1.0);
    sb.weights.assign(b.size(), 1.0);
  }
  const std::string name(to_string(arm));
  return compare("reliance_bonus", "With vs. without bonus", name + ":bonus", sa, name + ":no_bonus", sb);
}

}  // namespace detail

inline AnalysisReport analyze(std::span<const DecisionRecord> all_records, std::span<const ParticipantSummary> summaries,
                              const AnalysisOptions& opt = {}) {
  AnalysisReport report;

  // drop excluded participants
  std::map<std::string, const ParticipantSummary*> by_id;
  for (const auto& s : summaries) by_id[s.participant_id] = &s;
  std::vector<DecisionRecord> records;
  for (const auto& r : all_records) {
    auto it = by_id.find(r.participant_id);
    if (it != by_id.end() && it->second->excluded) continue;
    records.push_back(r);
  }
  for (const auto& s : summaries) report.excluded_participants += s.excluded ? 1 : 0;

  auto metrics = compute_metrics(records, summaries);
  report.warnings = metrics.warnings;
  std::erase_if(metrics.summaries, [](const auto& s) { return s.excluded; });

  constexpr std::array kinds = {TreatmentKind::baseline, TreatmentKind::static_bonus, TreatmentKind::dynamic_bonus};
  std::map<TreatmentKind, bool> present;
  for (const auto& s : metrics.summaries) present[s.treatment] = true;
  for (auto k : kinds)
    if (present[k]) report.arms.emplace_back(to_string(k));

  const auto& W = opt.weighting;
  const auto B = TreatmentKind::baseline;
  const auto S = TreatmentKind::static_bonus;
  const auto D = TreatmentKind::dynamic_bonus;
  const auto name = [](TreatmentKind k) { return std::string(to_string(k)); };

  // --- task completion ---
  {
    std::vector<std::vector<double>> groups;
    std::vector<std::string> names;
    for (auto k : kinds) {
      if (!present[k]) continue;
      std::vector<double> g;
      for (const auto& s : metrics.summaries)
        if (s.treatment == k) g.push_back(s.n_i);
      report.completion.mean_completed[name(k)] = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
      groups.push_back(std::move(g));
      names.push_back(name(k));
    }
    if (groups.size() >= 2) {
      try {
        report.completion.kruskal_wallis = kruskal_wallis(groups);
      } catch (const StatsError& e) {
        report.completion.notes.push_back(std::string("Kruskal-Wallis: ") + e.what());
      }
      try {
        report.completion.levene = levene(groups);
      } catch (const StatsError& e) {
        report.completion.notes.push_back(std::string("Levene: ") + e.what());
      }
      for (std::size_t i = 0; i < groups.size(); ++i)
        for (std::size_t j = 0; j < groups.size(); ++j)
          if (i != j) report.completion.ks.push_back({names[i], names[j], ks_one_sided(groups[i], groups[j])});
    }
  }

  // --- weighted means for plotting ---
  const std::vector<std::pair<std::string, RecordFilter>> subsets = {
      {"all", {}},
      {"S1", [](const DecisionRecord& r) { return r.scenario == Scenario::S1; }},
      {"S2", [](const DecisionRecord& r) { return r.scenario == Scenario::S2; }},
      {"S3", [](const DecisionRecord& r) { return r.scenario == Scenario::S3; }},
      {"bonus_eligible", detail::bonus_eligible_bin},
      {"not_bonus_eligible", [](const DecisionRecord& r) { return !detail::bonus_eligible_bin(r); }},
  };
  for (auto metric : {Metric::accuracy, Metric::reliance, Metric::arbitrage})
    for (auto k : kinds)
      if (present[k])
        for (const auto& [subset, filter] : subsets)
          report.means.push_back(arm_mean(std::string(to_string(metric)), name(k), subset, arm_sample(records, k, metric, filter, W)));

  // --- treatment vs baseline families ---
  auto family_vs_baseline = [&](Metric metric, const std::string& family, const std::string& label, const RecordFilter& f) {
    if (!present[B]) return;
    const auto base = arm_sample(records, B, metric, f, W);
    std::vector<Comparison> fam;
    for (auto k : {S, D}) {
      if (!present[k]) continue;
      fam.push_back(compare(family, label, name(k), arm_sample(records, k, metric, f, W), name(B), base));
    }
    correct_family(fam);
    report.comparisons.insert(report.comparisons.end(), fam.begin(), fam.end());
  };

  for (auto metric : {Metric::accuracy, Metric::reliance}) {
    const std::string m(to_string(metric));
    family_vs_baseline(metric, m + "_overall", "Overall", {});
    for (std::size_t i = 1; i <= 3; ++i) family_vs_baseline(metric, m + "_scenario", subsets[i].first, subsets[i].second);
  }

  // reliance ordering across all three arms
  {
    std::vector<Comparison> fam;
    auto rel = [&](TreatmentKind k) { return arm_sample(records, k, Metric::reliance, {}, W); };
    if (present[S] && present[B]) fam.push_back(compare("reliance_pairwise", "Static vs. Baseline", name(S), rel(S), name(B), rel(B)));
    if (present[D] && present[B]) fam.push_back(compare("reliance_pairwise", "Dynamic vs. Baseline", name(D), rel(D), name(B), rel(B)));
    if (present[S] && present[D]) fam.push_back(compare("reliance_pairwise", "Static vs. Dynamic", name(S), rel(S), name(D), rel(D)));
    correct_family(fam);
    report.comparisons.insert(report.comparisons.end(), fam.begin(), fam.end());
  }

  // accuracy: dynamic vs baseline within bonus / no-bonus partitions
  if (present[B] && present[D]) {
    std::vector<Comparison> fam;
    for (std::size_t i : {std::size_t{4}, std::size_t{5}}) {
      const auto& [subset, filter] = subsets[i];
      fam.push_back(compare("accuracy_bonus", subset, name(D), arm_sample(records, D, Metric::accuracy, filter, W), name(B),
                            arm_sample(records, B, Metric::accuracy, filter, W)));
    }
    correct_family(fam);
    report.comparisons.insert(report.comparisons.end(), fam.begin(), fam.end());
  }

  // reliance on bonus vs non-bonus instances within the dynamic arm
  if (present[D]) report.comparisons.push_back(detail::bonus_reliance_comparison(records, D, W));

  // arbitrage: static vs the other arms, plus dynamic vs baseline
  {
    std::vector<Comparison> fam;
    auto arb = [&](TreatmentKind k) { return arm_sample(records, k, Metric::arbitrage, {}, W); };
    if (present[S] && present[B]) fam.push_back(compare("arbitrage", "Static vs. Baseline", name(S), arb(S), name(B), arb(B)));
    if (present[S] && present[D]) fam.push_back(compare("arbitrage", "Static vs. Dynamic", name(S), arb(S), name(D), arb(D)));
    if (present[D] && present[B]) fam.push_back(compare("arbitrage", "Dynamic vs. Baseline", name(D), arb(D), name(B), arb(B)));
    correct_family(fam);
    report.comparisons.insert(report.comparisons.end(), fam.begin(), fam.end());
  }

  // --- mediation: treatment -> cognitive load -> completion ---
  if (present[B] && present[D]) {
    MediationData md;
    std::map<TreatmentKind, int> level;
    level[B] = 0;
    int next = 1;
    for (auto k : {S, D})
      if (present[k]) level[k] = next++;
    md.n_arms = next;
    bool have_load = true;
    for (const auto& s : metrics.summaries) {
      if (!s.has_cognitive_load()) {
        have_load = false;
        break;
      }
      md.arm.push_back(level[s.treatment]);
      md.mediator.push_back(s.cognitive_load);
      md.outcome.push_back(s.n_i);
    }
    report.mediation.treatment = name(D);
    if (!have_load) {
      report.mediation.note = "cognitive load missing for some participants; mediation skipped";
    } else {
      try {
        MediationOptions mo;
        mo.n_sim = opt.mediation_sims;
        mo.seed = opt.mediation_seed;
        mo.threads = opt.threads;
        report.mediation.result = mediation_bootstrap(md, level[D], mo);
        report.mediation.available = true;
        report.mediation.coefficient_names.push_back("Intercept");
        for (auto k : {S, D})
          if (present[k]) report.mediation.coefficient_names.push_back(k == S ? "Static" : "Dynamic");
        report.mediation.coefficient_names.push_back("Cognitive Load");
      } catch (const StatsError& e) {
        report.mediation.note = e.what();
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report output

namespace detail {

inline std::string fmt(double x, int digits = 3) {
  if (!std::isfinite(x)) return "nan";
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << x;
  return os.str();
}

inline std::string fmt_p(double p) { return p < 0.001 ? "<0.001" : fmt(p, 3); }

inline std::string stars(double p) { return p < 0.001 ? "***" : p < 0.01 ? "**" : p < 0.05 ? "*" : ""; }

}  // namespace detail

inline void write_text_report(std::ostream& os, const AnalysisReport& r) {
  using detail::fmt;
  using detail::fmt_p;
  os << "Incentive experiment analysis\n";
  os << "=============================\n";
  os << "Arms: ";
  for (std::size_t i = 0; i < r.arms.size(); ++i) os << (i ? ", " : "") << r.arms[i];
  os << "\nExcluded participants: " << r.excluded_participants << "\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";

  os << "\nTask completion (instances processed)\n";
  for (const auto& [arm, mean] : r.completion.mean_completed) os << "  " << std::left << std::setw(10) << arm << fmt(mean) << "\n";
  if (r.completion.kruskal_wallis)
    os << "  Kruskal-Wallis H = " << fmt(r.completion.kruskal_wallis->statistic) << ", df = " << fmt(r.completion.kruskal_wallis->df, 0)
       << ", p = " << fmt_p(r.completion.kruskal_wallis->p_raw) << "\n";
  if (r.completion.levene)
    os << "  Levene W = " << fmt(r.completion.levene->statistic) << ", p = " << fmt_p(r.completion.levene->p_raw) << "\n";
  for (const auto& ks : r.completion.ks)
    os << "  KS one-sided sup(F_" << ks.a << " - F_" << ks.b << "): D = " << fmt(ks.result.statistic)
       << ", p = " << fmt_p(ks.result.p_raw) << "\n";
  for (const auto& n : r.completion.notes) os << "  note: " << n << "\n";
  os << "  (distributions are reported descriptively; no normality test is run)\n";

  std::string family;
  for (const auto& c : r.comparisons) {
    if (c.family != family) {
      family = c.family;
      os << "\n" << family << "\n";
      os << "  " << std::left << std::setw(24) << "subset" << std::setw(22) << "comparison" << std::right << std::setw(9) << "mean_t"
         << std::setw(9) << "mean_r" << std::setw(10) << "t" << std::setw(9) << "df" << std::setw(9) << "p" << std::setw(9) << "p_adj"
         << std::setw(8) << "d" << "\n";
    }
    os << "  " << std::left << std::setw(24) << c.label << std::setw(22) << (c.treatment + " vs " + c.reference) << std::right;
    if (!c.valid) {
      os << "  n/a (" << c.note << ")\n";
      continue;
    }
    os << std::setw(9) << fmt(c.treatment_mean) << std::setw(9) << fmt(c.reference_mean) << std::setw(10) << fmt(c.test.statistic, 2)
       << std::setw(9) << fmt(c.test.df, 1) << std::setw(9) << fmt_p(c.test.p_raw) << std::setw(9) << fmt_p(c.test.p_corrected)
       << std::setw(8) << fmt(c.test.effect_size) << " " << detail::stars(c.test.p_corrected) << "\n";
  }

  os << "\nMediation: " << r.mediation.treatment << " -> cognitive load -> task completion\n";
  if (!r.mediation.available) {
    os << "  n/a (" << r.mediation.note << ")\n";
    return;
  }
  const auto& m = r.mediation.result;
  os << "  " << std::left << std::setw(16) << "" << std::right << std::setw(12) << "load coeff" << std::setw(9) << "se"
     << std::setw(14) << "compl. coeff" << std::setw(9) << "se" << "\n";
  for (std::size_t i = 0; i < r.mediation.coefficient_names.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    os << "  " << std::left << std::setw(16) << r.mediation.coefficient_names[i] << std::right;
    if (idx < m.mediator_model.coefficients.size()) {
      os << std::setw(12) << (fmt(m.mediator_model.coefficients[idx]) + detail::stars(m.mediator_model.p_values[idx]))
         << std::setw(9) << fmt(m.mediator_model.std_errors[idx]);
    } else {
      os << std::setw(12) << "" << std::setw(9) << "";
    }
    os << std::setw(14) << (fmt(m.outcome_model.coefficients[idx]) + detail::stars(m.outcome_model.p_values[idx])) << std::setw(9)
       << fmt(m.outcome_model.std_errors[idx]) << "\n";
  }
  os << "  R^2 " << fmt(m.mediator_model.r_squared) << " / " << fmt(m.outcome_model.r_squared) << ", F "
     << fmt(m.mediator_model.f_statistic) << " / " << fmt(m.outcome_model.f_statistic) << "\n";
  os << "  Bootstrap (" << m.n_sim << " resamples, " << m.failed_resamples << " redrawn)\n";
  os << "  " << std::left << std::setw(16) << "" << std::right << std::setw(9) << "effect" << std::setw(9) << "se" << std::setw(9)
     << "llci" << std::setw(9) << "ulci" << std::setw(9) << "p" << "\n";
  auto row = [&](const char* label, const MediationEffect& e) {
    os << "  " << std::left << std::setw(16) << label << std::right << std::setw(9) << fmt(e.estimate) << std::setw(9) << fmt(e.boot_se)
       << std::setw(9) << fmt(e.ci_low) << std::setw(9) << fmt(e.ci_high) << std::setw(9) << fmt_p(e.p_value) << "\n";
  };
  row("ACME", m.acme);
  row("ADE", m.ade);
  row("Total Effect", m.total);
  row("Prop. Mediated", m.prop_mediated);
}

inline void write_comparisons_csv(std::ostream& os, const AnalysisReport& r) {
  os << "family,subset,treatment,reference,treatment_mean,reference_mean,n_treatment,n_reference,t,df,p_raw,p_corrected,cohens_d\n";
  os << std::setprecision(10);
  for (const auto& c : r.comparisons) {
    os << c.family << ',' << c.label << ',' << c.treatment << ',' << c.reference << ',' << c.treatment_mean << ','
       << c.reference_mean << ',' << c.n_treatment << ',' << c.n_reference << ',';
    if (c.valid) {
      os << c.test.statistic << ',' << c.test.df << ',' << c.test.p_raw << ',' << c.test.p_corrected << ',' << c.test.effect_size;
    } else {
      os << ",,,,";
    }
    os << '\n';
  }
}

inline void write_means_csv(std::ostream& os, const AnalysisReport& r) {
  os << "metric,treatment,subset,n,weighted_mean,ci95_low,ci95_high\n";
  os << std::setprecision(10);
  for (const auto& m : r.means)
    os << m.metric << ',' << m.treatment << ',' << m.subset << ',' << m.n << ',' << m.mean << ',' << m.ci_low << ',' << m.ci_high << '\n';
}

inline void write_completion_csv(std::ostream& os, std::span<const ParticipantSummary> summaries) {
  os << "participant_id,treatment,n_i,cognitive_load,excluded\n";
  os << std::setprecision(10);
  for (const auto& s : summaries)
    os << s.participant_id << ',' << to_string(s.treatment) << ',' << s.n_i << ','
       << (s.has_cognitive_load() ? detail::fmt(s.cognitive_load, 6) : "") << ',' << (s.excluded ? 1 : 0) << '\n';
}

}  // namespace inclab
