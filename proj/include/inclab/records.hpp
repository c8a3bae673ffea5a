#pragma once

// Shared decision-record schema for simulated and live sessions, and the
// per-participant metrics derived from it.

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "inclab/calibration.hpp"
#include "inclab/decision_model.hpp"
#include "inclab/error.hpp"
#include "inclab/task_bank.hpp"

namespace inclab {

struct DecisionRecord {
  std::string participant_id;
  TreatmentKind treatment = TreatmentKind::baseline;
  std::string instance_id;
  Scenario scenario = Scenario::S1;
  ConfidenceBin confidence_bin = ConfidenceBin::very_low;
  bool bonus_available = false;
  MetaDecision meta_choice = MetaDecision::accept;
  int submitted_label = 0;
  bool matched_ai_advice = false;
  bool correct = false;
  double time_spent_s = 0.0;
  double payout_delta = 0.0;

  bool operator==(const DecisionRecord&) const = default;
};

struct ParticipantSummary {
  std::string participant_id;
  TreatmentKind treatment = TreatmentKind::baseline;
  int n_i = 0;
  double accuracy = 0.0;
  double reliance_p_i = 0.0;
  double arbitrage_rate = 0.0;
  double cognitive_load = std::numeric_limits<double>::quiet_NaN();  // NaN when not measured
  double total_payout = 0.0;  // performance pay, excluding any base payment
  bool excluded = false;

  bool has_cognitive_load() const { return std::isfinite(cognitive_load); }
};

/// Payout of one main-task decision: gamma for a correct final answer, plus
/// the applicable bonus when the participant solved and was correct (even if
/// the answer matches the AI's advice).
inline double decision_payout(const TreatmentSpec& spec, double ai_confidence, MetaDecision choice, bool correct) {
  if (!correct) return 0.0;
  double pay = spec.gamma;
  if (choice == MetaDecision::solve) pay += spec.bonus_for(ai_confidence);
  return pay;
}

struct MetricsResult {
  std::vector<ParticipantSummary> summaries;
  std::vector<std::string> warnings;
};

/// Aggregate records per participant in first-appearance order. Roster
/// entries without records are dropped with a warning.
inline MetricsResult compute_metrics(std::span<const DecisionRecord> records,
                                     std::span<const ParticipantSummary> roster = {}) {
  MetricsResult out;
  std::map<std::string, std::size_t> index;
  struct Counts {
    int n = 0, correct = 0, accepts = 0, arbitrage = 0;
    double payout = 0.0;
  };
  std::vector<Counts> counts;
  for (const auto& r : records) {
    auto [it, inserted] = index.try_emplace(r.participant_id, out.summaries.size());
    if (inserted) {
      ParticipantSummary s;
      s.participant_id = r.participant_id;
      s.treatment = r.treatment;
      out.summaries.push_back(s);
      counts.emplace_back();
    }
    auto& c = counts[it->second];
    ++c.n;
    c.correct += r.correct ? 1 : 0;
    c.accepts += r.meta_choice == MetaDecision::accept ? 1 : 0;
    c.arbitrage += (r.meta_choice == MetaDecision::solve && r.matched_ai_advice) ? 1 : 0;
    c.payout += r.payout_delta;
  }
  for (std::size_t i = 0; i < out.summaries.size(); ++i) {
    auto& s = out.summaries[i];
    const auto& c = counts[i];
    const double n = c.n;
    s.n_i = c.n;
    s.accuracy = c.correct / n;
    s.reliance_p_i = c.accepts / n;
    s.arbitrage_rate = c.arbitrage / n;
    s.total_payout = c.payout;
  }
  for (const auto& r : roster) {
    const auto it = index.find(r.participant_id);
    if (it == index.end()) {
      out.warnings.push_back("participant " + r.participant_id + " has no decisions; excluded");
      continue;
    }
    auto& s = out.summaries[it->second];
    s.cognitive_load = r.cognitive_load;
    s.excluded = r.excluded;
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON lines

inline nlohmann::ordered_json to_json(const DecisionRecord& r) {
  nlohmann::ordered_json j;
  j["participant_id"] = r.participant_id;
  j["treatment"] = std::string(to_string(r.treatment));
  j["instance_id"] = r.instance_id;
  j["scenario"] = std::string(to_string(r.scenario));
  j["confidence_bin"] = std::string(to_string(r.confidence_bin));
  j["bonus_available"] = r.bonus_available;
  j["meta_choice"] = std::string(to_string(r.meta_choice));
  j["submitted_label"] = r.submitted_label;
  j["matched_ai_advice"] = r.matched_ai_advice;
  j["correct"] = r.correct;
  j["time_spent_s"] = r.time_spent_s;
  j["payout_delta"] = r.payout_delta;
  return j;
}

inline DecisionRecord decision_record_from_json(const nlohmann::json& j) {
  try {
    DecisionRecord r;
    r.participant_id = j.at("participant_id").get<std::string>();
    r.treatment = treatment_kind_from_string(j.at("treatment").get<std::string>());
    r.instance_id = j.at("instance_id").get<std::string>();
    r.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    r.confidence_bin = confidence_bin_from_string(j.at("confidence_bin").get<std::string>());
    r.bonus_available = j.at("bonus_available").get<bool>();
    r.meta_choice = meta_decision_from_string(j.at("meta_choice").get<std::string>());
    r.submitted_label = j.at("submitted_label").get<int>();
    r.matched_ai_advice = j.at("matched_ai_advice").get<bool>();
    r.correct = j.at("correct").get<bool>();
    r.time_spent_s = j.at("time_spent_s").get<double>();
    r.payout_delta = j.at("payout_delta").get<double>();
    if (r.meta_choice == MetaDecision::accept && !r.matched_ai_advice)
      throw FormatError("record " + r.participant_id + "/" + r.instance_id + ": accept must match the AI advice");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad decision record: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("bad decision record: ") + e.what());
  }
}

inline nlohmann::ordered_json to_json(const ParticipantSummary& s) {
  nlohmann::ordered_json j;
  j["participant_id"] = s.participant_id;
  j["treatment"] = std::string(to_string(s.treatment));
  j["n_i"] = s.n_i;
  j["accuracy"] = s.accuracy;
  j["reliance_p_i"] = s.reliance_p_i;
  j["arbitrage_rate"] = s.arbitrage_rate;
  if (s.has_cognitive_load()) {
    j["cognitive_load"] = s.cognitive_load;
  } else {
    j["cognitive_load"] = nullptr;
  }
  j["total_payout"] = s.total_payout;
  j["excluded"] = s.excluded;
  return j;
}

inline ParticipantSummary participant_summary_from_json(const nlohmann::json& j) {
  try {
    ParticipantSummary s;
    s.participant_id = j.at("participant_id").get<std::string>();
    s.treatment = treatment_kind_from_string(j.at("treatment").get<std::string>());
    s.n_i = j.at("n_i").get<int>();
    s.accuracy = j.at("accuracy").get<double>();
    s.reliance_p_i = j.at("reliance_p_i").get<double>();
    s.arbitrage_rate = j.at("arbitrage_rate").get<double>();
    const auto& cl = j.at("cognitive_load");
    s.cognitive_load = cl.is_null() ? std::numeric_limits<double>::quiet_NaN() : cl.get<double>();
    s.total_payout = j.at("total_payout").get<double>();
    s.excluded = j.value("excluded", false);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad participant summary: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("bad participant summary: ") + e.what());
  }
}

template <typename T>
void write_jsonl(std::ostream& os, std::span<const T> rows) {
  for (const auto& r : rows) os << to_json(r).dump() << '\n';
}

template <typename T, typename Parse>
std::vector<T> read_jsonl(std::istream& is, Parse parse) {
  std::vector<T> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      rows.push_back(parse(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

inline std::vector<DecisionRecord> read_records(std::istream& is) {
  return read_jsonl<DecisionRecord>(is, decision_record_from_json);
}

inline std::vector<ParticipantSummary> read_summaries(std::istream& is) {
  return read_jsonl<ParticipantSummary>(is, participant_summary_from_json);
}

inline std::vector<DecisionRecord> load_records(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot read records " + path);
  return read_records(is);
}

inline std::vector<ParticipantSummary> load_summaries(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot read summaries " + path);
  return read_summaries(is);
}

}  // namespace inclab
