#pragma once

// Live study sessions: consent -> comprehension -> tutorial -> training ->
// main (server-timed) -> questionnaire -> done, with two-strike exclusion at
// comprehension. Every accepted mutation is appended to an event log that
// rebuilds the server state on replay.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "inclab/config.hpp"
#include "inclab/records.hpp"

namespace inclab {

enum class Phase { consent, comprehension, tutorial, training, main, questionnaire, done, excluded };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::consent: return "consent";
    case Phase::comprehension: return "comprehension";
    case Phase::tutorial: return "tutorial";
    case Phase::training: return "training";
    case Phase::main: return "main";
    case Phase::questionnaire: return "questionnaire";
    case Phase::done: return "done";
    case Phase::excluded: return "excluded";
  }
  return "?";
}

inline Phase phase_from_string(std::string_view s) {
  for (auto p : {Phase::consent, Phase::comprehension, Phase::tutorial, Phase::training, Phase::main,
                 Phase::questionnaire, Phase::done, Phase::excluded})
    if (s == to_string(p)) return p;
  throw DomainError("unknown phase '" + std::string(s) + "'");
}

enum class SessionErrorCode { not_found, state, validation, timer_expired, capacity };

inline std::string_view to_string(SessionErrorCode c) {
  switch (c) {
    case SessionErrorCode::not_found: return "not_found";
    case SessionErrorCode::state: return "state_error";
    case SessionErrorCode::validation: return "validation_error";
    case SessionErrorCode::timer_expired: return "timer_expired";
    case SessionErrorCode::capacity: return "capacity_exceeded";
  }
  return "?";
}

class SessionError : public std::runtime_error {
 public:
  SessionError(SessionErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  SessionErrorCode code() const { return code_; }

 private:
  SessionErrorCode code_;
};

/// Seconds on the server's clock. Injectable for tests.
using Clock = std::function<double()>;

inline Clock steady_clock_seconds() {
  const auto start = std::chrono::steady_clock::now();
  return [start] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
}

struct ComprehensionItem {
  std::string id;
  std::string question;
  std::vector<std::string> options;
  int answer = 0;
};

/// Checks of the payment rules, authored per treatment.
inline std::vector<ComprehensionItem> comprehension_items(const TreatmentSpec& spec) {
  std::vector<ComprehensionItem> items;
  items.push_back({"reward", "When do you earn the per-instance reward?",
                   {"When my final answer is correct", "For every instance I see", "Only when I accept the AI's advice"},
                   0});
  switch (spec.kind) {
    case TreatmentKind::baseline:
      items.push_back({"bonus", "Is there an extra bonus for solving an instance yourself?",
                       {"No, every correct answer earns the same reward", "Yes, on every instance",
                        "Yes, on low-confidence instances"},
                       0});
      break;
    case TreatmentKind::static_bonus:
      items.push_back({"bonus", "When is the bonus paid?",
                       {"When I choose to solve myself and my answer is correct", "When I accept the AI's advice",
                        "On every instance regardless of my answer"},
                       0});
      break;
    case TreatmentKind::dynamic_bonus:
      items.push_back({"bonus", "On which instances can you earn a bonus?",
                       {"Only instances marked with a bonus badge (low AI confidence), when I solve myself and answer correctly",
                        "All instances", "Only instances where the AI is highly confident"},
                       0});
      break;
  }
  items.push_back({"time", "How long do you have for the main task?",
                   {"Five minutes in total", "Five minutes per instance", "Unlimited time"}, 0});
  return items;
}

inline std::vector<std::string> tutorial_steps(const TreatmentSpec& spec, double time_budget_s) {
  std::ostringstream pay;
  pay << std::fixed << std::setprecision(2);
  pay << "Each correct final answer earns \xC2\xA3" << spec.gamma << ".";
  if (spec.kind == TreatmentKind::static_bonus)
    pay << " If you choose to solve an instance yourself and answer correctly you earn an extra \xC2\xA3" << spec.theta_high_conf
        << ".";
  if (spec.kind == TreatmentKind::dynamic_bonus)
    pay << " Instances with a bonus badge (low AI confidence) pay an extra \xC2\xA3" << spec.theta_low_conf
        << " if you choose to solve them yourself and answer correctly.";
  std::ostringstream time;
  time << "You have " << time_budget_s / 60.0 << " minutes for as many of the 30 instances as you can complete.";
  return {"For each image the AI suggests a label and shows how confident it is.",
          "First decide: accept the AI's label, or solve the instance yourself and choose a label.", pay.str(),
          time.str(), "Two practice instances follow. They are not paid."};
}

struct DecisionSubmission {
  std::string instance_id;  // doubles as the idempotency token
  MetaDecision meta_choice = MetaDecision::accept;
  int submitted_label = 0;
  std::optional<double> client_elapsed;  // informational only
};

struct DecisionAck {
  std::string instance_id;
  Phase phase = Phase::training;  // phase the decision was made in
  double payout_delta = 0.0;
  double accrued_payout = 0.0;
  Phase next_phase = Phase::training;
  bool replayed = false;
};

struct PayoutStatement {
  double base_payment = 0.0;
  double performance_pay = 0.0;
  double total_payout = 0.0;
  double cognitive_load = 0.0;
};

struct SessionState {
  std::string session_id;
  std::size_t index = 0;  // creation order
  TreatmentSpec treatment;
  Phase phase = Phase::consent;
  int comprehension_attempts = 0;
  std::size_t instance_cursor = 0;  // within the current training/main sequence
  std::optional<double> main_started_at;
  double last_event_at = 0.0;
  double accrued_payout = 0.0;
  std::vector<TaskInstance> order;  // shuffled main instances
  std::vector<DecisionRecord> training_log;
  std::vector<DecisionRecord> decisions;  // main phase only
  std::map<std::string, DecisionAck> acks;
  double cognitive_load = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> tlx_scores;
  std::string free_text;
};

struct ExportFilter {
  std::optional<TreatmentKind> treatment;
  bool completed_only = false;
};

struct ExportData {
  std::vector<DecisionRecord> records;
  std::vector<ParticipantSummary> summaries;
};

struct SessionServerOptions {
  std::vector<TreatmentSpec> treatments;
  std::vector<TaskInstance> bank;
  std::vector<TaskInstance> training;
  double time_budget_s = 300.0;
  double base_payment = 1.00;
  int n_labels = 16;
  ServerSettings settings;
};

/// Bank, training instances and schedules for a server built from a study config.
inline SessionServerOptions server_options(const StudyConfig& cfg) {
  SessionServerOptions o;
  const auto& ex = cfg.experiment;
  o.treatments = ex.treatments;
  o.time_budget_s = ex.time_budget_s;
  o.base_payment = ex.base_payment;
  o.n_labels = ex.bank.scheme.n_classes;
  o.settings = cfg.server;
  o.bank = resolve_bank(ex.bank);
  if (cfg.server.training_manifest) {
    o.training = load_manifest(*cfg.server.training_manifest);
  } else if (cfg.server.training_count > 0) {
    const auto pool = build_pool(ex.bank.seed, ex.bank.scheme);
    o.training = select_training(pool, o.bank, cfg.server.training_count, ex.bank.seed);
  }
  return o;
}

class SessionServer {
 public:
  explicit SessionServer(SessionServerOptions opt, Clock clock = steady_clock_seconds())
      : opt_(std::move(opt)), clock_(std::move(clock)) {
    if (opt_.treatments.empty()) throw ConfigError("session server needs at least one treatment");
    if (opt_.bank.empty()) throw ConfigError("session server needs a task bank");
    if (static_cast<int>(opt_.training.size()) < opt_.settings.training_count)
      throw ConfigError("fewer training instances than training_count");
    opt_.training.resize(static_cast<std::size_t>(opt_.settings.training_count));
    for (const auto& t : opt_.treatments) validate(t);
    if (opt_.settings.event_log) {
      std::ifstream existing(*opt_.settings.event_log);
      if (existing) replay(existing);
      log_.open(*opt_.settings.event_log, std::ios::app | std::ios::binary);
      if (!log_) throw ConfigError("cannot open event log " + *opt_.settings.event_log);
    }
  }

  const SessionServerOptions& options() const { return opt_; }

  // ---- public API (thread-safe, logged) ----

  nlohmann::ordered_json create_session() {
    std::lock_guard lock(mu_);
    const double t = clock_();
    auto& s = apply_create(t);
    log_event({{"type", "create"}, {"t", t}, {"session_id", s.session_id}});
    nlohmann::ordered_json j;
    j["session_id"] = s.session_id;
    j["treatment"] = std::string(to_string(s.treatment.kind));
    j["phase"] = std::string(to_string(s.phase));
    j["payload"] = payload(s, t);
    return j;
  }

  /// Current payload. `ack` acknowledges an informational phase (consent,
  /// tutorial) and moves past it; an ack for an earlier phase is ignored.
  nlohmann::ordered_json advance(const std::string& id, std::optional<Phase> ack = std::nullopt) {
    std::lock_guard lock(mu_);
    const double t = clock_();
    auto& s = find(id);
    apply_advance(s, ack, t);
    nlohmann::ordered_json ev{{"type", "advance"}, {"t", t}, {"session_id", id}};
    ev["ack"] = ack ? nlohmann::ordered_json(std::string(to_string(*ack))) : nlohmann::ordered_json(nullptr);
    log_event(ev);
    return payload(s, t);
  }

  DecisionAck submit_decision(const std::string& id, const DecisionSubmission& d) {
    std::lock_guard lock(mu_);
    const double t = clock_();
    auto& s = find(id);
    try {
      auto ack = apply_decision(s, d, t);
      if (!ack.replayed) {
        log_event({{"type", "decision"},
                   {"t", t},
                   {"session_id", id},
                   {"instance_id", d.instance_id},
                   {"meta_choice", std::string(to_string(d.meta_choice))},
                   {"submitted_label", d.submitted_label}});
      }
      return ack;
    } catch (const SessionError& e) {
      // expiry moves the session on; record that so replay agrees
      if (e.code() == SessionErrorCode::timer_expired)
        log_event({{"type", "advance"}, {"t", t}, {"session_id", id}, {"ack", nullptr}});
      throw;
    }
  }

  /// "pass", "retry" or "excluded".
  std::string submit_comprehension(const std::string& id, const std::vector<int>& answers) {
    std::lock_guard lock(mu_);
    const double t = clock_();
    auto& s = find(id);
    auto result = apply_comprehension(s, answers, t);
    log_event({{"type", "comprehension"}, {"t", t}, {"session_id", id}, {"answers", answers}});
    return result;
  }

  PayoutStatement submit_questionnaire(const std::string& id, const std::vector<double>& scores,
                                       const std::string& free_text = "") {
    std::lock_guard lock(mu_);
    const double t = clock_();
    auto& s = find(id);
    auto st = apply_questionnaire(s, scores, free_text, t);
    log_event({{"type", "questionnaire"}, {"t", t}, {"session_id", id}, {"scores", scores}, {"free_text", free_text}});
    return st;
  }

  ExportData export_records(const ExportFilter& filter = {}) const {
    std::lock_guard lock(mu_);
    ExportData out;
    for (const auto& s : sessions_) {
      if (filter.treatment && s.treatment.kind != *filter.treatment) continue;
      if (filter.completed_only && s.phase != Phase::done && s.phase != Phase::excluded) continue;
      out.records.insert(out.records.end(), s.decisions.begin(), s.decisions.end());
      out.summaries.push_back(summary_of(s));
    }
    return out;
  }

  SessionState state(const std::string& id) const {
    std::lock_guard lock(mu_);
    return find(id);
  }

  std::size_t session_count() const {
    std::lock_guard lock(mu_);
    return sessions_.size();
  }

  std::vector<std::size_t> arm_counts() const {
    std::lock_guard lock(mu_);
    std::vector<std::size_t> counts(opt_.treatments.size(), 0);
    for (const auto& s : sessions_) ++counts[arm_index(s.treatment)];
    return counts;
  }

  /// Seconds left on the main-phase clock (full budget before main starts).
  double remaining_s(const std::string& id) const {
    std::lock_guard lock(mu_);
    return remaining(find(id), clock_());
  }

  /// Rebuild state from a previously written event log.
  void replay(std::istream& is) {
    std::lock_guard lock(mu_);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        replay_event(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw FormatError("event log line " + std::to_string(line_no) + ": " + e.what());
      } catch (const SessionError& e) {
        // a logged expiry re-raises timer_expired on replay; anything else is corruption
        if (e.code() != SessionErrorCode::timer_expired)
          throw FormatError("event log line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }

  ParticipantSummary summary(const std::string& id) const {
    std::lock_guard lock(mu_);
    return summary_of(find(id));
  }

 private:
  // ---- state transitions (unlocked, unlogged) ----

  SessionState& apply_create(double t) {
    const int cap = opt_.settings.capacity;
    if (cap > 0 && static_cast<int>(sessions_.size()) >= cap)
      throw SessionError(SessionErrorCode::capacity, "session capacity reached");
    SessionState s;
    s.index = sessions_.size();
    s.treatment = opt_.treatments[assign_arm(s.index)];
    s.session_id = make_id(s.index);
    s.order = opt_.bank;
    Rng rng(derive_seed(opt_.settings.seed, 0x6f72646572, s.index));
    rng.shuffle(std::span(s.order));
    s.last_event_at = t;
    index_[s.session_id] = sessions_.size();
    sessions_.push_back(std::move(s));
    return sessions_.back();
  }

  void apply_advance(SessionState& s, std::optional<Phase> ack, double t) {
    if (s.phase == Phase::done || s.phase == Phase::excluded) {
      if (ack) throw SessionError(SessionErrorCode::state, "session is " + std::string(to_string(s.phase)));
      return;
    }
    if (ack) {
      if (*ack == s.phase) {
        if (s.phase == Phase::consent) {
          s.phase = Phase::comprehension;
        } else if (s.phase == Phase::tutorial) {
          enter_training(s, t);
        } else {
          throw SessionError(SessionErrorCode::state, "phase " + std::string(to_string(s.phase)) + " cannot be acknowledged");
        }
      } else if (static_cast<int>(*ack) > static_cast<int>(s.phase)) {
        throw SessionError(SessionErrorCode::state, "cannot acknowledge " + std::string(to_string(*ack)) + " during " +
                                                        std::string(to_string(s.phase)));
      }
    }
    if (s.phase == Phase::main) {
      if (!s.main_started_at) {
        s.main_started_at = t;
        s.last_event_at = t;
      }
      if (expired(s, t)) s.phase = Phase::questionnaire;
    }
  }

  void enter_training(SessionState& s, double t) {
    s.instance_cursor = 0;
    s.phase = opt_.training.empty() ? Phase::main : Phase::training;
    s.last_event_at = t;
  }

  DecisionAck apply_decision(SessionState& s, const DecisionSubmission& d, double t) {
    if (auto it = s.acks.find(d.instance_id); it != s.acks.end()) {
      auto ack = it->second;
      ack.replayed = true;
      return ack;
    }
    if (s.phase != Phase::training && s.phase != Phase::main)
      throw SessionError(SessionErrorCode::state, "decisions are not accepted during " + std::string(to_string(s.phase)));

    if (s.phase == Phase::main) {
      if (!s.main_started_at) throw SessionError(SessionErrorCode::state, "main task has not been served yet");
      if (expired(s, t)) {
        s.phase = Phase::questionnaire;
        throw SessionError(SessionErrorCode::timer_expired, "the main-task timer has expired");
      }
    }
    const auto& seq = s.phase == Phase::training ? opt_.training : s.order;
    const auto& inst = seq[s.instance_cursor];
    if (d.instance_id != inst.id)
      throw SessionError(SessionErrorCode::validation, "decision is for '" + d.instance_id + "' but the current instance is '" + inst.id + "'");
    if (d.submitted_label < 0 || d.submitted_label >= opt_.n_labels)
      throw SessionError(SessionErrorCode::validation, "submitted_label out of range");
    if (d.meta_choice == MetaDecision::accept && d.submitted_label != inst.ai_label)
      throw SessionError(SessionErrorCode::validation, "accept must submit the AI's label");

    DecisionRecord r;
    r.participant_id = s.session_id;
    r.treatment = s.treatment.kind;
    r.instance_id = inst.id;
    r.scenario = inst.scenario;
    r.confidence_bin = inst.confidence_bin;
    r.bonus_available = s.treatment.bonus_available(inst.ai_confidence);
    r.meta_choice = d.meta_choice;
    r.submitted_label = d.submitted_label;
    r.matched_ai_advice = d.submitted_label == inst.ai_label;
    r.correct = d.submitted_label == inst.true_label;
    r.time_spent_s = t - s.last_event_at;
    s.last_event_at = t;

    DecisionAck ack;
    ack.instance_id = inst.id;
    ack.phase = s.phase;
    if (s.phase == Phase::training) {
      r.payout_delta = 0.0;
      s.training_log.push_back(r);
      if (++s.instance_cursor >= opt_.training.size()) {
        s.phase = Phase::main;
        s.instance_cursor = 0;
      }
    } else {
      r.payout_delta = decision_payout(s.treatment, inst.ai_confidence, r.meta_choice, r.correct);
      s.accrued_payout += r.payout_delta;
      s.decisions.push_back(r);
      if (++s.instance_cursor >= s.order.size()) s.phase = Phase::questionnaire;
    }
    ack.payout_delta = r.payout_delta;
    ack.accrued_payout = s.accrued_payout;
    ack.next_phase = s.phase;
    s.acks[ack.instance_id] = ack;
    return ack;
  }

  std::string apply_comprehension(SessionState& s, const std::vector<int>& answers, double) {
    if (s.phase != Phase::comprehension)
      throw SessionError(SessionErrorCode::state, "comprehension answers are not accepted during " + std::string(to_string(s.phase)));
    const auto items = comprehension_items(s.treatment);
    if (answers.size() != items.size())
      throw SessionError(SessionErrorCode::validation, "expected " + std::to_string(items.size()) + " answers");
    bool pass = true;
    for (std::size_t i = 0; i < items.size(); ++i) pass = pass && answers[i] == items[i].answer;
    ++s.comprehension_attempts;
    if (pass) {
      s.phase = Phase::tutorial;
      return "pass";
    }
    if (s.comprehension_attempts >= opt_.settings.comprehension_attempts) {
      s.phase = Phase::excluded;
      return "excluded";
    }
    return "retry";
  }

  PayoutStatement apply_questionnaire(SessionState& s, const std::vector<double>& scores, const std::string& free_text,
                                      double) {
    if (s.phase != Phase::questionnaire)
      throw SessionError(SessionErrorCode::state, "questionnaire is not open during " + std::string(to_string(s.phase)));
    if (scores.size() != 6) throw SessionError(SessionErrorCode::validation, "six TLX scores are required");
    double sum = 0.0;
    for (double v : scores) {
      if (!(v >= opt_.settings.tlx_min && v <= opt_.settings.tlx_max))
        throw SessionError(SessionErrorCode::validation, "TLX score outside the configured scale");
      sum += v;
    }
    s.tlx_scores = scores;
    s.free_text = free_text;
    s.cognitive_load = sum / 6.0;
    s.phase = Phase::done;
    return statement(s);
  }

  void replay_event(const nlohmann::json& ev) {
    const auto type = ev.at("type").get<std::string>();
    const double t = ev.at("t").get<double>();
    if (type == "create") {
      auto& s = apply_create(t);
      if (s.session_id != ev.at("session_id").get<std::string>())
        throw FormatError("event log does not match the server seed/config");
      return;
    }
    auto& s = find(ev.at("session_id").get<std::string>());
    if (type == "advance") {
      std::optional<Phase> ack;
      if (!ev.at("ack").is_null()) ack = phase_from_string(ev.at("ack").get<std::string>());
      apply_advance(s, ack, t);
    } else if (type == "decision") {
      DecisionSubmission d;
      d.instance_id = ev.at("instance_id").get<std::string>();
      d.meta_choice = meta_decision_from_string(ev.at("meta_choice").get<std::string>());
      d.submitted_label = ev.at("submitted_label").get<int>();
      apply_decision(s, d, t);
    } else if (type == "comprehension") {
      apply_comprehension(s, ev.at("answers").get<std::vector<int>>(), t);
    } else if (type == "questionnaire") {
      apply_questionnaire(s, ev.at("scores").get<std::vector<double>>(), ev.value("free_text", ""), t);
    } else {
      throw FormatError("unknown event type '" + type + "'");
    }
  }

  // ---- helpers ----

  /// Balanced block randomisation: each block of k sessions holds every arm
  /// once, in an order drawn from the server seed.
  std::size_t assign_arm(std::size_t index) const {
    const std::size_t k = opt_.treatments.size();
    std::vector<std::size_t> block(k);
    std::iota(block.begin(), block.end(), std::size_t{0});
    Rng rng(derive_seed(opt_.settings.seed, 0x626c6f636b, index / k));
    rng.shuffle(std::span(block));
    return block[index % k];
  }

  std::size_t arm_index(const TreatmentSpec& spec) const {
    for (std::size_t i = 0; i < opt_.treatments.size(); ++i)
      if (opt_.treatments[i] == spec) return i;
    return 0;
  }

  std::string make_id(std::size_t index) const {
    for (std::uint64_t salt = 0;; ++salt) {
      std::ostringstream os;
      os << "s" << std::hex << std::setw(16) << std::setfill('0') << derive_seed(opt_.settings.seed, index, 0x6964 + salt);
      if (!index_.count(os.str())) return os.str();
    }
  }

  SessionState& find(const std::string& id) {
    auto it = index_.find(id);
    if (it == index_.end()) throw SessionError(SessionErrorCode::not_found, "unknown session '" + id + "'");
    return sessions_[it->second];
  }
  const SessionState& find(const std::string& id) const { return const_cast<SessionServer*>(this)->find(id); }

  bool expired(const SessionState& s, double t) const {
    return s.main_started_at && t - *s.main_started_at >= opt_.time_budget_s;
  }

  double remaining(const SessionState& s, double t) const {
    if (!s.main_started_at) return opt_.time_budget_s;
    return std::max(0.0, opt_.time_budget_s - (t - *s.main_started_at));
  }

  PayoutStatement statement(const SessionState& s) const {
    PayoutStatement st;
    st.base_payment = opt_.base_payment;
    st.performance_pay = s.accrued_payout;
    st.total_payout = opt_.base_payment + s.accrued_payout;
    st.cognitive_load = s.cognitive_load;
    return st;
  }

  ParticipantSummary summary_of(const SessionState& s) const {
    ParticipantSummary out;
    const auto m = compute_metrics(s.decisions);
    if (!m.summaries.empty()) out = m.summaries.front();
    out.participant_id = s.session_id;
    out.treatment = s.treatment.kind;
    out.cognitive_load = s.cognitive_load;
    out.excluded = s.phase == Phase::excluded;
    return out;
  }

  nlohmann::ordered_json instance_payload(const SessionState& s, const TaskInstance& inst, std::size_t index,
                                          std::size_t total, double t) const {
    nlohmann::ordered_json j;
    j["instance_id"] = inst.id;
    j["index"] = index;
    j["total"] = total;
    j["ai_label"] = inst.ai_label;
    j["ai_label_name"] = inst.ai_label < static_cast<int>(kDefaultLabels.size()) ? std::string(kDefaultLabels[inst.ai_label]) : "";
    j["confidence_bin"] = std::string(to_string(inst.confidence_bin));
    j["bonus_available"] = s.treatment.bonus_available(inst.ai_confidence);
    j["gamma"] = s.phase == Phase::main ? s.treatment.gamma : 0.0;
    j["bonus"] = s.phase == Phase::main ? s.treatment.bonus_for(inst.ai_confidence) : 0.0;
    j["stimulus_ref"] = inst.stimulus_ref;
    j["glyph"] = render_glyph(inst);
    if (s.phase == Phase::main) j["remaining_s"] = remaining(s, t);
    return j;
  }

  nlohmann::ordered_json payload(const SessionState& s, double t) const {
    nlohmann::ordered_json j;
    j["session_id"] = s.session_id;
    j["phase"] = std::string(to_string(s.phase));
    j["treatment"] = std::string(to_string(s.treatment.kind));
    j["accrued_payout"] = s.accrued_payout;
    switch (s.phase) {
      case Phase::consent:
        j["text"] = "This study asks you to label images with the help of an AI. Participation is voluntary and you may stop at any time.";
        break;
      case Phase::comprehension: {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& item : comprehension_items(s.treatment))
          arr.push_back({{"id", item.id}, {"question", item.question}, {"options", item.options}});
        j["items"] = arr;
        j["attempts_used"] = s.comprehension_attempts;
        j["attempts_allowed"] = opt_.settings.comprehension_attempts;
        break;
      }
      case Phase::tutorial:
        j["steps"] = tutorial_steps(s.treatment, opt_.time_budget_s);
        break;
      case Phase::training:
        j["labels"] = labels();
        j["instance"] = instance_payload(s, opt_.training[s.instance_cursor], s.instance_cursor, opt_.training.size(), t);
        break;
      case Phase::main:
        j["labels"] = labels();
        j["instance"] = instance_payload(s, s.order[s.instance_cursor], s.instance_cursor, s.order.size(), t);
        break;
      case Phase::questionnaire:
        j["scales"] = {"mental_demand", "physical_demand", "temporal_demand", "performance", "effort", "frustration"};
        j["scale_min"] = opt_.settings.tlx_min;
        j["scale_max"] = opt_.settings.tlx_max;
        break;
      case Phase::done: {
        const auto st = statement(s);
        j["base_payment"] = st.base_payment;
        j["performance_pay"] = st.performance_pay;
        j["total_payout"] = st.total_payout;
        break;
      }
      case Phase::excluded:
        break;
    }
    return j;
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (int i = 0; i < opt_.n_labels; ++i)
      out.push_back(i < static_cast<int>(kDefaultLabels.size()) ? std::string(kDefaultLabels[i]) : "class" + std::to_string(i));
    return out;
  }

  void log_event(const nlohmann::ordered_json& ev) {
    if (!log_.is_open()) return;
    log_ << ev.dump() << '\n';
    log_.flush();
  }

  SessionServerOptions opt_;
  Clock clock_;
  mutable std::mutex mu_;
  std::vector<SessionState> sessions_;
  std::map<std::string, std::size_t> index_;
  std::ofstream log_;
};

inline nlohmann::ordered_json to_json(const DecisionAck& a) {
  nlohmann::ordered_json j;
  j["instance_id"] = a.instance_id;
  j["phase"] = std::string(to_string(a.phase));
  j["payout_delta"] = a.payout_delta;
  j["accrued_payout"] = a.accrued_payout;
  j["next_phase"] = std::string(to_string(a.next_phase));
  j["replayed"] = a.replayed;
  return j;
}

inline nlohmann::ordered_json to_json(const PayoutStatement& s) {
  nlohmann::ordered_json j;
  j["base_payment"] = s.base_payment;
  j["performance_pay"] = s.performance_pay;
  j["total_payout"] = s.total_payout;
  j["cognitive_load"] = s.cognitive_load;
  return j;
}

inline void write_export(const ExportData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream r(dir / "records.jsonl", std::ios::binary);
  std::ofstream s(dir / "summaries.jsonl", std::ios::binary);
  if (!r || !s) throw ConfigError("cannot write export to " + dir.string());
  write_jsonl<DecisionRecord>(r, data.records);
  write_jsonl<ParticipantSummary>(s, data.summaries);
}

}  // namespace inclab
