#pragma once

// Simulated decision-makers: an expected-utility core with softmax noise and
// an optional "solve and copy" gaming branch, replayed under a time budget.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "inclab/calibration.hpp"
#include "inclab/decision_model.hpp"
#include "inclab/random.hpp"
#include "inclab/records.hpp"
#include "inclab/task_bank.hpp"

namespace inclab {

enum class BeliefSource {
  bin_midpoint,          // what participants see
  calibrated_confidence  // exact model confidence
};

/// Currency value of one second of solving effort. With the default 20 s
/// solve this gives lambda = 0.008, about 0.13 gamma at gamma = 0.06.
inline constexpr double kDefaultWageRate = 0.0004;

struct AgentProfile {
  std::string name = "rational";
  double rationality_temperature = 0.0;  // currency units; 0 = argmax
  double perceived_lambda = kDefaultWageRate * 20.0;
  double solve_time_s = 20.0;
  double accept_time_s = 5.0;
  double gaming_propensity = 0.0;
  double skill_scale = 1.0;
  double load_sensitivity = 0.4;
  double load_base = 4.0;
  double load_noise_sd = 1.0;
  double load_time_slope = 0.05;  // relative solve slowdown per load point above load_base
  BeliefSource belief_source = BeliefSource::bin_midpoint;
};

inline void validate(const AgentProfile& a) {
  if (!(a.solve_time_s > 0.0 && a.accept_time_s > 0.0)) throw DomainError("agent times must be > 0");
  if (!(a.gaming_propensity >= 0.0 && a.gaming_propensity <= 1.0)) throw DomainError("gaming propensity must lie in [0,1]");
  if (!(a.rationality_temperature >= 0.0)) throw DomainError("rationality temperature must be >= 0");
  if (!(a.perceived_lambda >= 0.0)) throw DomainError("perceived lambda must be >= 0");
  if (!(a.skill_scale >= 0.0) || !(a.load_sensitivity >= 0.0) || !(a.load_noise_sd >= 0.0) || !(a.load_time_slope >= 0.0))
    throw DomainError("skill scale and load parameters must be >= 0");
}

enum class ExtendedDecision { accept, solve, solve_and_copy };

inline MetaDecision meta_choice(ExtendedDecision d) {
  return d == ExtendedDecision::accept ? MetaDecision::accept : MetaDecision::solve;
}

inline BeliefState beliefs_for(const AgentProfile& agent, const TaskInstance& instance) {
  BeliefState b;
  b.p_ai = agent.belief_source == BeliefSource::bin_midpoint ? bin_midpoint(instance.confidence_bin)
                                                            : instance.ai_confidence;
  b.p_h = std::clamp(agent.skill_scale * instance.p_h_proxy, 0.0, 1.0);
  return b;
}

/// Experiment payoffs: no penalty for errors (beta = 0).
inline RewardSchedule schedule_for(const AgentProfile& agent, const TaskInstance& instance, const TreatmentSpec& spec) {
  return spec.schedule_for(instance.ai_confidence, agent.perceived_lambda, 0.0);
}

inline ExtendedDecision decide(const AgentProfile& agent, const TaskInstance& instance, const TreatmentSpec& spec,
                               Rng& rng) {
  const auto beliefs = beliefs_for(agent, instance);
  const auto schedule = schedule_for(agent, instance, spec);

  // gaming: claim the bonus while copying advice trusted more than oneself
  if (schedule.theta > 0.0 && beliefs.p_ai >= beliefs.p_h && agent.gaming_propensity > 0.0 &&
      rng.bernoulli(agent.gaming_propensity)) {
    return ExtendedDecision::solve_and_copy;
  }
  if (agent.rationality_temperature == 0.0) {
    return meta_decision(beliefs, schedule) == MetaDecision::accept ? ExtendedDecision::accept
                                                                    : ExtendedDecision::solve;
  }
  const double gap = expected_utility(MetaDecision::accept, beliefs, schedule) -
                     expected_utility(MetaDecision::solve, beliefs, schedule);
  const double p_accept = 1.0 / (1.0 + std::exp(-gap / agent.rationality_temperature));
  return rng.bernoulli(p_accept) ? ExtendedDecision::accept : ExtendedDecision::solve;
}

/// 0 for baseline and static, 1 for the dynamic treatment (two bonus regimes
/// to track).
inline double treatment_complexity(TreatmentKind k) { return k == TreatmentKind::dynamic_bonus ? 1.0 : 0.0; }

struct ParticipantRecord {
  std::vector<DecisionRecord> decisions;
  double cognitive_load = 4.0;
  double time_used_s = 0.0;
};

inline ParticipantRecord simulate_participant(const AgentProfile& agent, const TreatmentSpec& spec,
                                              std::span<const TaskInstance> bank, double time_budget_s, Rng& rng,
                                              const std::string& participant_id = "p", int n_labels = 16) {
  validate(agent);
  if (!(time_budget_s > 0.0)) throw DomainError("time budget must be > 0");
  if (bank.empty()) throw DomainError("bank must be nonempty");

  ParticipantRecord out;
  const double load = agent.load_base + agent.load_sensitivity * treatment_complexity(spec.kind) +
                      rng.normal(0.0, agent.load_noise_sd);
  out.cognitive_load = std::clamp(load, 1.0, 7.0);
  const double solve_time =
      agent.solve_time_s * std::max(0.1, 1.0 + agent.load_time_slope * (out.cognitive_load - agent.load_base));

  for (const auto& inst : bank) {
    const auto choice = decide(agent, inst, spec, rng);
    const double cost = choice == ExtendedDecision::accept ? agent.accept_time_s : solve_time;
    if (out.time_used_s + cost > time_budget_s) break;
    out.time_used_s += cost;

    int submitted = inst.ai_label;
    if (choice == ExtendedDecision::solve) {
      const double p_h = std::clamp(agent.skill_scale * inst.p_h_proxy, 0.0, 1.0);
      if (rng.bernoulli(p_h)) {
        submitted = inst.true_label;
      } else {
        // any wrong label, uniformly
        submitted = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_labels - 1)));
        if (submitted >= inst.true_label) ++submitted;
      }
    }

    DecisionRecord r;
    r.participant_id = participant_id;
    r.treatment = spec.kind;
    r.instance_id = inst.id;
    r.scenario = inst.scenario;
    r.confidence_bin = inst.confidence_bin;
    r.bonus_available = spec.bonus_available(inst.ai_confidence);
    r.meta_choice = meta_choice(choice);
    r.submitted_label = submitted;
    r.matched_ai_advice = submitted == inst.ai_label;
    r.correct = submitted == inst.true_label;
    r.time_spent_s = cost;
    r.payout_delta = decision_payout(spec, inst.ai_confidence, r.meta_choice, r.correct);
    out.decisions.push_back(std::move(r));
  }
  return out;
}

}  // namespace inclab
