#pragma once

// Expected-utility model of the accept/solve meta-decision.
//
// A decision-maker either accepts the AI's advised label or solves the
// instance independently. Solving costs `lambda_effort` and, when a bonus
// is offered, pays `theta` on a correct answer on top of `gamma`.

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "inclab/error.hpp"

namespace inclab {

struct RewardSchedule {
  double gamma = 0.0;          // reward per correct final decision
  double beta = 0.0;           // penalty per incorrect final decision
  double lambda_effort = 0.0;  // effort cost of one independent solve
  double theta = 0.0;          // bonus for a correct independent solve
};

struct BeliefState {
  double p_ai = 0.0;  // probability the advised label is correct
  double p_h = 0.0;   // probability an independent solve is correct
};

enum class MetaDecision { accept, solve };

inline std::string_view to_string(MetaDecision d) {
  return d == MetaDecision::accept ? "accept" : "solve";
}

inline MetaDecision meta_decision_from_string(std::string_view s) {
  if (s == "accept") return MetaDecision::accept;
  if (s == "solve") return MetaDecision::solve;
  throw DomainError("unknown meta decision '" + std::string(s) + "'");
}

namespace detail {

inline bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

inline void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(name) + " must lie in [0,1]");
}

}  // namespace detail

inline void validate(const RewardSchedule& s) {
  if (!detail::finite_all({s.gamma, s.beta, s.lambda_effort, s.theta}))
    throw DomainError("reward schedule contains a non-finite value");
  if (!(s.gamma > 0.0)) throw DomainError("gamma must be > 0");
  if (s.beta < 0.0 || s.lambda_effort < 0.0 || s.theta < 0.0)
    throw DomainError("beta, lambda and theta must be >= 0");
  if (!(s.gamma + s.beta > 0.0)) throw DomainError("gamma + beta must be > 0");
}

inline void validate(const BeliefState& b) {
  detail::check_probability(b.p_ai, "p_ai");
  detail::check_probability(b.p_h, "p_h");
}

inline double expected_utility(MetaDecision decision, const BeliefState& beliefs,
                               const RewardSchedule& schedule) {
  validate(beliefs);
  validate(schedule);
  const auto& s = schedule;
  if (decision == MetaDecision::accept) {
    return beliefs.p_ai * s.gamma + (1.0 - beliefs.p_ai) * (-s.beta);
  }
  return beliefs.p_h * (s.gamma - s.lambda_effort + s.theta) +
         (1.0 - beliefs.p_h) * (-s.beta - s.lambda_effort);
}

/// Signed shift of the acceptance threshold away from p_h:
/// (theta * p_h - lambda) / (gamma + beta). Negative means pressure to accept.
inline double misalignment_bias(double p_h, const RewardSchedule& schedule) {
  detail::check_probability(p_h, "p_h");
  validate(schedule);
  return (schedule.theta * p_h - schedule.lambda_effort) / (schedule.gamma + schedule.beta);
}

/// Smallest p_ai at which accepting is (weakly) preferred. Not clamped to
/// [0,1]: below 0 means "always accept", above 1 means "never accept".
inline double acceptance_threshold(double p_h, const RewardSchedule& schedule) {
  return p_h + misalignment_bias(p_h, schedule);
}

/// Bonus that makes the threshold coincide with p_h.
inline double optimal_bonus(double lambda_effort, double p_h) {
  detail::check_probability(p_h, "p_h");
  if (!(lambda_effort >= 0.0) || !std::isfinite(lambda_effort))
    throw DomainError("lambda must be finite and >= 0");
  if (p_h == 0.0) throw DomainError("optimal bonus is undefined for p_h = 0");
  return lambda_effort / p_h;
}

/// Utility gaps within this relative tolerance count as exact indifference,
/// so that e.g. theta = lambda/p_h does not flip on a last-bit rounding error.
inline constexpr double kIndifferenceTolerance = 1e-12;

inline MetaDecision meta_decision(const BeliefState& beliefs, const RewardSchedule& schedule) {
  const double accept = expected_utility(MetaDecision::accept, beliefs, schedule);
  const double solve = expected_utility(MetaDecision::solve, beliefs, schedule);
  const double scale = std::max({std::abs(accept), std::abs(solve), schedule.gamma + schedule.beta});
  return accept - solve >= -kIndifferenceTolerance * scale ? MetaDecision::accept
                                                           : MetaDecision::solve;
}

}  // namespace inclab
