#pragma once

// Payment schedules for the three incentive treatments under a common
// maximum performance payout.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "inclab/decision_model.hpp"
#include "inclab/error.hpp"

namespace inclab {

struct CalibrationInputs {
  double max_var_payment = 1.80;  // performance-pay budget
  int n_instances = 30;
  double t_max = 300.0;           // seconds available for the main task
  double t_per_instance = 20.0;   // mean seconds per independent solve
  double p_h_avg = 0.5;
  double p_ai_avg = 0.5;
  double low_conf_fraction = 0.5;  // share of instances with p_ai < 0.5
  // Dynamic reward; defaults to the static reward derived from the same inputs.
  std::optional<double> dynamic_gamma;
};

enum class TreatmentKind { baseline, static_bonus, dynamic_bonus };

inline std::string_view to_string(TreatmentKind k) {
  switch (k) {
    case TreatmentKind::baseline: return "baseline";
    case TreatmentKind::static_bonus: return "static";
    case TreatmentKind::dynamic_bonus: return "dynamic";
  }
  return "?";
}

inline TreatmentKind treatment_kind_from_string(std::string_view s) {
  if (s == "baseline") return TreatmentKind::baseline;
  if (s == "static") return TreatmentKind::static_bonus;
  if (s == "dynamic") return TreatmentKind::dynamic_bonus;
  throw DomainError("unknown treatment kind '" + std::string(s) + "'");
}

/// Confidence at or above which an instance counts as high-confidence.
inline constexpr double kHighConfidenceCut = 0.5;

struct TreatmentSpec {
  TreatmentKind kind = TreatmentKind::baseline;
  double gamma = 0.0;
  double theta_high_conf = 0.0;  // bonus when p_ai >= 0.5
  double theta_low_conf = 0.0;   // bonus when p_ai < 0.5

  double bonus_for(double ai_confidence) const {
    return ai_confidence < kHighConfidenceCut ? theta_low_conf : theta_high_conf;
  }
  bool bonus_available(double ai_confidence) const { return bonus_for(ai_confidence) > 0.0; }

  RewardSchedule schedule_for(double ai_confidence, double lambda_effort, double beta = 0.0) const {
    return RewardSchedule{gamma, beta, lambda_effort, bonus_for(ai_confidence)};
  }

  bool operator==(const TreatmentSpec&) const = default;
};

inline void validate(const TreatmentSpec& s) {
  if (!(s.gamma >= 0.0 && s.theta_high_conf >= 0.0 && s.theta_low_conf >= 0.0))
    throw DomainError("treatment currency fields must be >= 0");
  switch (s.kind) {
    case TreatmentKind::baseline:
      if (s.theta_high_conf != 0.0 || s.theta_low_conf != 0.0)
        throw DomainError("baseline treatment cannot carry a bonus");
      break;
    case TreatmentKind::static_bonus:
      if (!(s.theta_high_conf == s.theta_low_conf && s.theta_low_conf > 0.0))
        throw DomainError("static treatment needs one positive bonus on all instances");
      break;
    case TreatmentKind::dynamic_bonus:
      if (!(s.theta_high_conf == 0.0 && s.theta_low_conf > 0.0))
        throw DomainError("dynamic treatment pays its bonus on low-confidence instances only");
      break;
  }
}

inline void validate(const CalibrationInputs& in) {
  if (!(in.max_var_payment > 0.0) || !std::isfinite(in.max_var_payment))
    throw DomainError("max_var_payment must be > 0");
  if (in.n_instances <= 0) throw DomainError("n_instances must be > 0");
  if (!(in.t_max > 0.0) || !(in.t_per_instance > 0.0))
    throw DomainError("t_max and t_per_instance must be > 0");
  if (!(in.p_h_avg > 0.0 && in.p_h_avg <= 1.0) || !(in.p_ai_avg > 0.0 && in.p_ai_avg <= 1.0))
    throw DomainError("average accuracies must lie in (0,1]");
  if (!(in.low_conf_fraction >= 0.0 && in.low_conf_fraction <= 1.0))
    throw DomainError("low_conf_fraction must lie in [0,1]");
}

enum class Strategy { solve_all, accept_all };

// Expected number of correct answers of each extreme strategy.
inline double solve_all_performance(const CalibrationInputs& in) {
  const double attempts = std::min(in.t_max / in.t_per_instance, static_cast<double>(in.n_instances));
  return attempts * in.p_h_avg;
}

inline double accept_all_performance(const CalibrationInputs& in) {
  return in.n_instances * in.p_ai_avg;
}

namespace detail {

inline double static_gamma(const CalibrationInputs& in) {
  const double perf_solve = solve_all_performance(in);
  if (!(perf_solve > 0.0)) throw CalibrationError("solve-all strategy has zero expected performance");
  const double ratio = accept_all_performance(in) / perf_solve;
  if (ratio < 1.0)
    throw CalibrationError("indifference requires a negative static bonus (solve-all outperforms accept-all)");
  // budget = n (gamma + theta) = n gamma ratio
  return in.max_var_payment / (in.n_instances * ratio);
}

}  // namespace detail

inline TreatmentSpec calibrate(TreatmentKind kind, const CalibrationInputs& in) {
  validate(in);
  const double n = in.n_instances;
  TreatmentSpec spec;
  spec.kind = kind;
  switch (kind) {
    case TreatmentKind::baseline:
      spec.gamma = in.max_var_payment / n;
      break;
    case TreatmentKind::static_bonus: {
      spec.gamma = detail::static_gamma(in);
      const double theta = in.max_var_payment / n - spec.gamma;
      if (!(theta > 0.0)) throw CalibrationError("static bonus is not positive for these inputs");
      spec.theta_high_conf = spec.theta_low_conf = theta;
      break;
    }
    case TreatmentKind::dynamic_bonus: {
      if (!(in.low_conf_fraction > 0.0))
        throw CalibrationError("dynamic bonus needs at least some low-confidence instances");
      spec.gamma = in.dynamic_gamma ? *in.dynamic_gamma : detail::static_gamma(in);
      if (!(spec.gamma >= 0.0)) throw CalibrationError("dynamic gamma must be >= 0");
      const double remaining = in.max_var_payment - n * spec.gamma;
      if (!(remaining > 1e-12 * in.max_var_payment))
        throw CalibrationError("dynamic gamma leaves no budget for the bonus");
      spec.theta_low_conf = remaining / (in.low_conf_fraction * n);
      break;
    }
  }
  return spec;
}

/// Bonus rate earned per correct solve when solving every instance.
inline double blended_bonus(const TreatmentSpec& spec, double low_conf_fraction) {
  return (1.0 - low_conf_fraction) * spec.theta_high_conf + low_conf_fraction * spec.theta_low_conf;
}

inline double strategy_expected_payout(Strategy strategy, const TreatmentSpec& spec,
                                       const CalibrationInputs& in) {
  validate(in);
  if (strategy == Strategy::solve_all) {
    return solve_all_performance(in) * (spec.gamma + blended_bonus(spec, in.low_conf_fraction));
  }
  return accept_all_performance(in) * spec.gamma;
}

/// Payout of a perfect solver who collects every available bonus.
inline double verify_budget(const TreatmentSpec& spec, int n_instances, double low_conf_fraction) {
  const double n = n_instances;
  return n * spec.gamma + n * (1.0 - low_conf_fraction) * spec.theta_high_conf +
         n * low_conf_fraction * spec.theta_low_conf;
}

}  // namespace inclab
