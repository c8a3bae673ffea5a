#pragma once

// Two-regression linear mediation with a stratified nonparametric bootstrap.
//
//   mediator ~ 1 + arm indicators
//   outcome  ~ 1 + arm indicators + mediator
//
// ACME = a * b, ADE = direct arm coefficient, total = ACME + ADE.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "inclab/error.hpp"
#include "inclab/ols.hpp"
#include "inclab/random.hpp"
#include "inclab/stats.hpp"

namespace inclab {

struct MediationData {
  std::vector<int> arm;  // 0 is the reference level
  std::vector<double> mediator;
  std::vector<double> outcome;
  int n_arms = 0;
};

struct MediationEffect {
  double estimate = 0.0;
  double boot_se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p_value = 1.0;
};

struct MediationResult {
  MediationEffect acme;
  MediationEffect ade;
  MediationEffect total;
  MediationEffect prop_mediated;
  int n_sim = 0;
  int failed_resamples = 0;
  OlsFit mediator_model;
  OlsFit outcome_model;
};

struct MediationPoint {
  double a = 0.0;  // arm -> mediator
  double b = 0.0;  // mediator -> outcome
  double acme = 0.0;
  double ade = 0.0;
  double total = 0.0;
  double prop_mediated = 0.0;
};

inline MediationPoint mediation_point(double a, double b, double ade) {
  MediationPoint p;
  p.a = a;
  p.b = b;
  p.acme = a * b;
  p.ade = ade;
  p.total = p.acme + p.ade;
  p.prop_mediated = p.total != 0.0 ? p.acme / p.total : std::numeric_limits<double>::quiet_NaN();
  return p;
}

namespace detail {

inline Eigen::MatrixXd arm_design(const MediationData& d, std::span<const std::size_t> rows, bool with_mediator) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index cols = d.n_arms + (with_mediator ? 1 : 0);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = rows[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    if (d.arm[r] > 0) X(i, d.arm[r]) = 1.0;
    if (with_mediator) X(i, cols - 1) = d.mediator[r];
  }
  return X;
}

inline Eigen::VectorXd gather(const std::vector<double>& v, std::span<const std::size_t> rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[rows[i]];
  return out;
}

struct MediationFits {
  OlsFit mediator_model;
  OlsFit outcome_model;
  MediationPoint point;
};

inline MediationFits fit_mediation(const MediationData& d, std::span<const std::size_t> rows, int arm_of_interest) {
  MediationFits f;
  f.mediator_model = ols_fit(gather(d.mediator, rows), arm_design(d, rows, false));
  f.outcome_model = ols_fit(gather(d.outcome, rows), arm_design(d, rows, true));
  f.point = mediation_point(f.mediator_model.coefficients[arm_of_interest],
                            f.outcome_model.coefficients[d.n_arms],
                            f.outcome_model.coefficients[arm_of_interest]);
  return f;
}

inline MediationEffect summarize_draws(double estimate, std::vector<double> draws) {
  MediationEffect e;
  e.estimate = estimate;
  std::erase_if(draws, [](double x) { return !std::isfinite(x); });
  if (draws.empty()) return e;
  const double n = static_cast<double>(draws.size());
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : draws) ss += (x - mean) * (x - mean);
  e.boot_se = draws.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  e.ci_low = percentile(draws, 2.5);
  e.ci_high = percentile(draws, 97.5);
  const double below = static_cast<double>(std::count_if(draws.begin(), draws.end(), [](double x) { return x <= 0.0; }));
  const double above = static_cast<double>(std::count_if(draws.begin(), draws.end(), [](double x) { return x >= 0.0; }));
  e.p_value = std::min(1.0, 2.0 * std::min(below, above) / n);
  return e;
}

}  // namespace detail

struct MediationOptions {
  int n_sim = 5000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
  int max_failed_resamples = -1;  // -1 = n_sim
};

/// Point estimates and percentile bootstrap intervals; resampling is
/// stratified by arm and each resample has its own seeded substream, so
/// results do not depend on the thread count.
inline MediationResult mediation_bootstrap(const MediationData& d, int arm_of_interest, const MediationOptions& opt = {}) {
  const std::size_t n = d.arm.size();
  if (d.mediator.size() != n || d.outcome.size() != n) throw StatsError("mediation data columns differ in length");
  if (arm_of_interest <= 0 || arm_of_interest >= d.n_arms) throw StatsError("arm of interest must be a non-reference arm");
  if (opt.n_sim < 1) throw StatsError("mediation needs n_sim >= 1");

  std::vector<std::vector<std::size_t>> strata(static_cast<std::size_t>(d.n_arms));
  for (std::size_t i = 0; i < n; ++i) {
    if (d.arm[i] < 0 || d.arm[i] >= d.n_arms) throw StatsError("arm index out of range");
    strata[static_cast<std::size_t>(d.arm[i])].push_back(i);
  }
  if (strata[0].empty() || strata[static_cast<std::size_t>(arm_of_interest)].empty())
    throw StatsError("mediation needs the reference arm and the arm of interest");

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const auto fits = detail::fit_mediation(d, all, arm_of_interest);

  const auto n_sim = static_cast<std::size_t>(opt.n_sim);
  std::vector<MediationPoint> draws(n_sim);
  std::vector<int> failures(n_sim, 0);
  const int cap = opt.max_failed_resamples < 0 ? opt.n_sim : opt.max_failed_resamples;

  auto run_range = [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> rows(n);
    for (std::size_t s = begin; s < end; ++s) {
      for (int attempt = 0;; ++attempt) {
        Rng rng(derive_seed(opt.seed, s, static_cast<std::uint64_t>(attempt)));
        std::size_t k = 0;
        for (const auto& stratum : strata) {
          for (std::size_t j = 0; j < stratum.size(); ++j) rows[k++] = stratum[rng.below(stratum.size())];
        }
        try {
          draws[s] = detail::fit_mediation(d, rows, arm_of_interest).point;
          break;
        } catch (const StatsError&) {
          failures[s] = attempt + 1;
          if (attempt + 1 > cap) return;
        }
      }
    }
  };

  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_sim));
  if (threads <= 1) {
    run_range(0, n_sim);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n_sim + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(n_sim, b + chunk);
      if (b < e) pool.emplace_back(run_range, b, e);
    }
  }

  MediationResult result;
  result.n_sim = opt.n_sim;
  result.failed_resamples = std::accumulate(failures.begin(), failures.end(), 0);
  if (result.failed_resamples > cap) throw StatsError("mediation bootstrap: too many singular resamples");
  result.mediator_model = fits.mediator_model;
  result.outcome_model = fits.outcome_model;

  auto column = [&](auto member) {
    std::vector<double> v;
    v.reserve(n_sim);
    for (const auto& p : draws) v.push_back(p.*member);
    return v;
  };
  result.acme = detail::summarize_draws(fits.point.acme, column(&MediationPoint::acme));
  result.ade = detail::summarize_draws(fits.point.ade, column(&MediationPoint::ade));
  result.total = detail::summarize_draws(fits.point.total, column(&MediationPoint::total));
  result.prop_mediated = detail::summarize_draws(fits.point.prop_mediated, column(&MediationPoint::prop_mediated));
  return result;
}

}  // namespace inclab
