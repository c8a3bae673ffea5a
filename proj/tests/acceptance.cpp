// One PASS/FAIL line per acceptance criterion. Tolerances are fixed here.

#include <boost/math/distributions/students_t.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "inclab/inclab.hpp"

using namespace inclab;

namespace {

constexpr double kCalibrationTol = 1e-9;
constexpr double kIndifferenceTol = 1e-9;
constexpr double kGridStep = 1e-4;
constexpr double kOptimalGridStep = 1e-3;
constexpr double kWelchTol = 1e-10;
constexpr double kTailTol = 1e-10;
constexpr double kAcmeTol = 1e-3;
constexpr double kIdentityTol = 1e-9;
constexpr double kSignificance = 0.05;
constexpr double kCalibrationBudgetS = 1.0;
constexpr double kReplicationBudgetS = 10.0;

int failures = 0;
int known = 0;

// `known_conflict` marks a criterion that cannot hold as stated; it still
// prints FAIL but does not set the exit status.
void report(const std::string& name, bool ok, const std::string& detail, bool known_conflict = false) {
  std::printf("%s  %-58s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  if (!ok) ++(known_conflict ? known : failures);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

void calibration_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  const CalibrationInputs in;
  const auto b = calibrate(TreatmentKind::baseline, in);
  const auto s = calibrate(TreatmentKind::static_bonus, in);
  const auto d = calibrate(TreatmentKind::dynamic_bonus, in);
  double err = 0.0;
  auto dev = [&](double x, double want) { err = std::max(err, std::abs(x - want)); };
  dev(b.gamma, 0.06), dev(b.theta_high_conf, 0.0), dev(b.theta_low_conf, 0.0);
  dev(s.gamma, 0.03), dev(s.theta_high_conf, 0.03), dev(s.theta_low_conf, 0.03);
  dev(d.gamma, 0.03), dev(d.theta_high_conf, 0.0), dev(d.theta_low_conf, 0.06);
  for (const auto& t : {b, s, d}) dev(verify_budget(t, in.n_instances, in.low_conf_fraction), 1.80);
  const double secs = seconds_since(t0);
  report("Calibration exactness (schedules and budget 1.80)", err <= kCalibrationTol && secs < kCalibrationBudgetS,
         "max |err| = " + fmt(err) + ", " + fmt(secs * 1e3, 3) + " ms");
}

void indifference() {
  const CalibrationInputs in;
  const auto s = calibrate(TreatmentKind::static_bonus, in);
  const double e1 = strategy_expected_payout(Strategy::solve_all, s, in);
  const double e2 = strategy_expected_payout(Strategy::accept_all, s, in);
  const bool ok = std::abs(e1 - 0.45) <= kIndifferenceTol && std::abs(e2 - 0.45) <= kIndifferenceTol &&
                  std::abs(e1 - e2) <= kIndifferenceTol;
  report("Indifference (static E1 = E2 = 0.45)", ok, "E1 = " + fmt(e1, 12) + ", E2 = " + fmt(e2, 12));
}

void threshold_theory() {
  Rng rng(20240601);
  // grid-search oracle over expected utilities written out directly
  int mismatches = 0, draws = 0;
  double worst = 0.0;
  while (draws < 10000) {
    RewardSchedule sch{rng.uniform(0.01, 0.2), rng.uniform(0.0, 0.1), rng.uniform(0.0, 0.05), rng.uniform(0.0, 0.1)};
    const double p_h = rng.uniform(0.01, 1.0);
    ++draws;
    const double eu_solve = p_h * (sch.gamma - sch.lambda_effort + sch.theta) + (1 - p_h) * (-sch.beta - sch.lambda_effort);
    double grid = 2.0;  // first grid point where accepting is weakly better
    for (int i = 0; i <= 10000; ++i) {
      const double p = i * kGridStep;
      if (p * sch.gamma - (1 - p) * sch.beta >= eu_solve) {
        grid = p;
        break;
      }
    }
    const double th = acceptance_threshold(p_h, sch);
    bool ok;
    if (th <= 0.0) ok = grid == 0.0;
    else if (th > 1.0) ok = grid > 1.0 || th < 1.0 + 1e-9;
    else if (grid > 1.0) ok = th > 1.0 - kGridStep;
    else ok = grid >= th - 1e-9 && grid < th + kGridStep + 1e-9;
    if (th > 0.0 && th <= 1.0 && grid <= 1.0) worst = std::max(worst, std::abs(grid - th));
    if (!ok) ++mismatches;
  }
  report("Threshold theory: closed form vs grid oracle (1e4 draws)", mismatches == 0,
         std::to_string(mismatches) + " mismatches, worst excess " + fmt(worst));

  int violations = 0, points = 0;
  for (int i = 1; i <= 1000; ++i) {
    const double p_h = i * kOptimalGridStep;
    RewardSchedule sch{0.06, 0.0, 0.012, 0.0};
    sch.theta = optimal_bonus(sch.lambda_effort, p_h);
    for (int j = 0; j <= 1000; ++j) {
      const double p_ai = j * kOptimalGridStep;
      const bool accept = meta_decision({p_ai, p_h}, sch) == MetaDecision::accept;
      violations += accept != (p_ai >= p_h);
      ++points;
    }
  }
  report("Threshold theory: optimal bonus aligns accept with p_ai >= p_h", violations == 0,
         std::to_string(violations) + " violations on " + std::to_string(points) + " grid points");
}

void statistical_oracles() {
  Rng rng(77);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::vector<double> a(3 + rng.below(40)), b(3 + rng.below(40));
    const double sa = rng.uniform(0.2, 3), sb = rng.uniform(0.2, 3), mb = rng.uniform(-1, 1);
    for (auto& x : a) x = rng.normal(0, sa);
    for (auto& x : b) x = rng.normal(mb, sb);
    auto mv = [](const std::vector<double>& v, double& m, double& var) {
      m = 0;
      for (double x : v) m += x;
      m /= v.size();
      var = 0;
      for (double x : v) var += (x - m) * (x - m);
      var /= v.size() - 1.0;
    };
    double ma, va, mb2, vb;
    mv(a, ma, va);
    mv(b, mb2, vb);
    const double na = a.size(), nb = b.size();
    const double se2 = va / na + vb / nb;
    const double t = (ma - mb2) / std::sqrt(se2);
    const double df = se2 * se2 / ((va / na) * (va / na) / (na - 1) + (vb / nb) * (vb / nb) / (nb - 1));
    const double p = 2 * boost::math::cdf(boost::math::complement(boost::math::students_t(df), std::abs(t)));
    const auto r = weighted_welch_t(WeightedSample::unit(a), WeightedSample::unit(b));
    worst = std::max({worst, std::abs(r.statistic - t) / std::max(1.0, std::abs(t)),
                      std::abs(r.df - df) / std::max(1.0, df), std::abs(r.p_raw - p)});
  }
  report("Stats: unit-weight Welch vs reference (100 datasets)", worst <= kWelchTol, "max rel err " + fmt(worst));

  const std::vector<std::vector<double>> g{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const double h = kruskal_wallis(g).statistic;
  report("Stats: Kruskal-Wallis H = 7.2 hand case", std::abs(h - 7.2) <= 1e-12, "H = " + fmt(h, 15));

  const std::vector<double> lo{1, 2, 3}, hi{4, 5, 6};
  const double d1 = ks_one_sided(lo, hi).statistic, d0 = ks_one_sided(hi, lo).statistic, dsame = ks_one_sided(lo, lo).statistic;
  report("Stats: KS trivial cases D in {0, 1}", d1 == 1.0 && d0 == 0.0 && dsame == 0.0,
         "D = " + fmt(d1) + ", " + fmt(d0) + ", " + fmt(dsame));

  // mediation: ACME + ADE equals the total effect from regressing on arm alone
  double ident = 0.0;
  for (int k = 0; k < 8; ++k) {
    MediationData md;
    md.n_arms = 3;
    const int n_per = 15 + static_cast<int>(rng.below(40));
    for (int arm = 0; arm < 3; ++arm)
      for (int i = 0; i < n_per; ++i) {
        const double m = 4 + 0.4 * (arm == 2) - 0.1 * (arm == 1) + rng.normal();
        md.arm.push_back(arm);
        md.mediator.push_back(m);
        md.outcome.push_back(28 - 3 * (arm == 2) - 5 * (arm == 1) - m + rng.normal(0, 2));
      }
    MediationOptions mo;
    mo.n_sim = 100;
    mo.seed = k;
    const auto res = mediation_bootstrap(md, 2, mo);
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(md.arm.size(), 3);
    Eigen::VectorXd y(md.arm.size());
    for (std::size_t i = 0; i < md.arm.size(); ++i) {
      X(i, 0) = 1;
      if (md.arm[i]) X(i, md.arm[i]) = 1;
      y[i] = md.outcome[i];
    }
    const double total = ols_fit(y, X).coefficients[2];
    ident = std::max({ident, std::abs(res.acme.estimate + res.ade.estimate - res.total.estimate),
                      std::abs(res.total.estimate - total)});
  }
  report("Stats: mediation ACME + ADE = total (8 datasets)", ident <= kIdentityTol, "max |gap| = " + fmt(ident));

  const double acme = mediation_point(0.403, -1.094, 0.0).acme;
  report("Stats: ACME from coefficients 0.403 x -1.094 = -0.441", std::abs(acme + 0.441) <= kAcmeTol, "ACME = " + fmt(acme, 6));

  double tail_err = 0.0;
  for (double x : {0.01, 0.3, 1.0, 2.5, 7.0, 20.0}) {
    tail_err = std::max(tail_err, std::abs(tail_probability(Distribution::chi_square, x, {2.0}) - std::exp(-x / 2)));
    tail_err = std::max(tail_err, std::abs(tail_probability(Distribution::t, x, {1.0}) - (0.5 - std::atan(x) / std::numbers::pi)));
  }
  report("Stats: tail closed forms (chi-square df 2, t df 1)", tail_err <= kTailTol, "max |err| = " + fmt(tail_err));
}

void weight_rules() {
  std::vector<RelianceObservation> g{{20, 0.5}, {10, 0.2}, {30, 1.0}};
  const auto w = reliance_weights(g);
  report("Weights: n/(p(1-p)) spot value (20, 0.5) -> 80", w[0] == 80.0, "w = " + fmt(w[0], 12));
  report("Weights: degenerate member gets 1.25 x group max", w[2] == 1.25 * 80.0, "w = " + fmt(w[2], 12));

  Rng rng(91);
  int cap_bad = 0, not_idempotent = 0;
  double worst_shift = 0.0;
  const int trials = 1000;
  for (int k = 0; k < trials; ++k) {
    std::vector<double> v(20 + rng.below(100));
    for (auto& x : v) x = std::exp(rng.normal(4, 1.5));
    const auto once = winsorize_weights(v);
    const double lo = percentile(v, 5), hi = percentile(v, 95);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (once[i] != std::clamp(v[i], lo, hi)) ++cap_bad;
    const auto twice = winsorize_weights(once);
    bool same = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      worst_shift = std::max(worst_shift, std::abs(twice[i] - once[i]) / once[i]);
      same = same && twice[i] == once[i];
    }
    not_idempotent += !same;
  }
  report("Weights: winsorization caps at interpolated 5th/95th", cap_bad == 0, std::to_string(cap_bad) + " mismatches");
  report("Weights: winsorization idempotent", not_idempotent == 0,
         std::to_string(not_idempotent) + "/" + std::to_string(trials) +
             " vectors move on a second pass (max rel shift " + fmt(worst_shift, 3) +
             "); interpolated percentiles are not fixed points of clipping",
         true);
}

void directional_replication() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.treatments = default_treatments(cfg.calibration);
  const auto data = run_experiment(cfg);
  AnalysisOptions opt;  // 5000 bootstrap resamples
  const auto r = analyze(data.records, data.summaries, opt);
  const double secs = seconds_since(t0);

  const auto mean = [&](const char* metric, const char* arm, const char* subset = "all") {
    const auto* m = r.find_mean(metric, arm, subset);
    return m ? m->mean : std::numeric_limits<double>::quiet_NaN();
  };
  const double rb = mean("reliance", "baseline"), rs = mean("reliance", "static"), rd = mean("reliance", "dynamic");
  const auto* sb = r.find("reliance_pairwise", "Static vs. Baseline");
  const auto* db = r.find("reliance_pairwise", "Dynamic vs. Baseline");
  const auto* sd = r.find("reliance_pairwise", "Static vs. Dynamic");
  const bool tests_ok = sb && db && sd && sb->valid && db->valid && sd->valid && sb->test.p_corrected < kSignificance &&
                        db->test.p_corrected < kSignificance && sd->test.p_corrected < kSignificance;
  report("Replication: reliance static < dynamic < baseline, p < .05", rs < rd && rd < rb && tests_ok,
         fmt(rs, 3) + " < " + fmt(rd, 3) + " < " + fmt(rb, 3) + "; Bonferroni p = " +
             (tests_ok || (sb && db && sd) ? fmt(sb->test.p_corrected, 2) + ", " + fmt(sd->test.p_corrected, 2) + ", " +
                                                  fmt(db->test.p_corrected, 2)
                                            : "n/a"));

  const double ab = mean("accuracy", "baseline"), ad = mean("accuracy", "dynamic");
  report("Replication: dynamic accuracy > baseline", ad > ab, fmt(ad, 4) + " > " + fmt(ab, 4));

  const double xb = mean("arbitrage", "baseline"), xs = mean("arbitrage", "static"), xd = mean("arbitrage", "dynamic");
  report("Replication: arbitrage static > dynamic > baseline", xs > xd && xd > xb,
         fmt(xs, 3) + " > " + fmt(xd, 3) + " > " + fmt(xb, 3));

  const auto* bonus = r.find("reliance_bonus", "With vs. without bonus");
  const bool bonus_ok = bonus && bonus->valid && bonus->treatment_mean < bonus->reference_mean;
  report("Replication: dynamic reliance bonus-eligible < non-eligible", bonus_ok,
         bonus ? fmt(bonus->treatment_mean, 3) + " < " + fmt(bonus->reference_mean, 3) : "missing");

  report("Replication: simulate + analyze runtime < 10 s", secs < kReplicationBudgetS, fmt(secs, 3) + " s");
}

void determinism() {
  ExperimentConfig cfg;
  cfg.treatments = default_treatments(cfg.calibration);
  auto dump = [](const Dataset& d) {
    std::ostringstream os;
    write_jsonl<DecisionRecord>(os, d.records);
    write_jsonl<ParticipantSummary>(os, d.summaries);
    return os.str();
  };
  cfg.threads = 1;
  const auto a = dump(run_experiment(cfg));
  const auto b = dump(run_experiment(cfg));
  cfg.threads = 4;
  const auto c = dump(run_experiment(cfg));
  report("Determinism: identical seeds give byte-identical exports", a == b && a == c,
         std::to_string(a.size()) + " bytes, 3 runs (1 and 4 threads)");
}

}  // namespace

int main() {
  try {
    calibration_exactness();
    indifference();
    threshold_theory();
    statistical_oracles();
    weight_rules();
    directional_replication();
    determinism();
  } catch (const std::exception& e) {
    std::printf("FAIL  acceptance run aborted: %s\n", e.what());
    return 1;
  }
  std::printf("\n%d unexpected failure(s), %d known conflict(s)\n", failures, known);
  return failures == 0 ? 0 : 1;
}
