#include <gtest/gtest.h>

#include "inclab/mediation.hpp"
#include "test_support.hpp"

using namespace inclab;

namespace {

MediationData fixture_data(const nlohmann::json& c) {
  MediationData d;
  d.arm = c["arm"].get<std::vector<int>>();
  d.mediator = doubles(c["mediator"]);
  d.outcome = doubles(c["outcome"]);
  d.n_arms = 3;
  return d;
}

}  // namespace

TEST(Ols, MatchesStatsmodels) {
  for (const auto& c : oracles()["ols"]) {
    const auto rows = c["X"].size();
    const auto cols = c["X"][0].size();
    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) X(i, j) = c["X"][i][j].get<double>();
      y[i] = c["y"][i].get<double>();
    }
    const auto fit = ols_fit(y, X);
    for (std::size_t j = 0; j < cols; ++j) {
      EXPECT_TRUE(close(fit.coefficients[j], c["coef"][j], 1e-9, 1e-12));
      EXPECT_TRUE(close(fit.std_errors[j], c["se"][j], 1e-9));
      EXPECT_TRUE(close(fit.t_values[j], c["t"][j], 1e-9, 1e-12));
      EXPECT_TRUE(close(fit.p_values[j], c["p"][j], 1e-8, 1e-14));
    }
    EXPECT_TRUE(close(fit.r_squared, c["r2"], 1e-10));
    EXPECT_TRUE(close(fit.f_statistic, c["F"], 1e-9));
    EXPECT_TRUE(close(fit.f_p_value, c["F_p"], 1e-8, 1e-14));
    EXPECT_TRUE(close(fit.sigma2, c["sigma2"], 1e-10));
  }
}

TEST(Ols, ExactFitAndErrors) {
  Eigen::MatrixXd X(4, 2);
  X << 1, 0, 1, 1, 1, 2, 1, 3;
  Eigen::VectorXd y(4);
  y << 1, 3, 5, 7;
  const auto fit = ols_fit(y, X);
  EXPECT_NEAR(fit.coefficients[0], 1.0, 1e-12);
  EXPECT_NEAR(fit.coefficients[1], 2.0, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);

  Eigen::MatrixXd singular(4, 3);
  singular << 1, 0, 0, 1, 1, 2, 1, 2, 4, 1, 3, 6;
  EXPECT_THROW(ols_fit(y, singular), StatsError);
  EXPECT_THROW(ols_fit(y.head(2), X.topRows(2)), StatsError);
  EXPECT_THROW(ols_fit(y.head(3), X), StatsError);
}

TEST(Mediation, PointEstimatesMatchStatsmodels) {
  for (const auto& c : oracles()["mediation"]) {
    const auto d = fixture_data(c);
    MediationOptions opt;
    opt.n_sim = 50;
    opt.threads = 1;
    const auto r = mediation_bootstrap(d, 2, opt);
    EXPECT_TRUE(close(r.mediator_model.coefficients[2], c["a"], 1e-9, 1e-12));
    EXPECT_TRUE(close(r.outcome_model.coefficients[3], c["b"], 1e-9, 1e-12));
    EXPECT_TRUE(close(r.acme.estimate, c["acme"], 1e-9, 1e-12));
    EXPECT_TRUE(close(r.ade.estimate, c["ade"], 1e-9, 1e-12));
    EXPECT_TRUE(close(r.total.estimate, c["total"], 1e-9, 1e-12));
  }
}

TEST(Mediation, ProductOfCoefficients) {
  // a = 0.403 (arm -> load), b = -1.094 (load -> outcome)
  const auto p = mediation_point(0.403, -1.094, -1.2);
  EXPECT_NEAR(p.acme, -0.441, 0.001);
  EXPECT_DOUBLE_EQ(p.total, p.acme + p.ade);
  EXPECT_NEAR(p.prop_mediated, p.acme / p.total, 1e-15);
  EXPECT_TRUE(std::isnan(mediation_point(1.0, 1.0, -1.0).prop_mediated));
}

TEST(Mediation, BootstrapIndependentOfThreadCount) {
  const auto d = fixture_data(oracles()["mediation"][0]);
  MediationOptions opt;
  opt.n_sim = 400;
  opt.seed = 9;
  opt.threads = 1;
  const auto one = mediation_bootstrap(d, 2, opt);
  for (unsigned t : {2u, 3u, 7u}) {
    opt.threads = t;
    const auto many = mediation_bootstrap(d, 2, opt);
    EXPECT_EQ(many.acme.ci_low, one.acme.ci_low);
    EXPECT_EQ(many.acme.ci_high, one.acme.ci_high);
    EXPECT_EQ(many.acme.boot_se, one.acme.boot_se);
    EXPECT_EQ(many.ade.p_value, one.ade.p_value);
  }
  opt.seed = 10;
  EXPECT_NE(mediation_bootstrap(d, 2, opt).acme.ci_low, one.acme.ci_low);
}

TEST(Mediation, BootstrapSpreadAgreesWithDeltaMethod) {
  for (const auto& c : oracles()["mediation"]) {
    const auto d = fixture_data(c);
    MediationOptions opt;
    opt.n_sim = 2000;
    opt.seed = 4;
    const auto r = mediation_bootstrap(d, 2, opt);
    const double a = r.mediator_model.coefficients[2], sa = r.mediator_model.std_errors[2];
    const double b = r.outcome_model.coefficients[3], sb = r.outcome_model.std_errors[3];
    const double sobel = std::sqrt(b * b * sa * sa + a * a * sb * sb);
    EXPECT_NEAR(r.acme.boot_se / sobel, 1.0, 0.25);
    EXPECT_NEAR(r.ade.boot_se / r.outcome_model.std_errors[2], 1.0, 0.25);
    EXPECT_LE(r.acme.ci_low, r.acme.ci_high);
    EXPECT_LE(r.total.ci_low, r.total.estimate);
    EXPECT_GE(r.total.ci_high, r.total.estimate);
    EXPECT_EQ(r.failed_resamples, 0);
  }
}

TEST(Mediation, Errors) {
  auto d = fixture_data(oracles()["mediation"][0]);
  EXPECT_THROW(mediation_bootstrap(d, 0), StatsError);
  EXPECT_THROW(mediation_bootstrap(d, 3), StatsError);
  MediationOptions opt;
  opt.n_sim = 0;
  EXPECT_THROW(mediation_bootstrap(d, 2, opt), StatsError);
  d.outcome.pop_back();
  EXPECT_THROW(mediation_bootstrap(d, 2), StatsError);
}
