#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "inclab/distributions.hpp"
#include "inclab/error.hpp"

namespace inclab {

struct OlsFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd t_values;
  Eigen::VectorXd p_values;
  Eigen::VectorXd residuals;
  double sigma2 = 0.0;  // residual variance, RSS / (n - p)
  double r_squared = 0.0;
  double f_statistic = 0.0;
  double f_p_value = 1.0;
  int df_residual = 0;
};

/// Ordinary least squares with classical standard errors. X must contain
/// the intercept column if one is wanted.
inline OlsFit ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
  const auto n = X.rows();
  const auto p = X.cols();
  if (y.size() != n) throw StatsError("ols_fit: design rows and response length differ");
  if (p == 0 || n <= p) throw StatsError("ols_fit: need more observations than coefficients");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) throw StatsError("ols_fit: singular design (rank " + std::to_string(qr.rank()) + ")");

  OlsFit fit;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - X * fit.coefficients;
  fit.df_residual = static_cast<int>(n - p);
  const double rss = fit.residuals.squaredNorm();
  fit.sigma2 = rss / fit.df_residual;

  // (X'X)^-1 = P R^-1 R^-T P^T
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd xtx_inv_perm = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  const Eigen::MatrixXd xtx_inv = perm * xtx_inv_perm * perm.transpose();

  fit.std_errors = (fit.sigma2 * xtx_inv.diagonal()).cwiseSqrt();
  fit.t_values = fit.coefficients.cwiseQuotient(fit.std_errors);
  fit.p_values.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double t = fit.t_values[j];
    fit.p_values[j] = std::isfinite(t)
                          ? tail_probability(Distribution::t, t, {double(fit.df_residual)}, Tail::two_sided)
                          : 0.0;
  }

  const double mean = y.mean();
  const double tss = (y.array() - mean).square().sum();
  fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;
  if (p > 1 && fit.r_squared < 1.0) {
    fit.f_statistic = (fit.r_squared / double(p - 1)) / ((1.0 - fit.r_squared) / fit.df_residual);
    fit.f_p_value = tail_probability(Distribution::f, fit.f_statistic, {double(p - 1), double(fit.df_residual)});
  } else if (p > 1) {
    fit.f_statistic = std::numeric_limits<double>::infinity();
    fit.f_p_value = 0.0;
  }
  return fit;
}

}  // namespace inclab
