#pragma once

// Regularized incomplete gamma and beta functions.
//
// Each function has a power-series branch and a continued-fraction branch
// (modified Lentz). The public entry points pick whichever converges fast
// for the argument; both branches are exposed in `detail` so they can be
// evaluated against each other.

#include <cmath>
#include <limits>

#include "inclab/error.hpp"

namespace inclab {

namespace detail {

inline constexpr int kMaxIterations = 10000;
inline constexpr double kEpsilon = 1e-16;
inline constexpr double kTiny = 1e-300;

// P(a, x) by its power series; converges for all x, quickly for x < a + 1.
inline double gamma_p_series(double a, double x) {
  if (x == 0.0) return 0.0;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEpsilon) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * sum;
}

// Q(a, x) by its continued fraction; converges quickly for x > a + 1.
inline double gamma_q_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// I_x(a, b) = x^a / (a B(a,b)) * sum_n (1-b)_n / n! * a / (a + n) * x^n.
// Converges for x < 1; slowly as x approaches 1.
inline double beta_inc_series(double a, double b, double x) {
  if (x == 0.0) return 0.0;
  double coeff = 1.0;  // (1-b)_n / n!
  double sum = 1.0;    // n = 0 term times a/(a+0)
  for (int n = 1; n < 100 * kMaxIterations; ++n) {
    coeff *= (n - b) / n * x;
    const double term = coeff * a / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEpsilon && std::abs(coeff) < 1.0) break;
  }
  return std::exp(a * std::log(x) - std::log(a) - log_beta(a, b)) * sum;
}

// Continued fraction for I_x(a, b); converges quickly for x < (a+1)/(a+b+2).
inline double beta_inc_continued_fraction(double a, double b, double x) {
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) break;
  }
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - std::log(a) - log_beta(a, b));
  return front * h;
}

inline void check_shape(double a, const char* what) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError(std::string(what) + " must be finite and > 0");
}

}  // namespace detail

/// Lower regularized incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  detail::check_shape(a, "gamma shape");
  if (!(x >= 0.0)) throw DomainError("gamma_p requires x >= 0");
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_continued_fraction(a, x);
}

/// Upper regularized incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
  detail::check_shape(a, "gamma shape");
  if (!(x >= 0.0)) throw DomainError("gamma_q requires x >= 0");
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_continued_fraction(a, x);
}

/// Regularized incomplete beta I_x(a, b).
inline double beta_inc(double a, double b, double x) {
  detail::check_shape(a, "beta shape a");
  detail::check_shape(b, "beta shape b");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("beta_inc requires x in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) return detail::beta_inc_continued_fraction(a, b, x);
  return 1.0 - detail::beta_inc_continued_fraction(b, a, 1.0 - x);
}

}  // namespace inclab
