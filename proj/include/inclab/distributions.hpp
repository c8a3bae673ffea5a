#pragma once

#include <cmath>
#include <string>

#include "inclab/error.hpp"
#include "inclab/special_functions.hpp"

namespace inclab {

enum class Distribution { t, chi_square, f, normal };

enum class Tail { upper, two_sided };

struct DistributionParams {
  double df1 = 1.0;  // t and chi-square df, or F numerator df
  double df2 = 1.0;  // F denominator df
};

/// Upper or two-sided tail probability of a test statistic.
///
/// t and normal support both tails; chi-square and F are upper-tail only.
inline double tail_probability(Distribution dist, double statistic, DistributionParams params = {},
                               Tail tail = Tail::upper) {
  if (std::isnan(statistic)) throw DomainError("tail probability of NaN statistic");
  switch (dist) {
    case Distribution::normal: {
      const double z = tail == Tail::two_sided ? std::abs(statistic) : statistic;
      const double upper = 0.5 * std::erfc(z / std::sqrt(2.0));
      return tail == Tail::two_sided ? std::min(1.0, 2.0 * upper) : upper;
    }
    case Distribution::t: {
      const double df = params.df1;
      if (!(df > 0.0)) throw DomainError("t distribution needs df > 0");
      if (std::isinf(statistic)) {
        if (tail == Tail::two_sided) return 0.0;
        return statistic > 0 ? 0.0 : 1.0;
      }
      const double t2 = statistic * statistic;
      // P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2)
      const double two_sided = beta_inc(0.5 * df, 0.5, df / (df + t2));
      if (tail == Tail::two_sided) return two_sided;
      return statistic >= 0.0 ? 0.5 * two_sided : 1.0 - 0.5 * two_sided;
    }
    case Distribution::chi_square: {
      if (tail != Tail::upper) throw DomainError("chi-square tail is upper only");
      if (!(params.df1 > 0.0)) throw DomainError("chi-square needs df > 0");
      if (statistic <= 0.0) return 1.0;
      return gamma_q(0.5 * params.df1, 0.5 * statistic);
    }
    case Distribution::f: {
      if (tail != Tail::upper) throw DomainError("F tail is upper only");
      const double d1 = params.df1;
      const double d2 = params.df2;
      if (!(d1 > 0.0 && d2 > 0.0)) throw DomainError("F distribution needs df1, df2 > 0");
      if (statistic <= 0.0) return 1.0;
      if (std::isinf(statistic)) return 0.0;
      return beta_inc(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * statistic));
    }
  }
  throw DomainError("unknown distribution");
}

}  // namespace inclab
