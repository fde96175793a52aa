#pragma once

#include <cmath>

namespace graphfield {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kSqrt2 = 1.41421356237309504880168872420969808;

inline double norm_pdf(double t) {
  return std::exp(-0.5 * t * t) / std::sqrt(2.0 * kPi);
}

inline double norm_cdf(double t) { return 0.5 * std::erfc(-t / kSqrt2); }

/// log Phi(t), stable for large negative t where Phi underflows.
inline double log_norm_cdf(double t) {
  if (t > -10.0) return std::log(norm_cdf(t));
  // Asymptotic expansion: Phi(t) ~ phi(t)/|t| * (1 - 1/t^2 + 3/t^4 - ...)
  const double t2 = t * t;
  const double series = 1.0 - 1.0 / t2 + 3.0 / (t2 * t2);
  return -0.5 * t2 - 0.5 * std::log(2.0 * kPi) - std::log(-t) +
         std::log(series);
}

/// Inverse Mills ratio phi(t)/Phi(t), stable for large negative t.
inline double mills_ratio(double t) {
  if (t > -10.0) return norm_pdf(t) / norm_cdf(t);
  const double t2 = t * t;
  const double series = 1.0 - 1.0 / t2 + 3.0 / (t2 * t2);
  return -t / series;
}

/// Volume of the unit ball in R^m: pi^{m/2} / Gamma(m/2 + 1).
inline double unit_ball_volume(int m) {
  return std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

}  // namespace graphfield
