#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace crn {

/// Smallest probability a message component may take before logs/ratios.
inline constexpr double kProbFloor = 1e-300;

/// Stand-in for -inf log-ratios ("this state is impossible").
inline constexpr double kForcedZero = -1e9;
/// Stand-in for +inf log-ratios ("the other state is impossible").
inline constexpr double kForcedOne = 1e9;

inline double safe_log(double p) { return std::log(std::max(p, kProbFloor)); }

inline double log_add_exp(double x, double y) {
  if (x == -std::numeric_limits<double>::infinity()) return y;
  if (y == -std::numeric_limits<double>::infinity()) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(-std::abs(x - y)));
}

inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// log(1 + e^x) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// Logistic function 1 / (1 + e^{-x}).
inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(e^x - 1) for x > 0.
inline double log_expm1(double x) {
  return x > 30.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
}

}  // namespace crn
