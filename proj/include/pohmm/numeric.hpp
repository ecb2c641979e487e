#ifndef POHMM_NUMERIC_HPP
#define POHMM_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace pohmm {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without leaving log space.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

/// Max-shifted log(sum(exp(xs))).  Empty input yields -inf.
inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return kNegInf;
  const double hi = *std::max_element(xs.begin(), xs.end());
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// In-place x_i <- x_i - log_sum_exp(x).  Rows of logits become normalized
/// log probabilities; entries stay finite for any finite input.
inline void log_normalize(std::span<double> xs) {
  const double lse = log_sum_exp(xs);
  for (double& x : xs) x -= lse;
}

/// softmax(xs); the result sums to 1 up to rounding.
inline std::vector<double> softmax(std::span<const double> xs) {
  std::vector<double> p(xs.begin(), xs.end());
  const double hi = *std::max_element(p.begin(), p.end());
  double acc = 0.0;
  for (double& x : p) {
    x = std::exp(x - hi);
    acc += x;
  }
  for (double& x : p) x /= acc;
  return p;
}

} // namespace pohmm

#endif
