// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace ctcdec {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow; either side may be -inf.
inline double LogAdd(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kLogZero) return a;
  return a + std::log1p(std::exp(b - a));
}

inline double LogSumExp(std::span<const double> values) {
  double max = kLogZero;
  for (double v : values) max = std::max(max, v);
  if (max == kLogZero) return kLogZero;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

}  // namespace ctcdec
