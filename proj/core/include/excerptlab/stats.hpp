// Small shared statistics helpers.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "excerptlab/errors.hpp"

namespace excerptlab {

inline double sample_mean(std::span<const double> x) {
  if (x.empty()) throw DataError("sample_mean: empty input");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Unbiased (n-1) sample variance.
inline double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw DataError("sample_variance: need at least 2 values");
  const double m = sample_mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

inline double sample_sd(std::span<const double> x) {
  return std::sqrt(sample_variance(x));
}

// Pearson correlation.  Requires at least 3 pairs and nonzero variance on
// both sides; those degenerate cases are reported, not silently NaN.
inline double pearson_correlation(std::span<const double> x,
                                  std::span<const double> y) {
  if (x.size() != y.size())
    throw DataError("pearson_correlation: length mismatch (" +
                    std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()) + ")");
  if (x.size() < 3)
    throw DataError("pearson_correlation: need at least 3 pairs, got " +
                    std::to_string(x.size()));
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw DataError("pearson_correlation: zero variance input");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace excerptlab
