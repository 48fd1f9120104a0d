#pragma once

#include <span>

namespace lifemodel {

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> xs);
double median(std::span<const double> xs);

struct RankTestResult {
  double u = 0.0;        // Mann-Whitney U of the first sample
  double z = 0.0;        // normal approximation, positive when the first sample ranks higher
  double p_value = 1.0;  // two-sided
};

/// Two-sided Mann-Whitney U test, normal approximation with tie and continuity corrections.
RankTestResult mann_whitney(std::span<const double> a, std::span<const double> b);

}  // namespace lifemodel
