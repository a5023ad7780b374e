#pragma once

#include <cstddef>
#include <span>

namespace svwc::stats {

struct SummaryStats
{
  std::size_t n = 0;
  double mean = 0.0;
  /// sample standard deviation (n - 1 denominator), 0 for n = 1
  double std = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
};

/// Normal-approximation CI (mean +- 1.96 std / sqrt(n)); nearest-rank
/// percentiles. Throws std::invalid_argument for an empty input.
SummaryStats Summarize (std::span<const double> values);

/// Nearest-rank percentile: the ceil(q n)-th smallest value, q in (0, 1].
double Percentile (std::span<const double> values, double q);

} // namespace svwc::stats
