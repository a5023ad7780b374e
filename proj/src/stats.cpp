#include "svwc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace svwc::stats {

namespace {

double
NearestRank (const std::vector<double>& sorted, double q)
{
  const double n = static_cast<double> (sorted.size ());
  auto rank = static_cast<std::size_t> (std::ceil (q * n - 1e-12));
  rank = std::clamp<std::size_t> (rank, 1, sorted.size ());
  return sorted[rank - 1];
}

} // namespace

double
Percentile (std::span<const double> values, double q)
{
  if (values.empty () || !(q > 0.0 && q <= 1.0))
    {
      throw std::invalid_argument ("Percentile: need values and q in (0, 1]");
    }
  std::vector<double> sorted (values.begin (), values.end ());
  std::sort (sorted.begin (), sorted.end ());
  return NearestRank (sorted, q);
}

SummaryStats
Summarize (std::span<const double> values)
{
  if (values.empty ())
    {
      throw std::invalid_argument ("Summarize: at least one value required");
    }
  SummaryStats s;
  s.n = values.size ();
  // two-pass for accuracy
  double sum = 0.0;
  for (double v : values)
    {
      sum += v;
    }
  s.mean = sum / static_cast<double> (s.n);
  if (s.n > 1)
    {
      double ss = 0.0;
      for (double v : values)
        {
          ss += (v - s.mean) * (v - s.mean);
        }
      s.std = std::sqrt (ss / static_cast<double> (s.n - 1));
    }
  const double half = 1.959963984540054 * s.std / std::sqrt (static_cast<double> (s.n));
  s.ci95_low = s.mean - half;
  s.ci95_high = s.mean + half;

  std::vector<double> sorted (values.begin (), values.end ());
  std::sort (sorted.begin (), sorted.end ());
  s.p50 = NearestRank (sorted, 0.50);
  s.p95 = NearestRank (sorted, 0.95);
  return s;
}

} // namespace svwc::stats
