#include "doctest.h"

#include "svwc/rach.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

using namespace svwc;
using namespace svwc::rach;

namespace {

RachConfig
Pool (int nSsb, int total)
{
  RachConfig c;
  c.n_ssb = nSsb;
  c.total_preambles = total;
  return c;
}

// Fraction of the p^m equally likely preamble choices in which mobile 0 is
// alone on its preamble, by brute-force enumeration.
double
EnumeratedSuccess (int m, int p)
{
  long total = 0;
  long alone = 0;
  std::vector<int> pick (static_cast<std::size_t> (m), 0);
  while (true)
    {
      ++total;
      bool ok = true;
      for (int j = 1; j < m; ++j)
        {
          ok = ok && pick[static_cast<std::size_t> (j)] != pick[0];
        }
      alone += ok ? 1 : 0;
      int k = 0;
      while (k < m && ++pick[static_cast<std::size_t> (k)] == p)
        {
          pick[static_cast<std::size_t> (k)] = 0;
          ++k;
        }
      if (k == m)
        {
          break;
        }
    }
  return static_cast<double> (alone) / static_cast<double> (total);
}

struct Paired
{
  double mean = 0.0;
  double half = 0.0;
};

// Mean and 95% half-width of a paired difference sample.
Paired
MeanCi (const std::vector<double>& d)
{
  const double n = static_cast<double> (d.size ());
  const double mean = std::accumulate (d.begin (), d.end (), 0.0) / n;
  double ss = 0.0;
  for (double x : d)
    {
      ss += (x - mean) * (x - mean);
    }
  return {mean, 1.96 * std::sqrt (ss / (n - 1) / n)};
}

const Placement kHotspot{20, 0.8};

} // namespace

TEST_CASE ("uniform allocation")
{
  CHECK (AllocateUniform (Pool (32, 64)).preambles_per_beam == std::vector<int> (32, 2));
  CHECK (AllocateUniform (Pool (8, 64)).preambles_per_beam == std::vector<int> (8, 8));
  CHECK (AllocateUniform (Pool (4, 10)).preambles_per_beam == std::vector<int>{3, 3, 2, 2});
}

TEST_CASE ("density allocation")
{
  RachConfig c = Pool (3, 8);
  CHECK (AllocateDensity (std::vector<int>{30, 1, 1}, c).preambles_per_beam == std::vector<int>{6, 1, 1});
  CHECK (AllocateDensity (std::vector<int>{0, 0, 0}, c) == AllocateUniform (c));

  c = Pool (32, 64);
  CHECK (AllocateDensity (std::vector<int> (32, 7), c) == AllocateUniform (c));

  Rng rng (1);
  for (int i = 0; i < 500; ++i)
    {
      RachConfig r = Pool (rng.Uniform () < 0.5 ? 8 : 32, 64 + static_cast<int> (rng.Index (64)));
      r.min_per_beam = static_cast<int> (rng.Index (2)) + 1;
      std::vector<int> counts (static_cast<std::size_t> (r.n_ssb));
      for (int& x : counts)
        {
          x = rng.Uniform () < 0.3 ? static_cast<int> (rng.Index (40)) : 0;
        }
      const auto a = AllocateDensity (counts, r).preambles_per_beam;
      CHECK (std::accumulate (a.begin (), a.end (), 0) == r.total_preambles);
      for (int x : a)
        {
          CHECK (x >= r.min_per_beam);
        }
    }

  CHECK_THROWS_AS (AllocateDensity (std::vector<int>{1, -1, 0}, Pool (3, 8)), std::invalid_argument);
}

TEST_CASE ("analytic collision oracle agrees with enumeration")
{
  CHECK (AnalyticSuccessProb (1, 5) == 1.0);
  CHECK (AnalyticSuccessProb (2, 64) == doctest::Approx (63.0 / 64.0));
  CHECK (AnalyticSuccessProb (3, 2) == doctest::Approx (0.25));
  for (int m = 1; m <= 6; ++m)
    {
      for (int p = 1; p <= 5; ++p)
        {
          CHECK (AnalyticSuccessProb (m, p) == doctest::Approx (EnumeratedSuccess (m, p)));
        }
    }
}

TEST_CASE ("contention round")
{
  Rng rng (2);
  const Allocation two{{2, 2}};

  SUBCASE ("a lone mobile always gets through")
  {
    const std::vector<std::vector<int>> att{{}, {7}};
    const auto r = RachRound (att, two, rng);
    CHECK (r.succeeded == std::vector<int>{7});
    CHECK (r.collided.empty ());
  }

  SUBCASE ("different beams never collide")
  {
    const std::vector<std::vector<int>> att{{1}, {2}};
    for (int i = 0; i < 100; ++i)
      {
        CHECK (RachRound (att, Allocation{{1, 1}}, rng).succeeded.size () == 2);
      }
  }

  SUBCASE ("two mobiles sharing two preambles")
  {
    const std::vector<std::vector<int>> att{{1, 2}, {}};
    int both = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i)
      {
        const auto r = RachRound (att, two, rng);
        // outcomes are all-or-nothing for a pair
        CHECK ((r.succeeded.size () == 2 || r.collided.size () == 2));
        both += r.succeeded.size () == 2 ? 1 : 0;
      }
    const double sigma = std::sqrt (0.25 / n);
    CHECK (std::abs (both / double (n) - 0.5) < 4 * sigma);
  }

  SUBCASE ("first-round success matches the analytic rate")
  {
    for (int m : {3, 7, 10})
      {
        for (int p : {2, 4, 16})
          {
            const std::vector<std::vector<int>> att{std::vector<int> (static_cast<std::size_t> (m), 0)};
            long ok = 0;
            const int rounds = 5000;
            for (int i = 0; i < rounds; ++i)
              {
                ok += static_cast<long> (RachRound (att, Allocation{{p}}, rng).succeeded.size ());
              }
            const double q = AnalyticSuccessProb (m, p);
            const double trials = double (rounds) * m;
            // per-mobile outcomes within a round are dependent; use a wide band
            CHECK (std::abs (ok / trials - q) < 6 * std::sqrt (q * (1 - q) * m / trials) + 1e-12);
          }
      }
  }
}

TEST_CASE ("hotspot placement")
{
  Rng rng (3);
  auto count = PlaceMobiles (256, 32, kHotspot, rng);
  REQUIRE (count.size () == 32);
  CHECK (std::accumulate (count.begin (), count.end (), 0) == 256);
  std::sort (count.begin (), count.end (), std::greater<> ());
  // round(0.8 * 256) = 205 over 20 beams, 51 over the remaining 12
  CHECK (std::accumulate (count.begin (), count.begin () + 20, 0) == 205);
  CHECK (count[0] - count[19] <= 1);
  CHECK (count[20] - count[31] <= 1);

  CHECK (PlaceMobiles (64, 32, Placement{0, 0.0}, rng) == std::vector<int> (32, 2));
}

TEST_CASE ("crowded beams are never left on one preamble")
{
  // two mobiles on beam 1 share a single preamble
  const Allocation tight{{6, 1, 1}};
  const std::vector<int> counts{30, 2, 0};
  const auto fixed = EnsureResolvable (tight, counts);
  CHECK (fixed.preambles_per_beam == std::vector<int>{5, 2, 1});

  // nothing to move when every donor is already at two
  CHECK (EnsureResolvable (Allocation{{2, 1}}, std::vector<int>{3, 3}).preambles_per_beam == std::vector<int>{2, 1});

  RachConfig cfg;
  cfg.total_preambles = 96;
  Rng rng (10);
  for (int i = 0; i < 300; ++i)
    {
      std::vector<int> c (32);
      for (int& x : c)
        {
          x = static_cast<int> (rng.Index (4));
        }
      const auto a = EnsureResolvable (AllocateDensity (c, cfg), c).preambles_per_beam;
      CHECK (std::accumulate (a.begin (), a.end (), 0) == 96);
      for (std::size_t b = 0; b < a.size (); ++b)
        {
          CHECK ((c[b] == 0 || a[b] >= 2));
        }
    }
}

TEST_CASE ("access latency accounting")
{
  const RachConfig cfg;
  Rng rng (4);
  const auto one = SimulateRach (1, Placement{}, RachScheme::uniform, cfg, 0.1, rng);
  REQUIRE (one.latency_ms.size () == 1);
  CHECK (one.latency_ms[0] == 20.0);
  CHECK (one.rounds_used == 1);

  RachConfig cal = cfg;
  cal.total_preambles = 96;
  const auto out = SimulateRach (256, kHotspot, RachScheme::svwc_density, cal, 0.1, rng);
  CHECK (out.latency_ms.size () == 256);
  for (double l : out.latency_ms)
    {
      const double retries = (l - cal.sweep_period_ms) / cal.retrial_period_ms;
      CHECK (retries >= 0.0);
      CHECK (retries == doctest::Approx (std::round (retries)));
    }
  CHECK (out.attempts_per_round.front () == 256);
  CHECK (std::accumulate (out.allocation.preambles_per_beam.begin (), out.allocation.preambles_per_beam.end (), 0)
         == 96);
}

TEST_CASE ("contention that never clears is reported with partial results")
{
  RachConfig cfg;
  cfg.max_rounds = 5;
  Rng rng (5);
  try
    {
      SimulateRach (256, Placement{4, 0.7}, RachScheme::uniform, cfg, 0.1, rng);
      FAIL ("expected RachIncomplete");
    }
  catch (const RachIncomplete& e)
    {
      CHECK (e.Partial ().rounds_used == 5);
      CHECK (e.Partial ().latency_ms.size () < 256);
      for (double l : e.Partial ().latency_ms)
        {
          CHECK (l <= 20.0 + 4 * 10.0);
        }
    }
}

TEST_CASE ("no advantage without spatial skew")
{
  RachConfig cfg;
  Rng rng (6);
  for (int i = 0; i < 20; ++i)
    {
      const auto out = SimulateRach (128, Placement{0, 0.0}, RachScheme::svwc_density, cfg, 0.0, rng);
      CHECK (out.allocation == AllocateUniform (cfg));
    }

  std::vector<double> diff;
  for (std::uint64_t t = 0; t < 300; ++t)
    {
      Rng a (DeriveSeed (7, t));
      Rng b (DeriveSeed (7, t));
      diff.push_back (SimulateRach (128, Placement{0, 0.0}, RachScheme::svwc_density, cfg, 0.0, a).MeanLatencyMs ()
                      - SimulateRach (128, Placement{0, 0.0}, RachScheme::uniform, cfg, 0.0, b).MeanLatencyMs ());
    }
  const auto ci = MeanCi (diff);
  CHECK (std::abs (ci.mean) <= ci.half + 1e-9);
}

TEST_CASE ("latency grows with load and density allocation helps under skew")
{
  RachConfig cfg;
  cfg.total_preambles = 96;
  std::vector<double> prevU (200, 0.0);
  std::vector<double> prevS (200, 0.0);
  for (int n : {64, 128, 256})
    {
      std::vector<double> u (200), s (200), gap (200), growU (200), growS (200);
      for (std::uint64_t t = 0; t < 200; ++t)
        {
          Rng a (DeriveSeed (8, t));
          Rng b (DeriveSeed (8, t));
          u[t] = SimulateRach (n, kHotspot, RachScheme::uniform, cfg, 0.1, a).MeanLatencyMs ();
          s[t] = SimulateRach (n, kHotspot, RachScheme::svwc_density, cfg, 0.1, b).MeanLatencyMs ();
          gap[t] = u[t] - s[t];
          growU[t] = u[t] - prevU[t];
          growS[t] = s[t] - prevS[t];
        }
      const auto g = MeanCi (gap);
      CHECK (g.mean - g.half > 0.0);
      CHECK (MeanCi (growU).mean >= 0.0);
      CHECK (MeanCi (growS).mean >= 0.0);
      prevU = u;
      prevS = s;
    }
}

TEST_CASE ("configuration checks")
{
  RachConfig c;
  c.n_ssb = 16;
  CHECK_THROWS_AS (c.Validate (), std::invalid_argument);
  CHECK_NOTHROW (c.Validate (true));
  c.n_ssb = 32;
  c.total_preambles = 16;
  CHECK_THROWS_AS (c.Validate (), std::invalid_argument);
  CHECK (ParseRachScheme (ToString (RachScheme::svwc_density)) == RachScheme::svwc_density);
  CHECK_FALSE (ParseRachScheme ("density").has_value ());
}
