#include "svwc/rach.hpp"

#include "svwc/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace svwc::rach {

void
RachConfig::Validate (bool allowNonstandard) const
{
  if (n_ssb < 1 || (!allowNonstandard && n_ssb != 8 && n_ssb != 32))
    {
      throw std::invalid_argument ("RachConfig: n_ssb must be 8 or 32");
    }
  if (min_per_beam < 1)
    {
      throw std::invalid_argument ("RachConfig: min_per_beam must be >= 1");
    }
  if (total_preambles < n_ssb * min_per_beam)
    {
      throw std::invalid_argument ("RachConfig: total_preambles < n_ssb * min_per_beam");
    }
  if (!(sweep_period_ms > 0.0) || !(retrial_period_ms > 0.0) || max_rounds < 1)
    {
      throw std::invalid_argument ("RachConfig: periods and max_rounds must be positive");
    }
}

Allocation
AllocateUniform (const RachConfig& cfg)
{
  Allocation a;
  a.preambles_per_beam.resize (cfg.n_ssb);
  const int q = cfg.total_preambles / cfg.n_ssb;
  const int r = cfg.total_preambles % cfg.n_ssb;
  for (int i = 0; i < cfg.n_ssb; ++i)
    {
      a.preambles_per_beam[i] = q + (i < r ? 1 : 0);
    }
  return a;
}

Allocation
AllocateDensity (std::span<const int> counts, const RachConfig& cfg)
{
  if (static_cast<int> (counts.size ()) != cfg.n_ssb)
    {
      throw std::invalid_argument ("AllocateDensity: one count per SSB beam required");
    }
  long total = 0;
  for (int c : counts)
    {
      if (c < 0)
        {
          throw std::invalid_argument ("AllocateDensity: negative count");
        }
      total += c;
    }
  if (total == 0)
    {
      return AllocateUniform (cfg);
    }

  const int residual = cfg.total_preambles - cfg.n_ssb * cfg.min_per_beam;
  std::vector<int> base (cfg.n_ssb);
  std::vector<double> frac (cfg.n_ssb);
  int assigned = 0;
  for (int i = 0; i < cfg.n_ssb; ++i)
    {
      // integer numerator keeps the quotas exact for ties
      const long num = static_cast<long> (residual) * counts[i];
      base[i] = static_cast<int> (num / total);
      frac[i] = static_cast<double> (num % total) / static_cast<double> (total);
      assigned += base[i];
    }
  std::vector<int> order (cfg.n_ssb);
  std::iota (order.begin (), order.end (), 0);
  std::stable_sort (order.begin (), order.end (), [&] (int a, int b) { return frac[a] > frac[b]; });
  for (int k = 0; k < residual - assigned; ++k)
    {
      ++base[order[k]];
    }

  Allocation a;
  a.preambles_per_beam.resize (cfg.n_ssb);
  for (int i = 0; i < cfg.n_ssb; ++i)
    {
      a.preambles_per_beam[i] = cfg.min_per_beam + base[i];
    }
  return a;
}

Allocation
EnsureResolvable (Allocation alloc, std::span<const int> counts)
{
  auto& a = alloc.preambles_per_beam;
  if (counts.size () != a.size ())
    {
      throw std::invalid_argument ("EnsureResolvable: one count per SSB beam required");
    }
  for (std::size_t i = 0; i < a.size (); ++i)
    {
      while (counts[i] > 0 && a[i] < 2)
        {
          const auto donor = std::max_element (a.begin (), a.end ());
          if (*donor <= 2)
            {
              return alloc;
            }
          --*donor;
          ++a[i];
        }
    }
  return alloc;
}

RoundResult
RachRound (std::span<const std::vector<int>> attempting, const Allocation& alloc, Rng& rng)
{
  if (attempting.size () != alloc.preambles_per_beam.size ())
    {
      throw std::invalid_argument ("RachRound: attempt groups do not match the allocation");
    }
  RoundResult out;
  std::vector<int> picks;
  std::vector<int> hits;
  for (std::size_t b = 0; b < attempting.size (); ++b)
    {
      const auto& group = attempting[b];
      if (group.empty ())
        {
          continue;
        }
      const int p = alloc.preambles_per_beam[b];
      if (p < 1)
        {
          throw std::invalid_argument ("RachRound: beam with attempts but no preambles");
        }
      picks.resize (group.size ());
      hits.assign (p, 0);
      for (std::size_t i = 0; i < group.size (); ++i)
        {
          picks[i] = static_cast<int> (rng.Index (static_cast<std::uint64_t> (p)));
          ++hits[picks[i]];
        }
      for (std::size_t i = 0; i < group.size (); ++i)
        {
          (hits[picks[i]] == 1 ? out.succeeded : out.collided).push_back (group[i]);
        }
    }
  return out;
}

double
AnalyticSuccessProb (int m, int p)
{
  if (m < 1 || p < 1)
    {
      throw std::invalid_argument ("AnalyticSuccessProb: m and p must be >= 1");
    }
  return std::pow (static_cast<double> (p - 1) / p, m - 1);
}

std::string_view
ToString (RachScheme s)
{
  return s == RachScheme::uniform ? "uniform" : "svwc_density";
}

std::optional<RachScheme>
ParseRachScheme (std::string_view text)
{
  if (text == "uniform")
    {
      return RachScheme::uniform;
    }
  if (text == "svwc_density")
    {
      return RachScheme::svwc_density;
    }
  return std::nullopt;
}

std::vector<int>
PlaceMobiles (int nMobiles, int nSsb, const Placement& placement, Rng& rng)
{
  if (nMobiles < 0 || nSsb < 1 || placement.hotspot_beams < 0 || placement.hotspot_beams > nSsb
      || !(placement.hotspot_fraction >= 0.0 && placement.hotspot_fraction <= 1.0))
    {
      throw std::invalid_argument ("PlaceMobiles: bad placement parameters");
    }
  std::vector<int> sectors (nSsb);
  std::iota (sectors.begin (), sectors.end (), 0);
  std::shuffle (sectors.begin (), sectors.end (), rng.Engine ());

  std::vector<int> counts (nSsb, 0);
  auto spread = [&] (int n, int first, int last) {
    const int groups = last - first;
    for (int g = 0; g < groups; ++g)
      {
        counts[sectors[first + g]] = n / groups + (g < n % groups ? 1 : 0);
      }
  };

  const int k = placement.hotspot_beams;
  if (k == 0 || k == nSsb)
    {
      spread (nMobiles, 0, nSsb);
      return counts;
    }
  const int hot = static_cast<int> (std::lround (placement.hotspot_fraction * nMobiles));
  spread (hot, 0, k);
  spread (nMobiles - hot, k, nSsb);
  return counts;
}

double
RachOutcome::MeanLatencyMs () const
{
  if (latency_ms.empty ())
    {
      return 0.0;
    }
  return std::accumulate (latency_ms.begin (), latency_ms.end (), 0.0) / static_cast<double> (latency_ms.size ());
}

double
RachOutcome::FirstRoundCollisionRate () const
{
  if (attempts_per_round.empty () || attempts_per_round.front () == 0)
    {
      return 0.0;
    }
  return static_cast<double> (collisions_per_round.front ()) / attempts_per_round.front ();
}

RachOutcome
SimulateRach (int nMobiles, const Placement& placement, RachScheme scheme, const RachConfig& cfg,
              double countNoise, Rng& rng)
{
  if (nMobiles < 1)
    {
      throw std::invalid_argument ("SimulateRach: at least one mobile required");
    }
  RachOutcome out;
  out.mobiles_per_beam = PlaceMobiles (nMobiles, cfg.n_ssb, placement, rng);
  if (scheme == RachScheme::svwc_density)
    {
      const auto noisy = sensing::NoisyCounts (out.mobiles_per_beam, countNoise, rng);
      out.allocation = EnsureResolvable (AllocateDensity (noisy, cfg), noisy);
    }
  else
    {
      out.allocation = AllocateUniform (cfg);
    }

  std::vector<std::vector<int>> pending (cfg.n_ssb);
  int id = 0;
  for (int b = 0; b < cfg.n_ssb; ++b)
    {
      for (int k = 0; k < out.mobiles_per_beam[b]; ++k)
        {
          pending[b].push_back (id++);
        }
    }
  std::vector<int> beamOf (nMobiles);
  for (int b = 0; b < cfg.n_ssb; ++b)
    {
      for (int m : pending[b])
        {
          beamOf[m] = b;
        }
    }

  std::vector<double> latency (nMobiles, -1.0);
  int remaining = nMobiles;
  for (int round = 1; round <= cfg.max_rounds && remaining > 0; ++round)
    {
      const RoundResult r = RachRound (pending, out.allocation, rng);
      out.rounds_used = round;
      out.attempts_per_round.push_back (remaining);
      out.collisions_per_round.push_back (static_cast<int> (r.collided.size ()));
      for (int m : r.succeeded)
        {
          latency[m] = cfg.sweep_period_ms + (round - 1) * cfg.retrial_period_ms;
        }
      remaining -= static_cast<int> (r.succeeded.size ());
      for (auto& g : pending)
        {
          g.clear ();
        }
      for (int m : r.collided)
        {
          pending[beamOf[m]].push_back (m);
        }
    }

  for (double l : latency)
    {
      if (l >= 0.0)
        {
          out.latency_ms.push_back (l);
        }
    }
  if (remaining > 0)
    {
      throw RachIncomplete ("SimulateRach: " + std::to_string (remaining) + " mobiles still contending after "
                                + std::to_string (cfg.max_rounds) + " rounds",
                            std::move (out));
    }
  return out;
}

} // namespace svwc::rach
