#pragma once

#include "svwc/random.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace svwc::rach {

struct RachConfig
{
  int n_ssb = 32;
  int total_preambles = 64;
  double sweep_period_ms = 20.0;
  double retrial_period_ms = 10.0;
  int max_rounds = 500;
  int min_per_beam = 1;

  /// n_ssb must be 8 or 32 unless `allowNonstandard`.
  void Validate (bool allowNonstandard = false) const;
  friend bool operator== (const RachConfig&, const RachConfig&) = default;
};

struct Allocation
{
  std::vector<int> preambles_per_beam;
  friend bool operator== (const Allocation&, const Allocation&) = default;
};

/// floor(total/S) per beam, one extra for the first total mod S beams.
Allocation AllocateUniform (const RachConfig& cfg);

/**
 * Largest-remainder apportionment proportional to `counts`. Every beam first
 * receives min_per_beam; the residual pool is split by quota, leftover units
 * go to the largest fractional parts (ties to the lowest index). All-zero
 * counts fall back to AllocateUniform.
 */
Allocation AllocateDensity (std::span<const int> counts, const RachConfig& cfg);

/**
 * Gives every beam with a non-zero count at least two preambles, moving
 * single units from the beam with the largest allocation (ties to the lowest
 * index) while that beam keeps more than two. Retries re-draw from the same
 * set, so two contenders on a one-preamble beam would collide forever.
 */
Allocation EnsureResolvable (Allocation alloc, std::span<const int> counts);

struct RoundResult
{
  std::vector<int> succeeded;
  std::vector<int> collided;
};

/**
 * One contention round. `attempting[b]` lists the mobile ids transmitting on
 * beam b. Draws one uniform preamble index per mobile, beams in index order,
 * mobiles in list order. Output ids keep that same order.
 */
RoundResult RachRound (std::span<const std::vector<int>> attempting, const Allocation& alloc, Rng& rng);

/// ((p-1)/p)^(m-1)
double AnalyticSuccessProb (int m, int p);

enum class RachScheme
{
  uniform,
  svwc_density
};

std::string_view ToString (RachScheme s);
std::optional<RachScheme> ParseRachScheme (std::string_view text);

/**
 * Hotspot placement in SSB-sector space: `hotspot_beams` sectors (chosen by
 * a shuffle of all sector indices) share round(hotspot_fraction * n) mobiles
 * as evenly as possible, the other sectors share the rest the same way.
 * hotspot_beams = 0 gives an even spread over all sectors.
 */
struct Placement
{
  int hotspot_beams = 4;
  double hotspot_fraction = 0.7;
  friend bool operator== (const Placement&, const Placement&) = default;
};

/// Mobiles per sector. Draws one std::shuffle of the sector indices.
std::vector<int> PlaceMobiles (int nMobiles, int nSsb, const Placement& placement, Rng& rng);

struct RachOutcome
{
  std::vector<double> latency_ms;
  int rounds_used = 0;
  std::vector<int> collisions_per_round;
  std::vector<int> attempts_per_round;
  std::vector<int> mobiles_per_beam;
  Allocation allocation;

  double MeanLatencyMs () const;
  double FirstRoundCollisionRate () const;
};

/// Raised when mobiles are still contending after max_rounds; carries the
/// latencies of the mobiles that did get through.
class RachIncomplete : public std::runtime_error
{
public:
  RachIncomplete (const std::string& what, RachOutcome partial)
    : std::runtime_error (what),
      m_partial (std::move (partial))
  {
  }
  const RachOutcome& Partial () const { return m_partial; }

private:
  RachOutcome m_partial;
};

/**
 * Full access procedure for `nMobiles` mobiles.
 *
 * Draw order: PlaceMobiles, then (svwc_density only) NoisyCounts with
 * `countNoise` relative sigma, then one RachRound per round. The density
 * scheme allocates with AllocateDensity followed by EnsureResolvable on the
 * sensed counts.
 */
RachOutcome SimulateRach (int nMobiles, const Placement& placement, RachScheme scheme, const RachConfig& cfg,
                          double countNoise, Rng& rng);

} // namespace svwc::rach
