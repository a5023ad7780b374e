#pragma once

#include "svwc/geometry.hpp"
#include "svwc/obstacle_grid.hpp"
#include "svwc/phy.hpp"
#include "svwc/random.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace svwc::assoc {

using geometry::ObstacleGrid;

struct AssocConfig
{
  double dt = 0.01;
  double duration = 60.0;
  double rsrp_threshold_dbm = -60.0;
  double rlf_recovery_ms = 100.0;
  double reactive_ho_interruption_ms = 50.0;
  double proactive_ho_interruption_ms = 0.0;
  double lookahead_s = 0.5;
  double trend_window_s = 0.3;

  void Validate () const;
  int Steps () const;
  /// interruption length rounded up to whole steps
  int StepsFor (double ms) const;
  friend bool operator== (const AssocConfig&, const AssocConfig&) = default;
};

enum class AssocScheme
{
  reactive,
  trend,
  svwc
};

std::string_view ToString (AssocScheme s);
std::optional<AssocScheme> ParseAssocScheme (std::string_view text);

/**
 * Per-step RSRP and LoS state for every (mobile, BS) pair of one scene,
 * computed once and shared by all schemes of a trial. RSRP assumes the
 * serving beam is aligned (full 8x8 and 2x2 array gains).
 */
class LinkTable
{
public:
  LinkTable (const geometry::Scene& scene, const ObstacleGrid& grid, const phy::ChannelParams& params,
             const AssocConfig& cfg, const phy::UpaConfig& bsUpa = {}, const phy::UpaConfig& ueUpa = {2, 2, 0.5});

  int Steps () const { return m_steps; }
  std::size_t Mobiles () const { return m_mobiles; }
  std::size_t BaseStations () const { return m_bs; }

  double Rsrp (int step, std::size_t mobile, std::size_t bs) const { return m_rsrp[Index (step, mobile, bs)]; }
  bool Los (int step, std::size_t mobile, std::size_t bs) const { return m_los[Index (step, mobile, bs)] != 0; }
  /// Highest-RSRP BS at a step, ties to the lowest index.
  std::size_t BestBs (int step, std::size_t mobile) const;

private:
  std::size_t Index (int step, std::size_t mobile, std::size_t bs) const
  {
    return (static_cast<std::size_t> (step) * m_mobiles + mobile) * m_bs + bs;
  }

  int m_steps;
  std::size_t m_mobiles;
  std::size_t m_bs;
  std::vector<float> m_rsrp;
  std::vector<std::uint8_t> m_los;
};

struct AssocState
{
  std::vector<std::size_t> serving_bs;
  /// remaining interruption, in whole time steps
  std::vector<int> interruption_steps;
  std::vector<double> rate_accumulator;
  std::vector<int> handovers;
  std::vector<long> serving_steps;
  std::vector<long> interrupted_steps;

  /// Every mobile starts on its best BS at step 0.
  static AssocState Initial (const LinkTable& links);
};

struct StepContext
{
  const geometry::Scene& scene;
  const ObstacleGrid& grid;
  const LinkTable& links;
  const phy::ChannelParams& params;
  const AssocConfig& cfg;
  geometry::ExtrapolationConfig predictor;
};

/// True iff the extrapolated position `lookahead` seconds ahead is blocked
/// from the BS.
bool PredictBlockage (const geometry::Scene& scene, const geometry::Trajectory& traj, double now,
                      std::size_t bsIndex, double lookahead, const geometry::ExtrapolationConfig& predictor = {});

/// Same test through a prebuilt obstacle grid.
bool PredictBlockage (const geometry::Scene& scene, const ObstacleGrid& grid, const geometry::Trajectory& traj,
                      double now, std::size_t bsIndex, double lookahead,
                      const geometry::ExtrapolationConfig& predictor = {});

void StepReactive (AssocState& state, const StepContext& ctx, int step);
void StepProactiveSvwc (AssocState& state, const StepContext& ctx, int step);
void StepProactiveTrend (AssocState& state, const StepContext& ctx, int step);

/// Least-squares RSRP slope (dB/s) of `series` sampled every dt seconds.
double TrendSlope (std::span<const double> series, double dt);

/// True when a line through `series` (last sample at "now") crosses below
/// `threshold` within `lookahead` seconds.
bool TrendPredictsCrossing (std::span<const double> series, double dt, double threshold, double lookahead);

struct SceneGenConfig
{
  geometry::AreaSize area{40.0, 30.0, 3.5};
  int n_mobiles = 32;
  double bs_height = 3.0;
  double bs_downtilt_rad = -0.2;
  double mobile_height = 1.5;
  double min_speed = 0.5;
  double max_speed = 1.5;
  double obstacle_min_side = 1.0;
  double obstacle_max_side = 3.0;
  double obstacle_min_height = 2.5;
  double obstacle_max_height = 3.0;
  /// obstacles keep at least this horizontal distance from every BS
  double bs_clearance = 1.0;
  /// share of the walkable floor that must stay in one connected region
  double min_connected_fraction = 0.95;
  /// absolute tolerance on the achieved footprint fraction
  double density_tolerance = 0.005;

  friend bool operator== (const SceneGenConfig&, const SceneGenConfig&) = default;
};

/// Eight wall-mounted BSs, two per wall, facing the room with the configured downtilt.
std::vector<geometry::Pose> DefaultBsPoses (const SceneGenConfig& gen);

/// Random boxes until the footprint fraction is within tolerance of `density`.
/// A box is redrawn when it comes closer than bs_clearance to a BS or when it
/// would cut more than 1 - min_connected_fraction of the walkable floor off
/// from the main region.
std::vector<geometry::ObstacleBox> GenerateObstacles (double density, const SceneGenConfig& gen, Rng& rng);

/**
 * Floor occupancy at mobile height on a square raster. A cell is walkable
 * when its square keeps `margin` from every obstacle footprint and 0.5 m
 * from the walls. Walkable cells are labelled with 8-connected components so
 * that destinations are only drawn where a mobile can actually walk to.
 */
class WalkableMap
{
public:
  explicit WalkableMap (const geometry::Scene& scene, double margin = 0.3, double cellSize = 0.25);

  bool Walkable (geometry::Point3 p) const;
  /// Component label of the cell holding p, -1 when p is not walkable.
  int Component (geometry::Point3 p) const;
  /// Every sample along the segment (spacing a quarter cell) is walkable.
  bool SegmentWalkable (geometry::Point3 a, geometry::Point3 b) const;
  /**
   * Shortest 8-connected cell path (no corner cutting) from a to b,
   * string-pulled into straight walkable legs. The result starts at a and
   * ends at b; empty when b is not reachable from a.
   */
  std::vector<geometry::Point3> Route (geometry::Point3 a, geometry::Point3 b) const;
  double WalkableFraction () const;
  /// Label of the component with the most cells, -1 when nothing is walkable.
  int LargestComponent () const { return m_largest; }
  /// Cells in the largest component over all walkable cells (1 when none).
  double ConnectedFraction () const { return m_largestFraction; }

private:
  int CellOf (geometry::Point3 p) const;
  geometry::Point3 Center (int cell) const;

  double m_cell;
  double m_z;
  int m_nx;
  int m_ny;
  std::vector<char> m_free;
  std::vector<int> m_component;
  int m_largest = -1;
  double m_largestFraction = 0.0;
};

/**
 * Random-waypoint mobility over the walkable floor, covering [0, horizon].
 * Mobiles walk shortest routes around obstacles to uniformly drawn
 * reachable destinations, at a speed drawn per leg.
 *
 * Draw order: two uniforms per start-position attempt; then per leg two
 * uniforms per destination attempt followed by one uniform for the speed.
 * When 1000 destination attempts fail the mobile pauses for 1 s.
 */
geometry::Trajectory RandomWaypoint (const WalkableMap& map, const SceneGenConfig& gen, double horizon, Rng& rng);

struct AssocTrialResult
{
  double density = 0.0;
  AssocScheme scheme = AssocScheme::reactive;
  double mean_rate_bps = 0.0;
  int handovers = 0;
  double interruption_ms_total = 0.0;
  /// serving + interrupted time equals duration for every mobile
  bool time_conserved = true;
};

/// Runs one scheme over a prepared scene.
AssocTrialResult RunScheme (AssocScheme scheme, const geometry::Scene& scene, const ObstacleGrid& grid,
                            const LinkTable& links, const phy::ChannelParams& params, const AssocConfig& cfg,
                            const geometry::ExtrapolationConfig& predictor);

/**
 * One paired trial at one density: obstacles come from the stream
 * DeriveSeed(seed, 1), mobility from DeriveSeed(seed, 2), so every scheme
 * sees the same scene.
 */
std::vector<AssocTrialResult> RunAssocTrial (double density, std::span<const AssocScheme> schemes,
                                             std::uint64_t seed, const AssocConfig& cfg,
                                             const SceneGenConfig& gen, const phy::ChannelParams& params,
                                             const geometry::ExtrapolationConfig& predictor = {});

} // namespace svwc::assoc
