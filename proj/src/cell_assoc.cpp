#include "svwc/cell_assoc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <stdexcept>

namespace svwc::assoc {

using geometry::Point3;

namespace {

constexpr std::pair<AssocScheme, std::string_view> kSchemeNames[] = {
  {AssocScheme::reactive, "reactive"},
  {AssocScheme::trend, "trend"},
  {AssocScheme::svwc, "svwc"},
};

double
RateBps (double rsrpDbm, const phy::ChannelParams& params)
{
  const double snr = phy::DbToLinear (rsrpDbm - params.NoisePowerDbm ());
  return phy::ShannonRate (snr, params.bandwidth_hz);
}

// Handles the common start of every step. Returns false when the mobile is
// in an interruption this step (no rate, nothing else to decide).
bool
ServeStep (AssocState& state, const StepContext& ctx, int step, std::size_t i)
{
  if (state.interruption_steps[i] > 0)
    {
      --state.interruption_steps[i];
      ++state.interrupted_steps[i];
      return false;
    }
  ++state.serving_steps[i];
  state.rate_accumulator[i] += RateBps (ctx.links.Rsrp (step, i, state.serving_bs[i]), ctx.params);
  return true;
}

void
HandOver (AssocState& state, const StepContext& ctx, std::size_t i, std::size_t target, double interruptionMs)
{
  state.serving_bs[i] = target;
  state.interruption_steps[i] = ctx.cfg.StepsFor (interruptionMs);
  ++state.handovers[i];
}

void
ReactiveCheck (AssocState& state, const StepContext& ctx, int step, std::size_t i)
{
  const std::size_t s = state.serving_bs[i];
  if (!(ctx.links.Rsrp (step, i, s) < ctx.cfg.rsrp_threshold_dbm))
    {
      return;
    }
  const std::size_t best = ctx.links.BestBs (step, i);
  if (best == s)
    {
      return;
    }
  // an NLoS serving link below threshold is a radio link failure
  const double ms = ctx.links.Los (step, i, s) ? ctx.cfg.reactive_ho_interruption_ms : ctx.cfg.rlf_recovery_ms;
  HandOver (state, ctx, i, best, ms);
}

} // namespace

void
AssocConfig::Validate () const
{
  if (!(dt > 0.0) || !(duration > 0.0) || !(lookahead_s > 0.0) || !(trend_window_s > 0.0))
    {
      throw std::invalid_argument ("AssocConfig: dt, duration, lookahead and trend window must be positive");
    }
  if (rlf_recovery_ms < 0.0 || reactive_ho_interruption_ms < 0.0 || proactive_ho_interruption_ms < 0.0)
    {
      throw std::invalid_argument ("AssocConfig: interruption times must be >= 0");
    }
  if (dt > lookahead_s)
    {
      throw std::invalid_argument ("AssocConfig: dt must not exceed the lookahead");
    }
}

int
AssocConfig::Steps () const
{
  return static_cast<int> (std::lround (duration / dt));
}

int
AssocConfig::StepsFor (double ms) const
{
  // tolerate representation error so 50 ms at dt = 0.01 s is exactly 5 steps
  return static_cast<int> (std::ceil (ms / (dt * 1000.0) - 1e-9));
}

std::string_view
ToString (AssocScheme s)
{
  for (const auto& [k, name] : kSchemeNames)
    {
      if (k == s)
        {
          return name;
        }
    }
  return "unknown";
}

std::optional<AssocScheme>
ParseAssocScheme (std::string_view text)
{
  for (const auto& [k, name] : kSchemeNames)
    {
      if (name == text)
        {
          return k;
        }
    }
  return std::nullopt;
}

LinkTable::LinkTable (const geometry::Scene& scene, const ObstacleGrid& grid, const phy::ChannelParams& params,
                      const AssocConfig& cfg, const phy::UpaConfig& bsUpa, const phy::UpaConfig& ueUpa)
  : m_steps (cfg.Steps ()),
    m_mobiles (scene.mobiles.size ()),
    m_bs (scene.bs_poses.size ())
{
  if (m_bs == 0)
    {
      throw std::invalid_argument ("LinkTable: scene has no base stations");
    }
  const std::size_t n = static_cast<std::size_t> (m_steps) * m_mobiles * m_bs;
  m_rsrp.resize (n);
  m_los.resize (n);
  const double arrayDb = 10.0 * std::log10 (static_cast<double> (bsUpa.Elements ()))
                         + 10.0 * std::log10 (static_cast<double> (ueUpa.Elements ()));
  for (int k = 0; k < m_steps; ++k)
    {
      const double t = k * cfg.dt;
      for (std::size_t i = 0; i < m_mobiles; ++i)
        {
          const Point3 p = geometry::PositionAt (scene.mobiles[i], t);
          for (std::size_t j = 0; j < m_bs; ++j)
            {
              const Point3 b = scene.bs_poses[j].Position ();
              const bool los = !grid.Blocked (b, p);
              const double pg = phy::PathGainDb (geometry::Distance (b, p), los, params);
              const std::size_t idx = Index (k, i, j);
              m_rsrp[idx] = static_cast<float> (params.tx_power_dbm + pg + arrayDb);
              m_los[idx] = los ? 1 : 0;
            }
        }
    }
}

std::size_t
LinkTable::BestBs (int step, std::size_t mobile) const
{
  std::size_t best = 0;
  for (std::size_t j = 1; j < m_bs; ++j)
    {
      if (Rsrp (step, mobile, j) > Rsrp (step, mobile, best))
        {
          best = j;
        }
    }
  return best;
}

AssocState
AssocState::Initial (const LinkTable& links)
{
  const std::size_t n = links.Mobiles ();
  AssocState s;
  s.serving_bs.resize (n);
  s.interruption_steps.assign (n, 0);
  s.rate_accumulator.assign (n, 0.0);
  s.handovers.assign (n, 0);
  s.serving_steps.assign (n, 0);
  s.interrupted_steps.assign (n, 0);
  for (std::size_t i = 0; i < n; ++i)
    {
      s.serving_bs[i] = links.BestBs (0, i);
    }
  return s;
}

bool
PredictBlockage (const geometry::Scene& scene, const geometry::Trajectory& traj, double now, std::size_t bsIndex,
                 double lookahead, const geometry::ExtrapolationConfig& predictor)
{
  const Point3 ahead = geometry::Extrapolate (traj, now, lookahead, predictor);
  return geometry::SegmentBlocked (scene, scene.bs_poses.at (bsIndex).Position (), ahead);
}

bool
PredictBlockage (const geometry::Scene& scene, const ObstacleGrid& grid, const geometry::Trajectory& traj,
                 double now, std::size_t bsIndex, double lookahead, const geometry::ExtrapolationConfig& predictor)
{
  const Point3 ahead = geometry::Extrapolate (traj, now, lookahead, predictor);
  return grid.Blocked (scene.bs_poses.at (bsIndex).Position (), ahead);
}

void
StepReactive (AssocState& state, const StepContext& ctx, int step)
{
  for (std::size_t i = 0; i < state.serving_bs.size (); ++i)
    {
      if (ServeStep (state, ctx, step, i))
        {
          ReactiveCheck (state, ctx, step, i);
        }
    }
}

void
StepProactiveSvwc (AssocState& state, const StepContext& ctx, int step)
{
  const double now = step * ctx.cfg.dt;
  for (std::size_t i = 0; i < state.serving_bs.size (); ++i)
    {
      if (!ServeStep (state, ctx, step, i))
        {
          continue;
        }
      const auto& traj = ctx.scene.mobiles[i];
      const Point3 ahead = geometry::Extrapolate (traj, now, ctx.cfg.lookahead_s, ctx.predictor);
      const std::size_t s = state.serving_bs[i];
      if (!ctx.grid.Blocked (ctx.scene.bs_poses[s].Position (), ahead))
        {
          ReactiveCheck (state, ctx, step, i);
          continue;
        }
      std::size_t best = s;
      double bestRsrp = -std::numeric_limits<double>::infinity ();
      for (std::size_t j = 0; j < ctx.scene.bs_poses.size (); ++j)
        {
          if (j == s || ctx.grid.Blocked (ctx.scene.bs_poses[j].Position (), ahead))
            {
              continue;
            }
          const double r = ctx.links.Rsrp (step, i, j);
          if (r > bestRsrp)
            {
              bestRsrp = r;
              best = j;
            }
        }
      if (best == s)
        {
          // every BS is predicted blocked: nothing better to move to
          ReactiveCheck (state, ctx, step, i);
          continue;
        }
      HandOver (state, ctx, i, best, ctx.cfg.proactive_ho_interruption_ms);
    }
}

double
TrendSlope (std::span<const double> series, double dt)
{
  const std::size_t n = series.size ();
  if (n < 2)
    {
      return 0.0;
    }
  const double tMean = 0.5 * static_cast<double> (n - 1) * dt;
  double yMean = 0.0;
  for (double y : series)
    {
      yMean += y;
    }
  yMean /= static_cast<double> (n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    {
      const double dtk = static_cast<double> (k) * dt - tMean;
      sxy += dtk * (series[k] - yMean);
      sxx += dtk * dtk;
    }
  return sxy / sxx;
}

bool
TrendPredictsCrossing (std::span<const double> series, double dt, double threshold, double lookahead)
{
  const std::size_t n = series.size ();
  if (n < 2)
    {
      return false;
    }
  const double slope = TrendSlope (series, dt);
  double yMean = 0.0;
  for (double y : series)
    {
      yMean += y;
    }
  yMean /= static_cast<double> (n);
  const double tNow = static_cast<double> (n - 1) * dt;
  const double tMean = 0.5 * tNow;
  const double fitNow = yMean + slope * (tNow - tMean);
  const double fitAhead = fitNow + slope * lookahead;
  return std::min (fitNow, fitAhead) < threshold;
}

void
StepProactiveTrend (AssocState& state, const StepContext& ctx, int step)
{
  const int window = static_cast<int> (std::lround (ctx.cfg.trend_window_s / ctx.cfg.dt));
  const int first = std::max (0, step - window);
  std::vector<double> series;
  for (std::size_t i = 0; i < state.serving_bs.size (); ++i)
    {
      if (!ServeStep (state, ctx, step, i))
        {
          continue;
        }
      const std::size_t s = state.serving_bs[i];
      if (ctx.links.Rsrp (step, i, s) < ctx.cfg.rsrp_threshold_dbm)
        {
          ReactiveCheck (state, ctx, step, i);
          continue;
        }
      series.clear ();
      for (int k = first; k <= step; ++k)
        {
          series.push_back (ctx.links.Rsrp (k, i, s));
        }
      if (!TrendPredictsCrossing (series, ctx.cfg.dt, ctx.cfg.rsrp_threshold_dbm, ctx.cfg.lookahead_s))
        {
          continue;
        }
      const std::size_t best = ctx.links.BestBs (step, i);
      if (best != s)
        {
          HandOver (state, ctx, i, best, ctx.cfg.reactive_ho_interruption_ms);
        }
    }
}

std::vector<geometry::Pose>
DefaultBsPoses (const SceneGenConfig& gen)
{
  const double w = gen.area.width;
  const double d = gen.area.depth;
  const double h = gen.bs_height;
  const double tilt = gen.bs_downtilt_rad;
  const double pi = std::numbers::pi;
  return {
    {{0.0, d / 3.0, h}, 0.0, tilt},          {{0.0, 2.0 * d / 3.0, h}, 0.0, tilt},
    {{w, d / 3.0, h}, pi, tilt},             {{w, 2.0 * d / 3.0, h}, pi, tilt},
    {{w / 3.0, 0.0, h}, pi / 2.0, tilt},     {{2.0 * w / 3.0, 0.0, h}, pi / 2.0, tilt},
    {{w / 3.0, d, h}, -pi / 2.0, tilt},      {{2.0 * w / 3.0, d, h}, -pi / 2.0, tilt},
  };
}

std::vector<geometry::ObstacleBox>
GenerateObstacles (double density, const SceneGenConfig& gen, Rng& rng)
{
  if (density < 0.0 || density > 0.5)
    {
      throw std::invalid_argument ("GenerateObstacles: density must lie in [0, 0.5]");
    }
  std::vector<geometry::ObstacleBox> boxes;
  if (density == 0.0)
    {
      return boxes;
    }
  const double areaXY = gen.area.width * gen.area.depth;
  const auto bsPoses = DefaultBsPoses (gen);
  auto nearBs = [&] (const geometry::ObstacleBox& box) {
    for (const auto& pose : bsPoses)
      {
        const Point3 b = pose.Position ();
        const double dx = std::max ({box.min_corner.x - b.x, 0.0, b.x - box.max_corner.x});
        const double dy = std::max ({box.min_corner.y - b.y, 0.0, b.y - box.max_corner.y});
        if (std::hypot (dx, dy) < gen.bs_clearance)
          {
            return true;
          }
      }
    return false;
  };
  geometry::Scene probe;
  probe.area = gen.area;
  double current = 0.0;
  for (int attempt = 0; attempt < 200000 && current < density - gen.density_tolerance; ++attempt)
    {
      const double sx = rng.Uniform (gen.obstacle_min_side, gen.obstacle_max_side);
      const double sy = rng.Uniform (gen.obstacle_min_side, gen.obstacle_max_side);
      const double sz = rng.Uniform (gen.obstacle_min_height, gen.obstacle_max_height);
      // corners range past the walls and the box is clipped to the room, so
      // coverage is as likely next to a wall as in the middle
      const double x0 = rng.Uniform (-sx, gen.area.width);
      const double y0 = rng.Uniform (-sy, gen.area.depth);
      const geometry::ObstacleBox box{{std::max (x0, 0.0), std::max (y0, 0.0), 0.0},
                                      {std::min (x0 + sx, gen.area.width), std::min (y0 + sy, gen.area.depth), sz}};
      if (box.max_corner.x - box.min_corner.x < 0.2 || box.max_corner.y - box.min_corner.y < 0.2)
        {
          continue;
        }
      if (nearBs (box))
        {
          continue;
        }
      boxes.push_back (box);
      const double next = geometry::FootprintUnionArea (boxes, gen.area) / areaXY;
      if (next > density + gen.density_tolerance)
        {
          boxes.pop_back ();
          continue;
        }
      probe.obstacles = boxes;
      if (WalkableMap (probe).ConnectedFraction () < gen.min_connected_fraction)
        {
          boxes.pop_back ();
          continue;
        }
      current = next;
    }
  if (current < density - gen.density_tolerance)
    {
      throw std::runtime_error ("GenerateObstacles: could not reach the target density");
    }
  return boxes;
}

WalkableMap::WalkableMap (const geometry::Scene& scene, double margin, double cellSize)
  : m_cell (cellSize),
    m_z (0.0),
    m_nx (static_cast<int> (std::ceil (scene.area.width / cellSize))),
    m_ny (static_cast<int> (std::ceil (scene.area.depth / cellSize)))
{
  if (!(cellSize > 0.0) || !(margin >= 0.0))
    {
      throw std::invalid_argument ("WalkableMap: cell size must be positive and margin non-negative");
    }
  constexpr double kWallMargin = 0.5;
  m_free.assign (static_cast<std::size_t> (m_nx) * m_ny, 0);
  for (int iy = 0; iy < m_ny; ++iy)
    {
      for (int ix = 0; ix < m_nx; ++ix)
        {
          const double x0 = ix * cellSize;
          const double y0 = iy * cellSize;
          const bool inside = x0 >= kWallMargin && y0 >= kWallMargin && x0 + cellSize <= scene.area.width - kWallMargin
                              && y0 + cellSize <= scene.area.depth - kWallMargin;
          m_free[iy * m_nx + ix] = inside ? 1 : 0;
        }
    }
  // rasterize every inflated footprint
  for (const auto& b : scene.obstacles)
    {
      const int ix0 = std::max (0, static_cast<int> (std::floor ((b.min_corner.x - margin) / cellSize)));
      const int ix1 = std::min (m_nx - 1, static_cast<int> (std::floor ((b.max_corner.x + margin) / cellSize)));
      const int iy0 = std::max (0, static_cast<int> (std::floor ((b.min_corner.y - margin) / cellSize)));
      const int iy1 = std::min (m_ny - 1, static_cast<int> (std::floor ((b.max_corner.y + margin) / cellSize)));
      for (int iy = iy0; iy <= iy1; ++iy)
        {
          for (int ix = ix0; ix <= ix1; ++ix)
            {
              m_free[iy * m_nx + ix] = 0;
            }
        }
    }

  m_component.assign (m_free.size (), -1);
  int label = 0;
  std::vector<int> stack;
  for (int c = 0; c < static_cast<int> (m_free.size ()); ++c)
    {
      if (!m_free[c] || m_component[c] >= 0)
        {
          continue;
        }
      m_component[c] = label;
      stack.push_back (c);
      while (!stack.empty ())
        {
          const int cur = stack.back ();
          stack.pop_back ();
          const int cx = cur % m_nx;
          const int cy = cur / m_nx;
          for (int dy = -1; dy <= 1; ++dy)
            {
              for (int dx = -1; dx <= 1; ++dx)
                {
                  const int nx = cx + dx;
                  const int ny = cy + dy;
                  if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= m_nx || ny >= m_ny)
                    {
                      continue;
                    }
                  const int n = ny * m_nx + nx;
                  // diagonal steps may not cut a blocked corner
                  const bool corner = dx != 0 && dy != 0 && !(m_free[cy * m_nx + nx] && m_free[ny * m_nx + cx]);
                  if (m_free[n] && m_component[n] < 0 && !corner)
                    {
                      m_component[n] = label;
                      stack.push_back (n);
                    }
                }
            }
        }
      ++label;
    }
  std::vector<int> sizes (label, 0);
  for (int c : m_component)
    {
      if (c >= 0)
        {
          ++sizes[c];
        }
    }
  if (label > 0)
    {
      m_largest = static_cast<int> (std::max_element (sizes.begin (), sizes.end ()) - sizes.begin ());
    }
  const auto walkable = std::count (m_free.begin (), m_free.end (), 1);
  m_largestFraction = walkable > 0 ? static_cast<double> (sizes[m_largest]) / static_cast<double> (walkable) : 1.0;
}

int
WalkableMap::CellOf (Point3 p) const
{
  const int ix = static_cast<int> (std::floor (p.x / m_cell));
  const int iy = static_cast<int> (std::floor (p.y / m_cell));
  if (ix < 0 || iy < 0 || ix >= m_nx || iy >= m_ny)
    {
      return -1;
    }
  return iy * m_nx + ix;
}

Point3
WalkableMap::Center (int cell) const
{
  return {(cell % m_nx + 0.5) * m_cell, (cell / m_nx + 0.5) * m_cell, m_z};
}

bool
WalkableMap::Walkable (Point3 p) const
{
  const int c = CellOf (p);
  return c >= 0 && m_free[c];
}

int
WalkableMap::Component (Point3 p) const
{
  const int c = CellOf (p);
  return c >= 0 && m_free[c] ? m_component[c] : -1;
}

double
WalkableMap::WalkableFraction () const
{
  return static_cast<double> (std::count (m_free.begin (), m_free.end (), 1)) / static_cast<double> (m_free.size ());
}

bool
WalkableMap::SegmentWalkable (Point3 a, Point3 b) const
{
  const double len = std::hypot (b.x - a.x, b.y - a.y);
  const int n = std::max (1, static_cast<int> (std::ceil (len / (0.25 * m_cell))));
  for (int k = 0; k <= n; ++k)
    {
      const double f = static_cast<double> (k) / n;
      if (!Walkable ({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y), a.z}))
        {
          return false;
        }
    }
  return true;
}

std::vector<Point3>
WalkableMap::Route (Point3 a, Point3 b) const
{
  const int start = CellOf (a);
  const int goal = CellOf (b);
  if (start < 0 || goal < 0 || !m_free[start] || !m_free[goal] || m_component[start] != m_component[goal])
    {
      return {};
    }
  if (start == goal)
    {
      return {a, b};
    }

  // A* with the octile heuristic
  const double diag = std::sqrt (2.0);
  auto h = [&] (int c) {
    const double dx = std::abs (c % m_nx - goal % m_nx);
    const double dy = std::abs (c / m_nx - goal / m_nx);
    return std::max (dx, dy) + (diag - 1.0) * std::min (dx, dy);
  };
  std::vector<double> g (m_free.size (), std::numeric_limits<double>::infinity ());
  std::vector<int> parent (m_free.size (), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  g[start] = 0.0;
  open.push ({h (start), start});
  while (!open.empty ())
    {
      const auto [f, cur] = open.top ();
      open.pop ();
      if (cur == goal)
        {
          break;
        }
      if (f > g[cur] + h (cur) + 1e-9)
        {
          continue;
        }
      const int cx = cur % m_nx;
      const int cy = cur / m_nx;
      for (int dy = -1; dy <= 1; ++dy)
        {
          for (int dx = -1; dx <= 1; ++dx)
            {
              const int nx = cx + dx;
              const int ny = cy + dy;
              if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= m_nx || ny >= m_ny)
                {
                  continue;
                }
              const int n = ny * m_nx + nx;
              if (!m_free[n] || (dx != 0 && dy != 0 && !(m_free[cy * m_nx + nx] && m_free[ny * m_nx + cx])))
                {
                  continue;
                }
              const double cost = g[cur] + (dx != 0 && dy != 0 ? diag : 1.0);
              if (cost < g[n])
                {
                  g[n] = cost;
                  parent[n] = cur;
                  open.push ({cost + h (n), n});
                }
            }
        }
    }

  std::vector<Point3> cells;
  for (int c = goal; c != start; c = parent[c])
    {
      cells.push_back ({Center (c).x, Center (c).y, a.z});
    }
  std::reverse (cells.begin (), cells.end ());
  cells.back () = b;

  // string pulling: keep only the corners the straight line cannot skip
  std::vector<Point3> route{a};
  Point3 anchor = a;
  for (std::size_t i = 1; i < cells.size (); ++i)
    {
      if (!SegmentWalkable (anchor, cells[i]))
        {
          anchor = cells[i - 1];
          route.push_back (anchor);
        }
    }
  route.push_back (b);
  return route;
}

geometry::Trajectory
RandomWaypoint (const WalkableMap& map, const SceneGenConfig& gen, double horizon, Rng& rng)
{
  const double z = gen.mobile_height;
  auto draw = [&] { return Point3{rng.Uniform (0.0, gen.area.width), rng.Uniform (0.0, gen.area.depth), z}; };

  std::optional<Point3> start;
  for (int attempt = 0; attempt < 100000 && !start; ++attempt)
    {
      const Point3 p = draw ();
      if (map.Component (p) == map.LargestComponent () && map.LargestComponent () >= 0)
        {
          start = p;
        }
    }
  if (!start)
    {
      throw std::runtime_error ("RandomWaypoint: no walkable start position");
    }
  const int component = map.Component (*start);

  std::vector<geometry::Waypoint> wps{{0.0, *start}};
  while (wps.back ().time < horizon)
    {
      const auto [t, p] = wps.back ();
      std::optional<Point3> dest;
      for (int attempt = 0; attempt < 1000 && !dest; ++attempt)
        {
          const Point3 q = draw ();
          if (map.Component (q) == component && geometry::Distance (p, q) > 1e-6)
            {
              dest = q;
            }
        }
      if (!dest)
        {
          wps.push_back ({t + 1.0, p});
          continue;
        }
      const double speed = rng.Uniform (gen.min_speed, gen.max_speed);
      const auto route = map.Route (p, *dest);
      double time = t;
      for (std::size_t k = 1; k < route.size (); ++k)
        {
          const double leg = geometry::Distance (route[k - 1], route[k]);
          if (leg < 1e-9)
            {
              continue;
            }
          time += leg / speed;
          wps.push_back ({time, route[k]});
        }
    }
  return geometry::Trajectory (std::move (wps));
}

AssocTrialResult
RunScheme (AssocScheme scheme, const geometry::Scene& scene, const ObstacleGrid& grid, const LinkTable& links,
           const phy::ChannelParams& params, const AssocConfig& cfg, const geometry::ExtrapolationConfig& predictor)
{
  AssocState state = AssocState::Initial (links);
  const StepContext ctx{scene, grid, links, params, cfg, predictor};
  const int steps = links.Steps ();
  for (int k = 0; k < steps; ++k)
    {
      switch (scheme)
        {
        case AssocScheme::reactive:
          StepReactive (state, ctx, k);
          break;
        case AssocScheme::trend:
          StepProactiveTrend (state, ctx, k);
          break;
        case AssocScheme::svwc:
          StepProactiveSvwc (state, ctx, k);
          break;
        }
    }

  AssocTrialResult res;
  res.scheme = scheme;
  const std::size_t n = links.Mobiles ();
  double rateSum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    {
      rateSum += state.rate_accumulator[i] / steps;
      res.handovers += state.handovers[i];
      res.interruption_ms_total += state.interrupted_steps[i] * cfg.dt * 1000.0;
      res.time_conserved = res.time_conserved && (state.serving_steps[i] + state.interrupted_steps[i] == steps);
    }
  res.mean_rate_bps = n > 0 ? rateSum / static_cast<double> (n) : 0.0;
  return res;
}

std::vector<AssocTrialResult>
RunAssocTrial (double density, std::span<const AssocScheme> schemes, std::uint64_t seed, const AssocConfig& cfg,
               const SceneGenConfig& gen, const phy::ChannelParams& params,
               const geometry::ExtrapolationConfig& predictor)
{
  cfg.Validate ();
  geometry::Scene scene;
  scene.area = gen.area;
  scene.bs_poses = DefaultBsPoses (gen);
  {
    Rng obstacleRng (DeriveSeed (seed, 1));
    scene.obstacles = GenerateObstacles (density, gen, obstacleRng);
  }
  const ObstacleGrid grid (scene);
  {
    const WalkableMap floor (scene);
    Rng mobilityRng (DeriveSeed (seed, 2));
    const double horizon = cfg.duration + cfg.lookahead_s + 1.0;
    for (int i = 0; i < gen.n_mobiles; ++i)
      {
        scene.mobiles.push_back (RandomWaypoint (floor, gen, horizon, mobilityRng));
      }
  }
  const LinkTable links (scene, grid, params, cfg);

  std::vector<AssocTrialResult> out;
  for (AssocScheme s : schemes)
    {
      AssocTrialResult r = RunScheme (s, scene, grid, links, params, cfg, predictor);
      r.density = density;
      out.push_back (r);
    }
  return out;
}

} // namespace svwc::assoc
