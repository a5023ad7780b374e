#include "svwc/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace svwc::geometry {

namespace {

double
WrapYaw (double yaw)
{
  const double twoPi = 2.0 * std::numbers::pi;
  double w = std::fmod (yaw + std::numbers::pi, twoPi);
  if (w < 0.0)
    {
      w += twoPi;
    }
  w -= std::numbers::pi;
  // fmod can land exactly on +pi after the shift
  if (w >= std::numbers::pi)
    {
      w -= twoPi;
    }
  return w;
}

} // namespace

Pose::Pose (Point3 position, double yaw, double pitch)
  : m_position (position)
{
  if (!IsFinite (position) || !std::isfinite (yaw) || !std::isfinite (pitch))
    {
      throw std::invalid_argument ("Pose: non-finite component");
    }
  if (std::abs (pitch) > std::numbers::pi / 2.0)
    {
      throw std::invalid_argument ("Pose: pitch outside [-pi/2, pi/2]");
    }
  m_yaw = WrapYaw (yaw);
  m_pitch = pitch;
}

Point3
Pose::Forward () const
{
  const double cp = std::cos (m_pitch);
  return {cp * std::cos (m_yaw), cp * std::sin (m_yaw), std::sin (m_pitch)};
}

Point3
Pose::Left () const
{
  return {-std::sin (m_yaw), std::cos (m_yaw), 0.0};
}

Point3
Pose::Up () const
{
  const double sp = std::sin (m_pitch);
  return {-sp * std::cos (m_yaw), -sp * std::sin (m_yaw), std::cos (m_pitch)};
}

Point3
Pose::ToLocal (Point3 world) const
{
  const Point3 d = world - m_position;
  return {Dot (d, Forward ()), Dot (d, Left ()), Dot (d, Up ())};
}

Point3
Pose::ToWorld (Point3 local) const
{
  return m_position + local.x * Forward () + local.y * Left () + local.z * Up ();
}

bool
ObstacleBox::IsValid () const
{
  return IsFinite (min_corner) && IsFinite (max_corner) && min_corner.x <= max_corner.x
         && min_corner.y <= max_corner.y && min_corner.z <= max_corner.z;
}

double
ObstacleBox::FootprintArea () const
{
  return (max_corner.x - min_corner.x) * (max_corner.y - min_corner.y);
}

Trajectory::Trajectory (std::vector<Waypoint> waypoints)
  : m_waypoints (std::move (waypoints))
{
  if (m_waypoints.empty ())
    {
      throw std::invalid_argument ("Trajectory: at least one waypoint required");
    }
  for (std::size_t i = 1; i < m_waypoints.size (); ++i)
    {
      if (!(m_waypoints[i].time > m_waypoints[i - 1].time))
        {
          throw std::invalid_argument ("Trajectory: waypoint times must be strictly increasing");
        }
    }
}

double
Trajectory::MaxSpeed () const
{
  double vmax = 0.0;
  for (std::size_t i = 1; i < m_waypoints.size (); ++i)
    {
      const double dt = m_waypoints[i].time - m_waypoints[i - 1].time;
      vmax = std::max (vmax, Distance (m_waypoints[i].position, m_waypoints[i - 1].position) / dt);
    }
  return vmax;
}

bool
Scene::Contains (Point3 p) const
{
  return p.x >= 0.0 && p.x <= area.width && p.y >= 0.0 && p.y <= area.depth && p.z >= 0.0
         && p.z <= area.height;
}

bool
SegmentIntersectsBox (const ObstacleBox& box, Point3 a, Point3 b)
{
  const double origin[3] = {a.x, a.y, a.z};
  const double dir[3] = {b.x - a.x, b.y - a.y, b.z - a.z};
  const double lo[3] = {box.min_corner.x, box.min_corner.y, box.min_corner.z};
  const double hi[3] = {box.max_corner.x, box.max_corner.y, box.max_corner.z};

  double tEnter = 0.0;
  double tExit = 1.0;
  for (int axis = 0; axis < 3; ++axis)
    {
      if (dir[axis] == 0.0)
        {
          // parallel to this slab: must lie strictly inside it
          if (origin[axis] <= lo[axis] || origin[axis] >= hi[axis])
            {
              return false;
            }
          continue;
        }
      double t0 = (lo[axis] - origin[axis]) / dir[axis];
      double t1 = (hi[axis] - origin[axis]) / dir[axis];
      if (t0 > t1)
        {
          std::swap (t0, t1);
        }
      tEnter = std::max (tEnter, t0);
      tExit = std::min (tExit, t1);
      if (!(tEnter < tExit))
        {
          return false;
        }
    }
  return tEnter < tExit;
}

bool
SegmentBlocked (const Scene& scene, Point3 a, Point3 b)
{
  return std::any_of (scene.obstacles.begin (), scene.obstacles.end (),
                      [&] (const ObstacleBox& box) { return SegmentIntersectsBox (box, a, b); });
}

Bearing
BearingAndRange (const Pose& from, Point3 to)
{
  const Point3 local = from.ToLocal (to);
  Bearing out;
  out.range = Norm (local);
  out.azimuth = std::atan2 (local.y, local.x);
  out.elevation = std::atan2 (local.z, std::hypot (local.x, local.y));
  return out;
}

Point3
PointFromBearing (const Pose& from, const Bearing& bearing)
{
  const double ce = std::cos (bearing.elevation);
  const Point3 local{bearing.range * ce * std::cos (bearing.azimuth),
                     bearing.range * ce * std::sin (bearing.azimuth),
                     bearing.range * std::sin (bearing.elevation)};
  return from.ToWorld (local);
}

Point3
PositionAt (const Trajectory& traj, double t)
{
  const auto wps = traj.Waypoints ();
  if (t <= wps.front ().time)
    {
      return wps.front ().position;
    }
  if (t >= wps.back ().time)
    {
      return wps.back ().position;
    }
  const auto it = std::upper_bound (wps.begin (), wps.end (), t,
                                    [] (double value, const Waypoint& w) { return value < w.time; });
  const Waypoint& next = *it;
  const Waypoint& prev = *(it - 1);
  const double f = (t - prev.time) / (next.time - prev.time);
  return prev.position + f * (next.position - prev.position);
}

Point3
Extrapolate (const Trajectory& traj, double now, double lookahead, const ExtrapolationConfig& cfg)
{
  if (lookahead < 0.0)
    {
      throw std::invalid_argument ("Extrapolate: negative lookahead");
    }
  const Point3 current = PositionAt (traj, now);
  if (lookahead == 0.0 || cfg.samples < 2 || cfg.window_s <= 0.0)
    {
      return current;
    }

  const int n = cfg.samples;
  const double step = cfg.window_s / (n - 1);
  const double tMean = now - cfg.window_s / 2.0;
  Point3 pMean{};
  std::vector<Point3> samples (n);
  for (int i = 0; i < n; ++i)
    {
      samples[i] = PositionAt (traj, now - cfg.window_s + i * step);
      pMean = pMean + samples[i];
    }
  pMean = (1.0 / n) * pMean;

  double sxx = 0.0;
  Point3 sxp{};
  for (int i = 0; i < n; ++i)
    {
      const double dt = (now - cfg.window_s + i * step) - tMean;
      sxx += dt * dt;
      sxp = sxp + dt * (samples[i] - pMean);
    }
  const Point3 velocity = (1.0 / sxx) * sxp;
  return current + lookahead * velocity;
}

double
FootprintUnionArea (std::span<const ObstacleBox> boxes, const AreaSize& area)
{
  struct Rect
  {
    double x0, x1, y0, y1;
  };
  std::vector<Rect> rects;
  rects.reserve (boxes.size ());
  for (const auto& b : boxes)
    {
      Rect r{std::clamp (b.min_corner.x, 0.0, area.width), std::clamp (b.max_corner.x, 0.0, area.width),
             std::clamp (b.min_corner.y, 0.0, area.depth), std::clamp (b.max_corner.y, 0.0, area.depth)};
      if (r.x1 > r.x0 && r.y1 > r.y0)
        {
          rects.push_back (r);
        }
    }
  if (rects.empty ())
    {
      return 0.0;
    }

  std::vector<double> xs;
  xs.reserve (2 * rects.size ());
  for (const auto& r : rects)
    {
      xs.push_back (r.x0);
      xs.push_back (r.x1);
    }
  std::sort (xs.begin (), xs.end ());
  xs.erase (std::unique (xs.begin (), xs.end ()), xs.end ());

  double total = 0.0;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < xs.size (); ++i)
    {
      const double xa = xs[i];
      const double xb = xs[i + 1];
      spans.clear ();
      for (const auto& r : rects)
        {
          if (r.x0 <= xa && r.x1 >= xb)
            {
              spans.emplace_back (r.y0, r.y1);
            }
        }
      if (spans.empty ())
        {
          continue;
        }
      std::sort (spans.begin (), spans.end ());
      double covered = 0.0;
      double curLo = spans.front ().first;
      double curHi = spans.front ().second;
      for (std::size_t k = 1; k < spans.size (); ++k)
        {
          if (spans[k].first > curHi)
            {
              covered += curHi - curLo;
              curLo = spans[k].first;
              curHi = spans[k].second;
            }
          else
            {
              curHi = std::max (curHi, spans[k].second);
            }
        }
      covered += curHi - curLo;
      total += covered * (xb - xa);
    }
  return total;
}

double
ObstacleDensity (const Scene& scene)
{
  const double areaXY = scene.area.width * scene.area.depth;
  if (areaXY <= 0.0)
    {
      return 0.0;
    }
  return FootprintUnionArea (scene.obstacles, scene.area) / areaXY;
}

} // namespace svwc::geometry
