#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace svwc::geometry {

struct Point3
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Point3 operator+ (Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Point3 operator- (Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Point3 operator* (double s, Point3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr Point3 operator* (Point3 a, double s) { return s * a; }
  friend constexpr bool operator== (Point3, Point3) = default;
};

constexpr double
Dot (Point3 a, Point3 b)
{
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Point3
Cross (Point3 a, Point3 b)
{
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double
Norm (Point3 a)
{
  return std::sqrt (Dot (a, a));
}

inline double
Distance (Point3 a, Point3 b)
{
  return Norm (a - b);
}

inline bool
IsFinite (Point3 p)
{
  return std::isfinite (p.x) && std::isfinite (p.y) && std::isfinite (p.z);
}

/**
 * Position and boresight of a BS panel or camera.
 *
 * The local frame has x along the boresight, y to the left and z up. Yaw
 * rotates about the world z axis, pitch then tilts the boresight upward
 * (negative pitch = downtilt).
 */
class Pose
{
public:
  Pose () = default;
  /// Throws std::invalid_argument for non-finite input or |pitch| > pi/2.
  /// Yaw is wrapped into [-pi, pi).
  Pose (Point3 position, double yaw, double pitch);

  Point3 Position () const { return m_position; }
  double Yaw () const { return m_yaw; }
  double Pitch () const { return m_pitch; }

  Point3 Forward () const;
  Point3 Left () const;
  Point3 Up () const;

  Point3 ToLocal (Point3 world) const;
  Point3 ToWorld (Point3 local) const;

  friend bool operator== (const Pose&, const Pose&) = default;

private:
  Point3 m_position{};
  double m_yaw = 0.0;
  double m_pitch = 0.0;
};

/// Axis-aligned obstacle. Blockage tests use the open interior.
struct ObstacleBox
{
  Point3 min_corner;
  Point3 max_corner;

  bool IsValid () const;
  double FootprintArea () const;
  friend bool operator== (const ObstacleBox&, const ObstacleBox&) = default;
};

struct Waypoint
{
  double time = 0.0;
  Point3 position;
  friend bool operator== (const Waypoint&, const Waypoint&) = default;
};

class Trajectory
{
public:
  /// Throws std::invalid_argument when empty or times are not strictly increasing.
  explicit Trajectory (std::vector<Waypoint> waypoints);

  std::span<const Waypoint> Waypoints () const { return m_waypoints; }
  double StartTime () const { return m_waypoints.front ().time; }
  double EndTime () const { return m_waypoints.back ().time; }
  /// Largest speed over any leg, 0 for a single waypoint.
  double MaxSpeed () const;

private:
  std::vector<Waypoint> m_waypoints;
};

struct AreaSize
{
  double width = 40.0;
  double depth = 30.0;
  double height = 3.5;
  friend bool operator== (const AreaSize&, const AreaSize&) = default;
};

struct Scene
{
  AreaSize area;
  std::vector<Pose> bs_poses;
  std::vector<ObstacleBox> obstacles;
  std::vector<Trajectory> mobiles;

  bool Contains (Point3 p) const;
};

struct Bearing
{
  double azimuth = 0.0;
  double elevation = 0.0;
  double range = 0.0;
};

/// True iff the open segment (a, b) passes through the interior of an obstacle.
bool SegmentBlocked (const Scene& scene, Point3 a, Point3 b);

/// Same test against a single box.
bool SegmentIntersectsBox (const ObstacleBox& box, Point3 a, Point3 b);

/// Local spherical angles of `to` as seen from `from`.
Bearing BearingAndRange (const Pose& from, Point3 to);

/// Inverse of BearingAndRange.
Point3 PointFromBearing (const Pose& from, const Bearing& bearing);

/// Piecewise-linear interpolation, clamped outside the waypoint span.
Point3 PositionAt (const Trajectory& traj, double t);

struct ExtrapolationConfig
{
  double window_s = 1.0;
  int samples = 3;
  friend bool operator== (const ExtrapolationConfig&, const ExtrapolationConfig&) = default;
};

/**
 * Linear motion prediction. Samples the trajectory at `samples` equally spaced
 * instants over [now - window, now], fits a least-squares velocity and
 * projects the current position forward by `lookahead` seconds.
 */
Point3 Extrapolate (const Trajectory& traj, double now, double lookahead,
                    const ExtrapolationConfig& cfg = {});

/// Union of obstacle footprints (overlaps merged) over width x depth.
double ObstacleDensity (const Scene& scene);

/// Union area of axis-aligned rectangles [x0,x1]x[y0,y1] clipped to the area.
double FootprintUnionArea (std::span<const ObstacleBox> boxes, const AreaSize& area);

} // namespace svwc::geometry
