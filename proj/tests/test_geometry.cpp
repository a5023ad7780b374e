#include "doctest.h"

#include "svwc/geometry.hpp"
#include "svwc/obstacle_grid.hpp"
#include "svwc/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace svwc;
using namespace svwc::geometry;

namespace {

Scene
OneBoxScene ()
{
  Scene s;
  s.area = {20.0, 20.0, 3.5};
  s.obstacles.push_back ({{4.0, -1.0, 0.0}, {6.0, 1.0, 3.0}});
  return s;
}

} // namespace

TEST_CASE ("segment blocking by boxes")
{
  Scene empty;
  CHECK_FALSE (SegmentBlocked (empty, {0, 0, 1.5}, {10, 0, 1.5}));

  const Scene s = OneBoxScene ();
  CHECK (SegmentBlocked (s, {0, 0, 1.5}, {10, 0, 1.5}));
  CHECK_FALSE (SegmentBlocked (s, {0, 5, 1.5}, {10, 5, 1.5}));

  SUBCASE ("passing over the top is clear")
  {
    CHECK_FALSE (SegmentBlocked (s, {0, 0, 3.5}, {10, 0, 3.5}));
  }
  SUBCASE ("touching a face is not blockage")
  {
    CHECK_FALSE (SegmentBlocked (s, {0, 1, 1.5}, {10, 1, 1.5}));
    CHECK_FALSE (SegmentBlocked (s, {0, 0, 1.5}, {4, 0, 1.5}));
  }
  SUBCASE ("segment ending inside the box is blocked")
  {
    CHECK (SegmentBlocked (s, {0, 0, 1.5}, {5, 0, 1.5}));
  }
}

TEST_CASE ("segment blocking is symmetric")
{
  Scene s;
  s.area = {20.0, 20.0, 3.5};
  Rng rng (11);
  for (int i = 0; i < 15; ++i)
    {
      const double x = rng.Uniform (0, 18);
      const double y = rng.Uniform (0, 18);
      s.obstacles.push_back ({{x, y, 0}, {x + rng.Uniform (0.5, 2), y + rng.Uniform (0.5, 2), rng.Uniform (1, 3)}});
    }
  for (int i = 0; i < 2000; ++i)
    {
      const Point3 a{rng.Uniform (0, 20), rng.Uniform (0, 20), rng.Uniform (0, 3.5)};
      const Point3 b{rng.Uniform (0, 20), rng.Uniform (0, 20), rng.Uniform (0, 3.5)};
      CHECK (SegmentBlocked (s, a, b) == SegmentBlocked (s, b, a));
    }
}

TEST_CASE ("obstacle grid answers like the brute-force test")
{
  Scene s;
  s.area = {40.0, 30.0, 3.5};
  Rng rng (5);
  for (int i = 0; i < 80; ++i)
    {
      const double x = rng.Uniform (0, 38);
      const double y = rng.Uniform (0, 28);
      s.obstacles.push_back ({{x, y, 0}, {x + rng.Uniform (1, 3), y + rng.Uniform (1, 3), rng.Uniform (2.5, 3)}});
    }
  const ObstacleGrid grid (s);
  int blocked = 0;
  for (int i = 0; i < 5000; ++i)
    {
      const Point3 a{rng.Uniform (0, 40), rng.Uniform (0, 30), 3.0};
      const Point3 b{rng.Uniform (0, 40), rng.Uniform (0, 30), 1.5};
      const bool brute = SegmentBlocked (s, a, b);
      blocked += brute ? 1 : 0;
      REQUIRE (grid.Blocked (a, b) == brute);
    }
  // the sample must exercise both outcomes
  CHECK (blocked > 500);
  CHECK (blocked < 4500);
}

TEST_CASE ("bearing and range")
{
  const Pose origin ({0, 0, 0}, 0.0, 0.0);
  auto b = BearingAndRange (origin, {5, 0, 0});
  CHECK (b.azimuth == doctest::Approx (0.0));
  CHECK (b.elevation == doctest::Approx (0.0));
  CHECK (b.range == doctest::Approx (5.0));

  b = BearingAndRange (origin, {0, 5, 0});
  CHECK (b.azimuth == doctest::Approx (std::numbers::pi / 2));
  CHECK (b.elevation == doctest::Approx (0.0));

  b = BearingAndRange (origin, {3, 0, 4});
  CHECK (b.azimuth == doctest::Approx (0.0));
  CHECK (b.elevation == doctest::Approx (std::atan2 (4.0, 3.0)));
  CHECK (b.elevation == doctest::Approx (0.9273).epsilon (1e-4));
  CHECK (b.range == doctest::Approx (5.0));
}

TEST_CASE ("bearing round trip through rotated poses")
{
  Rng rng (3);
  for (int i = 0; i < 1000; ++i)
    {
      const Pose pose ({rng.Uniform (-5, 5), rng.Uniform (-5, 5), rng.Uniform (0, 3)}, rng.Uniform (-3.1, 3.1),
                       rng.Uniform (-1.5, 1.5));
      const Point3 p{rng.Uniform (-10, 10), rng.Uniform (-10, 10), rng.Uniform (-3, 3)};
      const Point3 back = PointFromBearing (pose, BearingAndRange (pose, p));
      CHECK (Distance (back, p) < 1e-9);
    }
}

TEST_CASE ("pose validation and frame")
{
  CHECK_THROWS_AS (Pose ({0, 0, 0}, 0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS (Pose ({NAN, 0, 0}, 0.0, 0.0), std::invalid_argument);
  const Pose wrapped ({0, 0, 0}, 3 * std::numbers::pi, 0.0);
  CHECK (wrapped.Yaw () >= -std::numbers::pi);
  CHECK (wrapped.Yaw () < std::numbers::pi);

  const Pose p ({1, 2, 3}, 0.3, -0.2);
  CHECK (Dot (p.Forward (), p.Left ()) == doctest::Approx (0.0).epsilon (1e-12));
  CHECK (Dot (p.Forward (), p.Up ()) == doctest::Approx (0.0).epsilon (1e-12));
  CHECK (Norm (p.Forward ()) == doctest::Approx (1.0));
  // right-handed: forward x left = up
  CHECK (Distance (Cross (p.Forward (), p.Left ()), p.Up ()) < 1e-12);
  // negative pitch tilts the boresight down
  CHECK (p.Forward ().z < 0.0);
}

TEST_CASE ("position along a trajectory")
{
  const Trajectory single (std::vector<Waypoint>{{0.0, {1, 2, 3}}});
  CHECK (PositionAt (single, -4.0) == Point3{1, 2, 3});
  CHECK (PositionAt (single, 7.0) == Point3{1, 2, 3});

  const Trajectory line ({{0.0, {0, 0, 0}}, {10.0, {10, 0, 0}}});
  CHECK (Distance (PositionAt (line, 5.0), {5, 0, 0}) < 1e-12);
  CHECK (Distance (PositionAt (line, 20.0), {10, 0, 0}) < 1e-12);
  CHECK (Distance (PositionAt (line, -1.0), {0, 0, 0}) < 1e-12);

  CHECK_THROWS_AS (Trajectory (std::vector<Waypoint>{}), std::invalid_argument);
  CHECK_THROWS_AS (Trajectory ({{1.0, {}}, {1.0, {}}}), std::invalid_argument);
}

TEST_CASE ("trajectory interpolation is Lipschitz in the max leg speed")
{
  const Trajectory t ({{0.0, {0, 0, 1.5}}, {2.0, {3, 0, 1.5}}, {3.0, {3, 2, 1.5}}, {7.0, {0, 0, 1.5}}});
  const double vmax = t.MaxSpeed ();
  CHECK (vmax == doctest::Approx (2.0));
  const double eps = 1e-3;
  for (double s = -0.5; s < 7.5; s += 0.01)
    {
      CHECK (Distance (PositionAt (t, s), PositionAt (t, s + eps)) <= vmax * eps + 1e-12);
    }
}

TEST_CASE ("linear extrapolation")
{
  const Trajectory still (std::vector<Waypoint>{{0.0, {2, 3, 1.5}}});
  CHECK (Distance (Extrapolate (still, 5.0, 2.0), {2, 3, 1.5}) < 1e-12);

  const Trajectory moving ({{0.0, {0, 0, 1.5}}, {100.0, {100, 0, 1.5}}});
  CHECK (Distance (Extrapolate (moving, 10.0, 0.5), {10.5, 0, 1.5}) < 1e-9);
  CHECK (Distance (Extrapolate (moving, 10.0, 0.0), {10, 0, 1.5}) < 1e-12);

  SUBCASE ("turn inside the window uses the least-squares fit")
  {
    // east at 1 m/s until t = 9.5, then north at 1 m/s
    const Trajectory turn ({{0.0, {0, 0, 0}}, {9.5, {9.5, 0, 0}}, {20.0, {9.5, 10.5, 0}}});
    // samples at t = 9, 9.5, 10 are (9,0), (9.5,0), (9.5,0.5); centred times -0.5, 0, 0.5
    const double vx = (-0.5 * 9.0 + 0.0 * 9.5 + 0.5 * 9.5) / 0.5;
    const double vy = (-0.5 * 0.0 + 0.0 * 0.0 + 0.5 * 0.5) / 0.5;
    CHECK (vx == doctest::Approx (0.5));
    CHECK (vy == doctest::Approx (0.5));
    const Point3 expected = Point3{9.5, 0.5, 0} + 2.0 * Point3{vx, vy, 0};
    CHECK (Distance (Extrapolate (turn, 10.0, 2.0, {1.0, 3}), expected) < 1e-9);
  }

  CHECK_THROWS_AS (Extrapolate (moving, 1.0, -0.1), std::invalid_argument);
}

TEST_CASE ("obstacle footprint density")
{
  Scene s;
  s.area = {10.0, 10.0, 3.0};
  CHECK (ObstacleDensity (s) == 0.0);
  s.obstacles.push_back ({{0, 0, 0}, {5, 5, 2}});
  CHECK (ObstacleDensity (s) == doctest::Approx (0.25));
  s.obstacles.push_back ({{0, 0, 0}, {5, 5, 2}});
  CHECK (ObstacleDensity (s) == doctest::Approx (0.25));
  s.obstacles.push_back ({{2.5, 2.5, 0}, {7.5, 7.5, 1}});
  CHECK (ObstacleDensity (s) == doctest::Approx ((25.0 + 25.0 - 6.25) / 100.0));
}

TEST_CASE ("density never decreases when a box is added")
{
  Scene s;
  s.area = {30.0, 20.0, 3.0};
  Rng rng (17);
  double prev = 0.0;
  for (int i = 0; i < 100; ++i)
    {
      const double x = rng.Uniform (0, 27);
      const double y = rng.Uniform (0, 17);
      s.obstacles.push_back ({{x, y, 0}, {x + rng.Uniform (0.2, 3), y + rng.Uniform (0.2, 3), 2}});
      const double d = ObstacleDensity (s);
      CHECK (d >= prev - 1e-12);
      CHECK (d <= 1.0);
      prev = d;
    }
}

TEST_CASE ("union area against a raster count")
{
  AreaSize area{12.0, 8.0, 3.0};
  Rng rng (23);
  std::vector<ObstacleBox> boxes;
  for (int i = 0; i < 12; ++i)
    {
      // integer-aligned boxes so a unit raster is exact
      const int x = static_cast<int> (rng.Index (10));
      const int y = static_cast<int> (rng.Index (6));
      boxes.push_back ({{double (x), double (y), 0}, {double (x + 1 + rng.Index (2)), double (y + 1 + rng.Index (2)), 1}});
    }
  int covered = 0;
  for (int x = 0; x < 12; ++x)
    {
      for (int y = 0; y < 8; ++y)
        {
          bool in = false;
          for (const auto& b : boxes)
            {
              in = in || (x + 0.5 > b.min_corner.x && x + 0.5 < b.max_corner.x && y + 0.5 > b.min_corner.y
                          && y + 0.5 < b.max_corner.y);
            }
          covered += in ? 1 : 0;
        }
    }
  CHECK (FootprintUnionArea (boxes, area) == doctest::Approx (covered));
}
