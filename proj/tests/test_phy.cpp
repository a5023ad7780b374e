#include "doctest.h"

#include "svwc/phy.hpp"
#include "svwc/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace svwc;
using namespace svwc::phy;
using geometry::Point3;
using geometry::Pose;
using geometry::Scene;

namespace {

double
SquaredNorm (std::span<const Complex> v)
{
  double s = 0.0;
  for (const auto& c : v)
    {
      s += std::norm (c);
    }
  return s;
}

Scene
SingleBsScene ()
{
  Scene s;
  s.area = {30.0, 30.0, 5.0};
  s.bs_poses.emplace_back (Point3{0, 0, 0}, 0.0, 0.0);
  return s;
}

} // namespace

TEST_CASE ("path loss")
{
  CHECK (PathLossDb (1.0, 100.0).db == doctest::Approx (72.4).epsilon (1e-9));
  CHECK (PathLossDb (10.0, 100.0).db == doctest::Approx (89.7).epsilon (1e-9));
  // 72.4 + 17.3 * 1.0791812 = 91.0698; the often-quoted 91.066 is a rounding slip
  CHECK (std::abs (PathLossDb (12.0, 100.0).db - 91.0698) < 0.001);
  CHECK (std::abs (PathLossDb (12.0, 100.0).db - 91.066) < 0.01);
  CHECK_FALSE (PathLossDb (1.0, 100.0).clamped);

  const auto near = PathLossDb (0.3, 100.0);
  CHECK (near.clamped);
  CHECK (near.db == doctest::Approx (72.4));

  double prev = PathLossDb (1.0, 100.0).db;
  for (double d = 1.5; d < 60.0; d += 0.5)
    {
      const double pl = PathLossDb (d, 100.0).db;
      CHECK (pl > prev);
      prev = pl;
    }
  CHECK (PathLossDb (5.0, 140.0).db > PathLossDb (5.0, 100.0).db);
}

TEST_CASE ("steering vectors")
{
  const auto broadside = SteeringVector ({8, 8, 0.5}, 0.0, 0.0);
  REQUIRE (broadside.size () == 64);
  for (const auto& c : broadside)
    {
      CHECK (c.real () == doctest::Approx (0.125));
      CHECK (std::abs (c.imag ()) < 1e-15);
    }

  // 2x2 at az = pi/2: half-wavelength spacing flips the sign along m
  const auto side = SteeringVector ({2, 2, 0.5}, std::numbers::pi / 2, 0.0);
  REQUIRE (side.size () == 4);
  for (int n = 0; n < 2; ++n)
    {
      CHECK (std::abs (side[0 * 2 + n] - Complex (0.5, 0.0)) < 1e-12);
      CHECK (std::abs (side[1 * 2 + n] - Complex (-0.5, 0.0)) < 1e-12);
    }

  Rng rng (1);
  for (int i = 0; i < 200; ++i)
    {
      const UpaConfig upa{1 + static_cast<int> (rng.Index (8)), 1 + static_cast<int> (rng.Index (8)), 0.5};
      const auto v = SteeringVector (upa, rng.Uniform (-3.1, 3.1), rng.Uniform (-1.5, 1.5));
      CHECK (std::abs (SquaredNorm (v) - 1.0) < 1e-12);
    }
}

TEST_CASE ("DFT codebook structure")
{
  const UpaConfig upa{8, 8, 0.5};
  const auto cb = DftCodebook (upa, 4);
  REQUIRE (cb.Level1 ().size () == 64);
  REQUIRE (cb.Level2 ().size () == 256);
  CHECK (cb.Children (5).size () == 4);
  CHECK (cb.ParentOf (cb.ChildIndex (5, 3)) == 5);

  double worst = 0.0;
  const auto l1 = cb.Level1 ();
  for (std::size_t i = 0; i < l1.size (); ++i)
    {
      for (std::size_t j = 0; j < l1.size (); ++j)
        {
          const Complex g = InnerProduct (l1[i].weights, l1[j].weights);
          const double expected = i == j ? 1.0 : 0.0;
          worst = std::max (worst, std::abs (g - Complex (expected, 0.0)));
        }
    }
  CHECK (worst < 1e-10);

  for (const auto& b : cb.Level2 ())
    {
      CHECK (std::abs (SquaredNorm (b.weights) - 1.0) < 1e-12);
    }

  CHECK (DftCodebook ({2, 2, 0.5}, 1).Level1 ().size () == 4);
  CHECK_FALSE (DftCodebook ({2, 2, 0.5}, 1).HasLevel2 ());
  CHECK_THROWS_AS (DftCodebook (upa, 2), std::invalid_argument);
}

TEST_CASE ("DFT beams are nulls of each other")
{
  const UpaConfig upa{8, 8, 0.5};
  const auto cb = DftCodebook (upa, 1);
  const auto l1 = cb.Level1 ();
  int checked = 0;
  for (std::size_t i = 0; i < l1.size (); ++i)
    {
      if (!l1[i].visible)
        {
          continue;
        }
      CHECK (NormalizedArrayGain (l1[i], l1[i].azimuth, l1[i].elevation, upa) == doctest::Approx (1.0));
      for (std::size_t j = 0; j < l1.size (); ++j)
        {
          if (j != i)
            {
              CHECK (NormalizedArrayGain (l1[j], l1[i].azimuth, l1[i].elevation, upa) < 1e-20);
            }
        }
      ++checked;
    }
  CHECK (checked > 30);
}

TEST_CASE ("array gain stays in the unit interval")
{
  const UpaConfig upa{8, 8, 0.5};
  Rng rng (2);
  for (int i = 0; i < 500; ++i)
    {
      BeamWeights beam;
      beam.weights = SteeringVector (upa, rng.Uniform (-1.5, 1.5), rng.Uniform (-1, 1));
      const double g = NormalizedArrayGain (beam, rng.Uniform (-3, 3), rng.Uniform (-1.5, 1.5), upa);
      CHECK (g >= 0.0);
      CHECK (g <= 1.0 + 1e-12);
    }
}

TEST_CASE ("link state and RSRP")
{
  const ChannelParams params;
  Scene s = SingleBsScene ();

  const auto link = MakeLink (s, 0, {10, 0, 0}, params);
  CHECK (link.los);
  CHECK (link.path_gain_db == doctest::Approx (-89.7));
  CHECK (link.range == doctest::Approx (10.0));
  const auto broadside = SteeringVector ({8, 8, 0.5}, 0.0, 0.0);
  REQUIRE (link.tx_response.size () == broadside.size ());
  for (std::size_t k = 0; k < broadside.size (); ++k)
    {
      CHECK (std::abs (link.tx_response[k] - broadside[k]) < 1e-12);
    }
  CHECK (std::abs (SquaredNorm (link.rx_response) - 1.0) < 1e-12);

  BeamWeights aligned;
  aligned.weights = broadside;
  const double rsrp = RsrpDbm (link, aligned, params);
  CHECK (std::abs (rsrp - (-22.61)) < 0.01);
  CHECK (AlignedRsrpDbm (link.path_gain_db, 64, 4, params) == doctest::Approx (rsrp));

  SUBCASE ("orthogonal DFT beam hits the floor")
  {
    const auto cb = DftCodebook ({8, 8, 0.5}, 1);
    int floors = 0;
    for (const auto& b : cb.Level1 ())
      {
        floors += RsrpDbm (link, b, params) == kRsrpFloorDbm ? 1 : 0;
      }
    // every beam but the broadside one is orthogonal to broadside
    CHECK (floors == 63);
  }

  SUBCASE ("blockage costs exactly the blockage loss")
  {
    s.obstacles.push_back ({{4, -1, -1}, {5, 1, 1}});
    const auto blocked = MakeLink (s, 0, {10, 0, 0}, params);
    CHECK_FALSE (blocked.los);
    CHECK (blocked.path_gain_db == doctest::Approx (-89.7 - 30.0));
    CHECK (RsrpDbm (blocked, aligned, params) == doctest::Approx (rsrp - params.blockage_loss_db));
    CHECK (PathGainDb (10.0, false, params) == doctest::Approx (blocked.path_gain_db));
  }
}

TEST_CASE ("Shannon rate")
{
  CHECK (ShannonRate (0.0, 1e8) == 0.0);
  CHECK (ShannonRate (1.0, 1e8) == doctest::Approx (1e8));
  CHECK (ShannonRate (3.0, 1e8) == doctest::Approx (2e8));
  CHECK_THROWS_AS (ShannonRate (-1.0, 1e8), std::invalid_argument);
}

TEST_CASE ("noise power")
{
  ChannelParams p;
  CHECK (p.NoisePowerDbm () == doctest::Approx (-174.0 + 80.0 + 7.0));
  p.bandwidth_hz = -1;
  CHECK_THROWS_AS (p.Validate (), std::invalid_argument);
}
