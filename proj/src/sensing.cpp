#include "svwc/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace svwc::sensing {

using geometry::Point3;

std::string_view
ToString (ObjectClass cls)
{
  return cls == ObjectClass::human ? "human" : "mobile";
}

std::string_view
ToString (Provenance p)
{
  switch (p)
    {
    case Provenance::single_view:
      return "single_view";
    case Provenance::multi_view:
      return "multi_view";
    case Provenance::prs_baseline:
      return "prs_baseline";
    case Provenance::none:
      break;
    }
  return "none";
}

std::optional<ObjectClass>
ParseObjectClass (std::string_view text)
{
  if (text == "human")
    {
      return ObjectClass::human;
    }
  if (text == "mobile")
    {
      return ObjectClass::mobile;
    }
  return std::nullopt;
}

double
DegToRad (double deg)
{
  return deg * std::numbers::pi / 180.0;
}

double
RadToDeg (double rad)
{
  return rad * 180.0 / std::numbers::pi;
}

CameraModel::CameraModel (geometry::Pose pose, double hFov, double vFov, int width, int height, double maxRange)
  : m_pose (pose),
    m_hFov (hFov),
    m_vFov (vFov),
    m_width (width),
    m_height (height),
    m_maxRange (maxRange)
{
  if (!(hFov > 0.0 && hFov < std::numbers::pi) || !(vFov > 0.0 && vFov < std::numbers::pi))
    {
      throw std::invalid_argument ("CameraModel: field of view must lie in (0, pi)");
    }
  if (width <= 0 || height <= 0 || !(maxRange > 0.0))
    {
      throw std::invalid_argument ("CameraModel: resolution and max range must be positive");
    }
  m_fx = (width / 2.0) / std::tan (hFov / 2.0);
  m_fy = (height / 2.0) / std::tan (vFov / 2.0);
}

std::optional<Pixel>
Project (const CameraModel& cam, Point3 p, const geometry::Scene* scene)
{
  const Point3 local = cam.Pose ().ToLocal (p);
  if (!(local.x > 0.0))
    {
      return std::nullopt;
    }
  if (Norm (local) > cam.MaxRange ())
    {
      return std::nullopt;
    }
  const Pixel px{cam.Cx () - cam.Fx () * local.y / local.x, cam.Cy () - cam.Fy () * local.z / local.x};
  if (px.u < 0.0 || px.u > cam.Width () || px.v < 0.0 || px.v > cam.Height ())
    {
      return std::nullopt;
    }
  if (scene != nullptr && geometry::SegmentBlocked (*scene, cam.Pose ().Position (), p))
    {
      return std::nullopt;
    }
  return px;
}

Ray
PixelToRay (const CameraModel& cam, Pixel px)
{
  const Point3 local{1.0, (cam.Cx () - px.u) / cam.Fx (), (cam.Cy () - px.v) / cam.Fy ()};
  const Point3 unit = (1.0 / Norm (local)) * local;
  const geometry::Pose& pose = cam.Pose ();
  const Point3 dir = unit.x * pose.Forward () + unit.y * pose.Left () + unit.z * pose.Up ();
  return {pose.Position (), dir};
}

void
SensingNoise::Validate () const
{
  if (!(recall > 0.0 && recall <= 1.0) || !(precision > 0.0 && precision <= 1.0))
    {
      throw std::invalid_argument ("SensingNoise: recall and precision must lie in (0, 1]");
    }
  if (!(pixel_sigma >= 0.0) || !(depth_sigma >= 0.0) || !(fp_rate >= 0.0))
    {
      throw std::invalid_argument ("SensingNoise: sigmas and fp_rate must be >= 0");
    }
}

double
FpRateForPrecision (double precision, double expectedTrue)
{
  if (!(precision > 0.0 && precision <= 1.0) || expectedTrue < 0.0)
    {
      throw std::invalid_argument ("FpRateForPrecision: bad arguments");
    }
  return expectedTrue * (1.0 / precision - 1.0);
}

std::vector<Detection>
SynthDetections (std::span<const GroundTruthObject> objects, const CameraModel& cam, const SensingNoise& noise,
                 Rng& rng, const geometry::Scene* scene)
{
  noise.Validate ();
  std::vector<Detection> out;
  const double w = cam.Width ();
  const double h = cam.Height ();
  for (std::size_t i = 0; i < objects.size (); ++i)
    {
      const auto px = Project (cam, objects[i].position, scene);
      if (!px)
        {
          continue;
        }
      const double roll = rng.Uniform ();
      const double du = rng.Normal ();
      const double dv = rng.Normal ();
      const double dd = rng.Normal ();
      if (roll >= noise.recall)
        {
          continue;
        }
      Detection det;
      det.cls = objects[i].cls;
      det.pixel = {std::clamp (px->u + noise.pixel_sigma * du, 0.0, w),
                   std::clamp (px->v + noise.pixel_sigma * dv, 0.0, h)};
      const double range = Distance (cam.Pose ().Position (), objects[i].position);
      // keep depth strictly positive; the 1 mm floor only bites for huge sigmas
      det.depth = std::max (range + noise.depth_sigma * dd, 1e-3);
      det.confidence = noise.precision;
      det.truth_index = static_cast<int> (i);
      out.push_back (det);
    }

  const int fps = rng.Poisson (noise.fp_rate);
  for (int k = 0; k < fps; ++k)
    {
      Detection det;
      det.cls = objects.empty () ? ObjectClass::mobile : objects.front ().cls;
      det.pixel.u = rng.Uniform (0.0, w);
      det.pixel.v = rng.Uniform (0.0, h);
      det.depth = rng.Uniform (0.5, cam.MaxRange ());
      det.confidence = 1.0 - noise.precision;
      out.push_back (det);
    }
  std::shuffle (out.begin (), out.end (), rng.Engine ());
  return out;
}

std::vector<Detection>
SynthDetections (const geometry::Scene& scene, const CameraModel& cam, const SensingNoise& noise, double t, Rng& rng)
{
  std::vector<GroundTruthObject> objects;
  objects.reserve (scene.mobiles.size ());
  for (const auto& traj : scene.mobiles)
    {
      objects.push_back ({ObjectClass::mobile, geometry::PositionAt (traj, t)});
    }
  return SynthDetections (objects, cam, noise, rng, &scene);
}

std::vector<PositionEstimate>
EstimateSingleView (const CameraModel& cam, std::span<const Detection> detections)
{
  std::vector<PositionEstimate> out;
  for (const auto& det : detections)
    {
      if (!det.depth)
        {
          continue;
        }
      const Ray ray = PixelToRay (cam, det.pixel);
      out.push_back ({det.cls, ray.origin + *det.depth * ray.direction, Provenance::single_view, det.confidence});
    }
  return out;
}

std::optional<Triangulation>
Triangulate (const Ray& r1, const Ray& r2)
{
  if (Norm (Cross (r1.direction, r2.direction)) <= 1e-9)
    {
      return std::nullopt;
    }
  const Point3 w0 = r1.origin - r2.origin;
  const double a = Dot (r1.direction, r1.direction);
  const double b = Dot (r1.direction, r2.direction);
  const double c = Dot (r2.direction, r2.direction);
  const double d = Dot (r1.direction, w0);
  const double e = Dot (r2.direction, w0);
  const double denom = a * c - b * b;

  Triangulation out;
  out.t1 = (b * e - c * d) / denom;
  out.t2 = (a * e - b * d) / denom;
  const Point3 p1 = r1.origin + out.t1 * r1.direction;
  const Point3 p2 = r2.origin + out.t2 * r2.direction;
  out.point = 0.5 * (p1 + p2);
  out.residual = Distance (p1, p2);
  return out;
}

std::vector<PositionEstimate>
EstimateMultiView (const CameraModel& cam1, std::span<const Detection> dets1, const CameraModel& cam2,
                   std::span<const Detection> dets2, double tauAssoc)
{
  struct Candidate
  {
    double residual;
    std::size_t i;
    std::size_t j;
    Point3 point;
  };
  std::vector<Ray> rays1;
  std::vector<Ray> rays2;
  for (const auto& d : dets1)
    {
      rays1.push_back (PixelToRay (cam1, d.pixel));
    }
  for (const auto& d : dets2)
    {
      rays2.push_back (PixelToRay (cam2, d.pixel));
    }

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < dets1.size (); ++i)
    {
      for (std::size_t j = 0; j < dets2.size (); ++j)
        {
          if (dets1[i].cls != dets2[j].cls)
            {
              continue;
            }
          const auto tri = Triangulate (rays1[i], rays2[j]);
          if (!tri || !(tri->t1 > 0.0) || !(tri->t2 > 0.0) || tri->residual > tauAssoc)
            {
              continue;
            }
          candidates.push_back ({tri->residual, i, j, tri->point});
        }
    }
  std::sort (candidates.begin (), candidates.end (), [] (const Candidate& x, const Candidate& y) {
    return std::tie (x.residual, x.i, x.j) < std::tie (y.residual, y.i, y.j);
  });

  std::vector<bool> used1 (dets1.size (), false);
  std::vector<bool> used2 (dets2.size (), false);
  std::vector<PositionEstimate> out;
  for (const auto& cand : candidates)
    {
      if (used1[cand.i] || used2[cand.j])
        {
          continue;
        }
      used1[cand.i] = true;
      used2[cand.j] = true;
      const double conf = 0.5 * (dets1[cand.i].confidence + dets2[cand.j].confidence);
      out.push_back ({dets1[cand.i].cls, cand.point, Provenance::multi_view, conf});
    }

  auto fallback = [&out] (std::span<const Detection> dets, const std::vector<bool>& used,
                          const std::vector<Ray>& rays) {
    for (std::size_t i = 0; i < dets.size (); ++i)
      {
        if (used[i] || !dets[i].depth)
          {
            continue;
          }
        out.push_back ({dets[i].cls, rays[i].origin + *dets[i].depth * rays[i].direction, Provenance::single_view,
                        dets[i].confidence});
      }
  };
  fallback (dets1, used1, rays1);
  fallback (dets2, used2, rays2);
  return out;
}

double
PrsSigmaForMeanError (double meanError)
{
  // mean of a chi distribution with 3 degrees of freedom is sqrt(8/pi)
  return meanError / std::sqrt (8.0 / std::numbers::pi);
}

PositionEstimate
PrsBaselineEstimate (Point3 truth, double sigma, Rng& rng)
{
  const double ex = rng.Normal ();
  const double ey = rng.Normal ();
  const double ez = rng.Normal ();
  return {ObjectClass::mobile, truth + sigma * Point3{ex, ey, ez}, Provenance::prs_baseline, 1.0};
}

AngularError
AngularErrorDeg (const geometry::Pose& from, Point3 truth, Point3 estimate)
{
  const auto bt = geometry::BearingAndRange (from, truth);
  const auto be = geometry::BearingAndRange (from, estimate);
  double daz = std::remainder (be.azimuth - bt.azimuth, 2.0 * std::numbers::pi);
  return {RadToDeg (std::abs (daz)), RadToDeg (std::abs (be.elevation - bt.elevation))};
}

std::vector<int>
SectorCounts (std::span<const Point3> positions, const geometry::Pose& bsPose, const phy::Codebook& codebook)
{
  const auto beams = codebook.Level1 ();
  std::vector<int> counts (beams.size (), 0);
  for (const auto& p : positions)
    {
      const auto b = geometry::BearingAndRange (bsPose, p);
      const auto a = phy::SteeringVector (codebook.Upa (), b.azimuth, b.elevation);
      std::size_t best = 0;
      double bestGain = -1.0;
      for (std::size_t k = 0; k < beams.size (); ++k)
        {
          const double g = std::norm (phy::InnerProduct (beams[k].weights, a));
          if (g > bestGain)
            {
              bestGain = g;
              best = k;
            }
        }
      if (!beams.empty ())
        {
          ++counts[best];
        }
    }
  return counts;
}

std::vector<int>
NoisyCounts (std::span<const int> counts, double relSigma, Rng& rng)
{
  std::vector<int> out (counts.size ());
  for (std::size_t i = 0; i < counts.size (); ++i)
    {
      const double c = counts[i];
      const double noisy = c + relSigma * c * rng.Normal ();
      out[i] = std::max (0, static_cast<int> (std::lround (noisy)));
    }
  return out;
}

CameraModel
SensingRig::Camera (int index) const
{
  if (index != 0 && index != 1)
    {
      throw std::out_of_range ("SensingRig::Camera: index must be 0 or 1");
    }
  const double side = index == 0 ? 0.5 : -0.5;
  const Point3 pos = bs_pose.Position () + (side * baseline_m) * bs_pose.Left ();
  return CameraModel (geometry::Pose (pos, bs_pose.Yaw (), bs_pose.Pitch ()), h_fov, v_fov, width, height,
                      max_range);
}

Point3
SampleCoveragePoint (const SensingRig& rig, Rng& rng, const geometry::Scene* scene)
{
  const CameraModel cam0 = rig.Camera (0);
  const CameraModel cam1 = rig.Camera (1);
  const double yaw = rig.bs_pose.Yaw ();
  const Point3 fwd{std::cos (yaw), std::sin (yaw), 0.0};
  const Point3 left{-std::sin (yaw), std::cos (yaw), 0.0};
  const Point3 base = rig.bs_pose.Position ();
  for (int attempt = 0; attempt < 100000; ++attempt)
    {
      const double f = rng.Uniform (0.0, rig.max_range);
      const double l = rng.Uniform (-rig.max_range, rig.max_range);
      Point3 p = base + f * fwd + l * left;
      p.z = rig.mobile_height;
      if (Distance (p, base) > rig.max_range)
        {
          continue;
        }
      if (scene != nullptr && !scene->Contains (p))
        {
          continue;
        }
      if (Project (cam0, p, scene) || Project (cam1, p, scene))
        {
          return p;
        }
    }
  throw std::runtime_error ("SampleCoveragePoint: camera coverage region is empty");
}

std::optional<PositionEstimate>
SenseMobile (const SensingRig& rig, SensingMode mode, const SensingNoise& noise, Point3 truth, Rng& rng,
             const geometry::Scene* scene)
{
  const GroundTruthObject obj{ObjectClass::mobile, truth};
  const CameraModel cam0 = rig.Camera (0);
  std::vector<PositionEstimate> estimates;
  if (mode == SensingMode::single_view)
    {
      const auto dets = SynthDetections (std::span (&obj, 1), cam0, noise, rng, scene);
      estimates = EstimateSingleView (cam0, dets);
    }
  else
    {
      const CameraModel cam1 = rig.Camera (1);
      const auto dets0 = SynthDetections (std::span (&obj, 1), cam0, noise, rng, scene);
      const auto dets1 = SynthDetections (std::span (&obj, 1), cam1, noise, rng, scene);
      estimates = EstimateMultiView (cam0, dets0, cam1, dets1, rig.tau_assoc);
    }

  std::optional<PositionEstimate> best;
  double bestDist = rig.match_gate;
  for (const auto& e : estimates)
    {
      if (e.cls != ObjectClass::mobile)
        {
          continue;
        }
      const double d = Distance (e.position, truth);
      if (d <= bestDist)
        {
          bestDist = d;
          best = e;
        }
    }
  return best;
}

SensingNoise
NoiseFamily::At (double scale) const
{
  SensingNoise n = base;
  n.pixel_sigma = scale * pixel_per_unit;
  n.depth_sigma = depth_fixed + scale * depth_per_unit;
  return n;
}

SensingEvaluation
EvaluateSensing (const SensingRig& rig, SensingMode mode, const SensingNoise& noise, std::uint64_t seed, int samples)
{
  SensingEvaluation ev;
  ev.samples = samples;
  double sum = 0.0;
  for (int i = 0; i < samples; ++i)
    {
      Rng rng (DeriveSeed (seed, static_cast<std::uint64_t> (i)));
      const Point3 truth = SampleCoveragePoint (rig, rng);
      const auto est = SenseMobile (rig, mode, noise, truth, rng);
      if (est)
        {
          sum += Distance (est->position, truth);
          ++ev.detected;
        }
    }
  ev.mean_error_m = ev.detected > 0 ? sum / ev.detected : 0.0;
  return ev;
}

CalibrationResult
CalibrateNoise (double targetErrorM, const SensingRig& rig, SensingMode mode, const NoiseFamily& family,
                std::uint64_t seed, int samples, double relTolerance)
{
  if (targetErrorM < 0.0 || samples < 1)
    {
      throw std::invalid_argument ("CalibrateNoise: target must be >= 0 and samples >= 1");
    }
  CalibrationResult res;
  if (targetErrorM == 0.0)
    {
      res.noise = family.base;
      res.noise.pixel_sigma = 0.0;
      res.noise.depth_sigma = 0.0;
      return res;
    }

  auto errorAt = [&] (double scale) { return EvaluateSensing (rig, mode, family.At (scale), seed, samples).mean_error_m; };
  auto accept = [&] (double scale, double err, int iters) {
    res.scale = scale;
    res.noise = family.At (scale);
    res.achieved_error_m = err;
    res.iterations = iters;
    return res;
  };

  const double tol = relTolerance * targetErrorM;
  double lo = 0.0;
  double errLo = errorAt (lo);
  if (std::abs (errLo - targetErrorM) <= tol)
    {
      return accept (lo, errLo, 1);
    }
  if (errLo > targetErrorM)
    {
      throw std::runtime_error ("CalibrateNoise: target is below the error floor of the noise family");
    }

  int iters = 1;
  double hi = 1.0;
  double errHi = errorAt (hi);
  while (errHi < targetErrorM && iters < 60)
    {
      lo = hi;
      hi *= 2.0;
      errHi = errorAt (hi);
      ++iters;
    }
  while (iters < 60)
    {
      const double mid = 0.5 * (lo + hi);
      const double err = errorAt (mid);
      ++iters;
      if (std::abs (err - targetErrorM) <= tol)
        {
          return accept (mid, err, iters);
        }
      (err < targetErrorM ? lo : hi) = mid;
    }
  throw std::runtime_error ("CalibrateNoise: no convergence after 60 iterations");
}

} // namespace svwc::sensing
