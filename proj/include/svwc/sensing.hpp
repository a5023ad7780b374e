#pragma once

#include "svwc/geometry.hpp"
#include "svwc/phy.hpp"
#include "svwc/random.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace svwc::sensing {

enum class ObjectClass
{
  human,
  mobile
};

enum class Provenance
{
  single_view,
  multi_view,
  prs_baseline,
  none
};

std::string_view ToString (ObjectClass cls);
std::string_view ToString (Provenance p);
std::optional<ObjectClass> ParseObjectClass (std::string_view text);

struct Pixel
{
  double u = 0.0;
  double v = 0.0;
};

double DegToRad (double deg);
double RadToDeg (double rad);

/**
 * Pinhole RGB-d camera. The optical axis is the pose's forward direction;
 * u grows to the right (toward -y local), v grows downward (toward -z local).
 * A point at the left edge of the horizontal field of view maps to u = 0,
 * the right edge to u = width.
 */
class CameraModel
{
public:
  CameraModel (geometry::Pose pose, double hFov = DegToRad (70.0), double vFov = DegToRad (43.5),
               int width = 1920, int height = 1080, double maxRange = 12.0);

  const geometry::Pose& Pose () const { return m_pose; }
  double HFov () const { return m_hFov; }
  double VFov () const { return m_vFov; }
  int Width () const { return m_width; }
  int Height () const { return m_height; }
  double MaxRange () const { return m_maxRange; }

  double Fx () const { return m_fx; }
  double Fy () const { return m_fy; }
  double Cx () const { return m_width / 2.0; }
  double Cy () const { return m_height / 2.0; }

private:
  geometry::Pose m_pose;
  double m_hFov;
  double m_vFov;
  int m_width;
  int m_height;
  double m_maxRange;
  double m_fx;
  double m_fy;
};

/// Pixel of `p`, or nothing when it is behind the camera, outside the image,
/// beyond max range, or (if a scene is given) hidden by an obstacle.
std::optional<Pixel> Project (const CameraModel& cam, geometry::Point3 p, const geometry::Scene* scene = nullptr);

struct Ray
{
  geometry::Point3 origin;
  geometry::Point3 direction; ///< unit length
};

Ray PixelToRay (const CameraModel& cam, Pixel px);

struct SensingNoise
{
  double recall = 1.0;
  double precision = 1.0;
  double pixel_sigma = 0.0;
  double depth_sigma = 0.0;
  /// expected false positives per frame
  double fp_rate = 0.0;

  void Validate () const;
  friend bool operator== (const SensingNoise&, const SensingNoise&) = default;
};

/// False-positive rate that yields `precision` when `expectedTrue` true
/// detections are made per frame.
double FpRateForPrecision (double precision, double expectedTrue);

struct GroundTruthObject
{
  ObjectClass cls = ObjectClass::mobile;
  geometry::Point3 position;
};

struct Detection
{
  ObjectClass cls = ObjectClass::mobile;
  Pixel pixel;
  std::optional<double> depth;
  double confidence = 1.0;
  /// index into the ground-truth list, -1 for a false positive
  int truth_index = -1;
};

/**
 * Emulated detector output for one frame.
 *
 * Draw order: for every visible object in input order, one uniform (recall
 * test) and three normals (u, v, depth) are drawn whether or not the object
 * is detected; then one Poisson count of false positives, each taking three
 * uniforms (u, v, depth); finally the list is shuffled.
 */
std::vector<Detection> SynthDetections (std::span<const GroundTruthObject> objects, const CameraModel& cam,
                                        const SensingNoise& noise, Rng& rng,
                                        const geometry::Scene* scene = nullptr);

/// Convenience overload: every scene mobile at time t is an object of class mobile.
std::vector<Detection> SynthDetections (const geometry::Scene& scene, const CameraModel& cam,
                                        const SensingNoise& noise, double t, Rng& rng);

struct PositionEstimate
{
  ObjectClass cls = ObjectClass::mobile;
  geometry::Point3 position;
  Provenance provenance = Provenance::none;
  double confidence = 1.0;
};

/// Depth-along-ray back-projection. Detections without depth are skipped.
std::vector<PositionEstimate> EstimateSingleView (const CameraModel& cam, std::span<const Detection> detections);

struct Triangulation
{
  geometry::Point3 point;
  /// length of the common perpendicular between the two rays
  double residual = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
};

/// Midpoint of the shortest segment between two lines; nothing when the
/// directions are parallel (|d1 x d2| <= 1e-9).
std::optional<Triangulation> Triangulate (const Ray& r1, const Ray& r2);

/**
 * Two-camera fusion. Same-class detection pairs whose rays meet in front of
 * both cameras with residual <= tauAssoc are matched greedily by increasing
 * residual and triangulated; leftovers fall back to single-view ranging when
 * they carry depth.
 */
std::vector<PositionEstimate> EstimateMultiView (const CameraModel& cam1, std::span<const Detection> dets1,
                                                 const CameraModel& cam2, std::span<const Detection> dets2,
                                                 double tauAssoc = 0.5);

/// sigma such that E|N(0, sigma^2 I_3)| = meanError.
double PrsSigmaForMeanError (double meanError);

/// Truth plus isotropic Gaussian error; draws three normals (x, y, z).
PositionEstimate PrsBaselineEstimate (geometry::Point3 truth, double sigma, Rng& rng);

struct AngularError
{
  double az_deg = 0.0;
  double el_deg = 0.0;
};

AngularError AngularErrorDeg (const geometry::Pose& from, geometry::Point3 truth, geometry::Point3 estimate);

/// Number of positions falling in each level-1 beam (argmax gain, ties to
/// the lowest index).
std::vector<int> SectorCounts (std::span<const geometry::Point3> positions, const geometry::Pose& bsPose,
                               const phy::Codebook& codebook);

/// max(0, round(c + N(0, (relSigma c)^2))) per beam; one normal per beam.
std::vector<int> NoisyCounts (std::span<const int> counts, double relSigma, Rng& rng);

enum class SensingMode
{
  single_view,
  multi_view
};

/**
 * Two cameras mounted beside the BS panel, sharing its orientation and
 * separated horizontally by `baseline_m`. Camera 0 is on the panel's left.
 */
struct SensingRig
{
  geometry::Pose bs_pose{{0.0, 15.0, 3.0}, 0.0, -0.2};
  double baseline_m = 0.5;
  double h_fov = DegToRad (70.0);
  double v_fov = DegToRad (43.5);
  int width = 1920;
  int height = 1080;
  double max_range = 12.0;
  double mobile_height = 1.5;
  double tau_assoc = 0.5;
  /// truth-to-estimate association gate used when scoring a frame
  double match_gate = 1.5;

  CameraModel Camera (int index) const;
  friend bool operator== (const SensingRig&, const SensingRig&) = default;
};

/// Uniform point at mobile height within max_range of the BS and visible to
/// at least one camera. Draws two uniforms per attempt.
geometry::Point3 SampleCoveragePoint (const SensingRig& rig, Rng& rng, const geometry::Scene* scene = nullptr);

/// Runs the emulated pipeline on one mobile and returns the estimate the
/// BS would act on, or nothing when the mobile was missed.
std::optional<PositionEstimate> SenseMobile (const SensingRig& rig, SensingMode mode, const SensingNoise& noise,
                                             geometry::Point3 truth, Rng& rng,
                                             const geometry::Scene* scene = nullptr);

/// pixel_sigma = scale * pixel_per_unit, depth_sigma = depth_fixed + scale * depth_per_unit.
struct NoiseFamily
{
  SensingNoise base;
  double pixel_per_unit = 1.0;
  double depth_per_unit = 0.0;
  double depth_fixed = 0.0;

  SensingNoise At (double scale) const;
};

struct CalibrationResult
{
  SensingNoise noise;
  double scale = 0.0;
  double achieved_error_m = 0.0;
  int iterations = 0;
};

/**
 * Bisection on the family scale until the mean 3D error of detected
 * mobiles over `samples` coverage points matches `targetErrorM` within
 * `relTolerance`. Sample i always uses the stream DeriveSeed(seed, i), so the
 * objective is a deterministic function of the scale. Throws
 * std::runtime_error after 60 iterations without convergence.
 */
CalibrationResult CalibrateNoise (double targetErrorM, const SensingRig& rig, SensingMode mode,
                                  const NoiseFamily& family, std::uint64_t seed, int samples = 4000,
                                  double relTolerance = 0.005);

/// Mean 3D error (and detection count) for a fixed noise over the same sample streams.
struct SensingEvaluation
{
  double mean_error_m = 0.0;
  int detected = 0;
  int samples = 0;
};

SensingEvaluation EvaluateSensing (const SensingRig& rig, SensingMode mode, const SensingNoise& noise,
                                   std::uint64_t seed, int samples);

} // namespace svwc::sensing
