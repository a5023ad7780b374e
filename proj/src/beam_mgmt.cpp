#include "svwc/beam_mgmt.hpp"

#include <stdexcept>

namespace svwc::beam {

namespace {

constexpr std::pair<BeamScheme, std::string_view> kSchemeNames[] = {
  {BeamScheme::nr_two_step, "nr_two_step"},
  {BeamScheme::svwc_single_view, "svwc_single_view"},
  {BeamScheme::svwc_multi_view, "svwc_multi_view"},
  {BeamScheme::svwc_efficientdet_like, "svwc_efficientdet_like"},
  {BeamScheme::prs_localization, "prs_localization"},
};

void
ScoreEstimate (BeamTrialRecord& rec, const geometry::Pose& bs, geometry::Point3 truth, geometry::Point3 est)
{
  rec.pos_error_m = geometry::Distance (truth, est);
  const auto ang = sensing::AngularErrorDeg (bs, truth, est);
  rec.az_err_deg = ang.az_deg;
  rec.el_err_deg = ang.el_deg;
}

} // namespace

std::string_view
ToString (BeamScheme s)
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

std::optional<BeamScheme>
ParseBeamScheme (std::string_view text)
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

SweepResult
SweepSsb (const phy::LinkState& link, const phy::Codebook& codebook, const phy::ChannelParams& params)
{
  SweepResult best;
  const auto beams = codebook.Level1 ();
  bool first = true;
  for (std::size_t i = 0; i < beams.size (); ++i)
    {
      const double rsrp = phy::RsrpDbm (link, beams[i], params);
      if (first || rsrp > best.best_rsrp_dbm)
        {
          best = {i, rsrp};
          first = false;
        }
    }
  return best;
}

RefineResult
RefineCsirs (const phy::LinkState& link, const phy::Codebook& codebook, std::size_t parentIndex,
             const phy::ChannelParams& params)
{
  const auto children = codebook.Children (parentIndex);
  RefineResult best;
  for (std::size_t k = 0; k < children.size (); ++k)
    {
      const double rsrp = phy::RsrpDbm (link, children[k], params);
      if (best.evaluated == 0 || rsrp > best.rsrp_dbm)
        {
          best.child_index = codebook.ChildIndex (parentIndex, k);
          best.rsrp_dbm = rsrp;
        }
      ++best.evaluated;
    }
  return best;
}

phy::BeamWeights
SvwcBeam (const sensing::PositionEstimate& estimate, const geometry::Pose& bsPose, const phy::UpaConfig& upa)
{
  if (!geometry::IsFinite (estimate.position))
    {
      throw std::invalid_argument ("SvwcBeam: non-finite position estimate");
    }
  const auto b = geometry::BearingAndRange (bsPose, estimate.position);
  phy::BeamWeights w;
  w.weights = phy::SteeringVector (upa, b.azimuth, b.elevation);
  w.azimuth = b.azimuth;
  w.elevation = b.elevation;
  return w;
}

std::size_t
NrTwoStep (const phy::LinkState& link, const phy::Codebook& codebook, const phy::ChannelParams& params)
{
  const SweepResult ssb = SweepSsb (link, codebook, params);
  return RefineCsirs (link, codebook, ssb.best_index, params).child_index;
}

BeamTrialRecord
RunBeamTrial (const geometry::Scene& scene, BeamScheme scheme, const BeamConfig& cfg,
              const phy::ChannelParams& params, const phy::Codebook& codebook, Rng& rng)
{
  if (!codebook.HasLevel2 () || !(codebook.Upa () == cfg.bs_upa))
    {
      throw std::invalid_argument ("RunBeamTrial: codebook must be two-level and match the BS array");
    }
  const geometry::Pose& bs = cfg.rig.bs_pose;
  const geometry::Scene* obstacles = scene.obstacles.empty () ? nullptr : &scene;
  const geometry::Point3 truth = sensing::SampleCoveragePoint (cfg.rig, rng, obstacles);
  const auto trueBearing = geometry::BearingAndRange (bs, truth);

  BeamTrialRecord rec;
  rec.scheme = scheme;

  auto runNr = [&] {
    geometry::Scene single;
    single.area = scene.area;
    single.bs_poses = {bs};
    single.obstacles = scene.obstacles;
    const phy::LinkState link = phy::MakeLink (single, 0, truth, params, cfg.bs_upa, cfg.ue_upa);
    const std::size_t child = NrTwoStep (link, codebook, params);
    const phy::BeamWeights& beam = codebook.Level2 ()[child];
    rec.array_gain = phy::NormalizedArrayGain (beam, trueBearing.azimuth, trueBearing.elevation, cfg.bs_upa);
    const geometry::Point3 pointed
        = geometry::PointFromBearing (bs, {beam.azimuth, beam.elevation, trueBearing.range});
    ScoreEstimate (rec, bs, truth, pointed);
    rec.latency_ms = cfg.latency.nr_sweep_ms;
  };

  auto runSvwc = [&] (sensing::SensingMode mode, const sensing::SensingNoise& noise) {
    const auto est = sensing::SenseMobile (cfg.rig, mode, noise, truth, rng, obstacles);
    if (!est)
      {
        runNr ();
        rec.fallback = true;
        rec.latency_ms = cfg.latency.cv_processing_ms + cfg.latency.nr_sweep_ms;
        return;
      }
    const phy::BeamWeights beam = SvwcBeam (*est, bs, cfg.bs_upa);
    rec.array_gain = phy::NormalizedArrayGain (beam, trueBearing.azimuth, trueBearing.elevation, cfg.bs_upa);
    ScoreEstimate (rec, bs, truth, est->position);
    rec.latency_ms = cfg.latency.cv_processing_ms;
  };

  switch (scheme)
    {
    case BeamScheme::nr_two_step:
      runNr ();
      break;
    case BeamScheme::svwc_single_view:
      runSvwc (sensing::SensingMode::single_view, cfg.single_view);
      break;
    case BeamScheme::svwc_multi_view:
      runSvwc (sensing::SensingMode::multi_view, cfg.multi_view);
      break;
    case BeamScheme::svwc_efficientdet_like:
      runSvwc (sensing::SensingMode::single_view, cfg.efficientdet);
      break;
    case BeamScheme::prs_localization: {
      const auto est = sensing::PrsBaselineEstimate (truth, cfg.prs_sigma_m, rng);
      const phy::BeamWeights beam = SvwcBeam (est, bs, cfg.bs_upa);
      rec.array_gain = phy::NormalizedArrayGain (beam, trueBearing.azimuth, trueBearing.elevation, cfg.bs_upa);
      ScoreEstimate (rec, bs, truth, est.position);
      rec.latency_ms = cfg.latency.prs_ms;
      break;
    }
    }
  return rec;
}

} // namespace svwc::beam
