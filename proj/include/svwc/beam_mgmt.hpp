#pragma once

#include "svwc/geometry.hpp"
#include "svwc/phy.hpp"
#include "svwc/random.hpp"
#include "svwc/sensing.hpp"

#include <cstddef>
#include <optional>
#include <string_view>

namespace svwc::beam {

enum class BeamScheme
{
  nr_two_step,
  svwc_single_view,
  svwc_multi_view,
  svwc_efficientdet_like,
  prs_localization
};

std::string_view ToString (BeamScheme s);
std::optional<BeamScheme> ParseBeamScheme (std::string_view text);

struct SweepResult
{
  std::size_t best_index = 0;
  double best_rsrp_dbm = phy::kRsrpFloorDbm;
};

/// Exhaustive level-1 (SSB) sweep; ties go to the lowest index.
SweepResult SweepSsb (const phy::LinkState& link, const phy::Codebook& codebook, const phy::ChannelParams& params);

struct RefineResult
{
  /// index into Codebook::Level2()
  std::size_t child_index = 0;
  double rsrp_dbm = phy::kRsrpFloorDbm;
  /// number of CSI-RS beams measured
  int evaluated = 0;
};

/// Picks the best of the four level-2 children of `parentIndex`.
RefineResult RefineCsirs (const phy::LinkState& link, const phy::Codebook& codebook, std::size_t parentIndex,
                          const phy::ChannelParams& params);

/// Continuous beam steered at the bearing of the estimated position.
phy::BeamWeights SvwcBeam (const sensing::PositionEstimate& estimate, const geometry::Pose& bsPose,
                           const phy::UpaConfig& upa);

struct LatencyModel
{
  double nr_sweep_ms = 20.0;
  /// CV processing latency; 1000/28 for a 28 fps DETR, 8.7 for RT-DETR
  double cv_processing_ms = 1000.0 / 28.0;
  double prs_ms = 20.0;

  friend bool operator== (const LatencyModel&, const LatencyModel&) = default;
};

struct BeamConfig
{
  sensing::SensingRig rig;
  phy::UpaConfig bs_upa{8, 8, 0.5};
  phy::UpaConfig ue_upa{2, 2, 0.5};
  LatencyModel latency;
  sensing::SensingNoise multi_view;
  sensing::SensingNoise single_view;
  sensing::SensingNoise efficientdet;
  double prs_sigma_m = 0.0;
};

struct BeamTrialRecord
{
  BeamScheme scheme = BeamScheme::nr_two_step;
  double pos_error_m = 0.0;
  double az_err_deg = 0.0;
  double el_err_deg = 0.0;
  double array_gain = 0.0;
  double latency_ms = 0.0;
  /// SVWC missed the mobile and the trial ran the NR procedure instead
  bool fallback = false;
};

/**
 * One beam-management trial. The evaluation mobile is placed uniformly in
 * the camera coverage region; the scheme then picks a transmit beam and the
 * record holds its normalized gain toward the true direction.
 *
 * Draw order: coverage sampling first (so every scheme sees the same mobile
 * for the same seed), then the scheme's own draws (sensing or PRS error).
 * For NR the position/angle errors are those of the chosen beam's pointing
 * direction at the true range.
 */
BeamTrialRecord RunBeamTrial (const geometry::Scene& scene, BeamScheme scheme, const BeamConfig& cfg,
                              const phy::ChannelParams& params, const phy::Codebook& codebook, Rng& rng);

/// NR two-step procedure on a prepared link: SSB sweep then CSI-RS refinement.
std::size_t NrTwoStep (const phy::LinkState& link, const phy::Codebook& codebook, const phy::ChannelParams& params);

} // namespace svwc::beam
