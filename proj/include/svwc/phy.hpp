#pragma once

#include "svwc/geometry.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace svwc::phy {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// RSRP reported when the beam places a null on the mobile.
inline constexpr double kRsrpFloorDbm = -200.0;

struct UpaConfig
{
  int n_h = 8;
  int n_v = 8;
  /// element spacing in wavelengths
  double spacing = 0.5;

  std::size_t Elements () const { return static_cast<std::size_t> (n_h) * static_cast<std::size_t> (n_v); }
  void Validate () const;
  friend bool operator== (const UpaConfig&, const UpaConfig&) = default;
};

struct ChannelParams
{
  double carrier_ghz = 100.0;
  double bandwidth_hz = 1e8;
  /// 20 W
  double tx_power_dbm = 43.01;
  double noise_figure_db = 7.0;
  double blockage_loss_db = 30.0;

  void Validate () const;
  double NoisePowerDbm () const;
  friend bool operator== (const ChannelParams&, const ChannelParams&) = default;
};

struct BeamWeights
{
  ComplexVector weights;
  /// Direction the beam was built for (local panel frame).
  double azimuth = 0.0;
  double elevation = 0.0;
  /// False when the DFT spatial frequency has no physical direction.
  bool visible = true;
};

/**
 * Two-level DFT codebook. Level 1 holds the SSB beams (Kronecker product of
 * the horizontal and vertical DFT column sets); level 2 holds the CSI-RS
 * refinement beams of a 2x per-axis oversampled DFT grid. Level-2 index
 * 4*p + 2*a + c is the child (a, c) of level-1 beam p.
 */
class Codebook
{
public:
  Codebook (UpaConfig upa, std::vector<BeamWeights> level1, std::vector<BeamWeights> level2);

  const UpaConfig& Upa () const { return m_upa; }
  std::span<const BeamWeights> Level1 () const { return m_level1; }
  std::span<const BeamWeights> Level2 () const { return m_level2; }
  bool HasLevel2 () const { return !m_level2.empty (); }

  /// The four refinement beams of a level-1 beam.
  std::span<const BeamWeights> Children (std::size_t parent) const;
  std::size_t ChildIndex (std::size_t parent, std::size_t k) const { return 4 * parent + k; }
  std::size_t ParentOf (std::size_t child) const { return child / 4; }

private:
  UpaConfig m_upa;
  std::vector<BeamWeights> m_level1;
  std::vector<BeamWeights> m_level2;
};

struct LinkState
{
  double azimuth = 0.0;
  double elevation = 0.0;
  double range = 0.0;
  bool los = true;
  double path_gain_db = 0.0;
  /// true when the range was below the 1 m model floor
  bool range_clamped = false;
  ComplexVector tx_response;
  ComplexVector rx_response;
};

struct PathLoss
{
  double db = 0.0;
  bool clamped = false;
};

/// Indoor LoS path loss, 32.4 + 17.3 log10(d) + 20 log10(f_GHz); d floors at 1 m.
PathLoss PathLossDb (double distanceM, double carrierGhz);

ComplexVector SteeringVector (const UpaConfig& upa, double azimuth, double elevation);

/// oversampling 1 -> SSB level only; 4 -> SSB plus 4 children per SSB beam.
Codebook DftCodebook (const UpaConfig& upa, int oversampling);

/// Link from BS `bsIndex` to a mobile position. The mobile array is taken
/// with the world orientation (yaw 0, pitch 0).
LinkState MakeLink (const geometry::Scene& scene, std::size_t bsIndex, geometry::Point3 mobile,
                    const ChannelParams& params, const UpaConfig& bsUpa = {},
                    const UpaConfig& ueUpa = {2, 2, 0.5});

/// Path gain only (no array responses), for tight simulation loops.
double PathGainDb (double range, bool los, const ChannelParams& params);

Complex InnerProduct (std::span<const Complex> a, std::span<const Complex> b);

double RsrpDbm (const LinkState& link, const BeamWeights& txBeam, const ChannelParams& params);

/// RSRP with the transmit beam matched to the true direction.
double AlignedRsrpDbm (double pathGainDb, std::size_t nTx, std::size_t nRx, const ChannelParams& params);

double NormalizedArrayGain (const BeamWeights& beam, double azimuth, double elevation, const UpaConfig& upa);

double ShannonRate (double snrLinear, double bandwidthHz);

inline double
DbToLinear (double db)
{
  return std::pow (10.0, db / 10.0);
}

} // namespace svwc::phy
