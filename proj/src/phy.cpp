#include "svwc/phy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace svwc::phy {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Phase of element (m, n) for spatial frequencies (uh, uv):
// 2*pi*spacing*(m*uh + n*uv), with uh = cos(el) sin(az), uv = sin(el).
ComplexVector
PhaseRamp (const UpaConfig& upa, double uh, double uv)
{
  ComplexVector w (upa.Elements ());
  const double amp = 1.0 / std::sqrt (static_cast<double> (upa.Elements ()));
  for (int m = 0; m < upa.n_h; ++m)
    {
      for (int n = 0; n < upa.n_v; ++n)
        {
          const double phase = kTwoPi * upa.spacing * (m * uh + n * uv);
          w[static_cast<std::size_t> (m) * upa.n_v + n] = std::polar (amp, phase);
        }
    }
  return w;
}

// DFT column k of an N-point grid oversampled by `over`, as exact exponentials
// exp(j*2*pi*m*k/(over*N)).
ComplexVector
DftBeam (const UpaConfig& upa, int kh, int kv, int over)
{
  ComplexVector w (upa.Elements ());
  const double amp = 1.0 / std::sqrt (static_cast<double> (upa.Elements ()));
  const int gh = over * upa.n_h;
  const int gv = over * upa.n_v;
  for (int m = 0; m < upa.n_h; ++m)
    {
      for (int n = 0; n < upa.n_v; ++n)
        {
          // reduce the integer phase index first so large products stay exact
          const long ph = (static_cast<long> (m) * kh) % gh;
          const long pv = (static_cast<long> (n) * kv) % gv;
          const double phase = kTwoPi * (static_cast<double> (ph) / gh + static_cast<double> (pv) / gv);
          w[static_cast<std::size_t> (m) * upa.n_v + n] = std::polar (amp, phase);
        }
    }
  return w;
}

// Spatial frequency u of grid index k on a G-point grid, wrapped to the
// principal interval [-1/(2s), 1/(2s)).
double
GridFrequency (int k, int g, double spacing)
{
  const double period = 1.0 / spacing;
  double u = static_cast<double> (k) / (g * spacing);
  u = std::fmod (u + period / 2.0, period);
  if (u < 0.0)
    {
      u += period;
    }
  return u - period / 2.0;
}

BeamWeights
MakeDftBeam (const UpaConfig& upa, int kh, int kv, int over)
{
  BeamWeights beam;
  beam.weights = DftBeam (upa, kh, kv, over);
  const double uh = GridFrequency (kh, over * upa.n_h, upa.spacing);
  const double uv = GridFrequency (kv, over * upa.n_v, upa.spacing);
  if (std::abs (uv) > 1.0)
    {
      beam.visible = false;
      beam.elevation = std::copysign (std::numbers::pi / 2.0, uv);
      beam.azimuth = 0.0;
      return beam;
    }
  beam.elevation = std::asin (uv);
  const double ce = std::cos (beam.elevation);
  if (std::abs (uh) > ce)
    {
      beam.visible = false;
      beam.azimuth = std::copysign (std::numbers::pi / 2.0, uh);
      return beam;
    }
  beam.azimuth = ce > 0.0 ? std::asin (uh / ce) : 0.0;
  return beam;
}

} // namespace

void
UpaConfig::Validate () const
{
  if (n_h < 1 || n_v < 1 || !(spacing > 0.0))
    {
      throw std::invalid_argument ("UpaConfig: element counts must be >= 1 and spacing > 0");
    }
}

void
ChannelParams::Validate () const
{
  if (!(carrier_ghz > 0.0) || !(bandwidth_hz > 0.0) || !(tx_power_dbm > 0.0) || !(noise_figure_db > 0.0)
      || !(blockage_loss_db > 0.0))
    {
      throw std::invalid_argument ("ChannelParams: all parameters must be positive");
    }
}

double
ChannelParams::NoisePowerDbm () const
{
  return -174.0 + 10.0 * std::log10 (bandwidth_hz) + noise_figure_db;
}

Codebook::Codebook (UpaConfig upa, std::vector<BeamWeights> level1, std::vector<BeamWeights> level2)
  : m_upa (upa),
    m_level1 (std::move (level1)),
    m_level2 (std::move (level2))
{
  if (!m_level2.empty () && m_level2.size () != 4 * m_level1.size ())
    {
      throw std::invalid_argument ("Codebook: level 2 must hold exactly 4 children per level-1 beam");
    }
}

std::span<const BeamWeights>
Codebook::Children (std::size_t parent) const
{
  if (m_level2.empty () || parent >= m_level1.size ())
    {
      throw std::out_of_range ("Codebook::Children: no such parent");
    }
  return std::span<const BeamWeights> (m_level2).subspan (4 * parent, 4);
}

PathLoss
PathLossDb (double distanceM, double carrierGhz)
{
  if (!(carrierGhz > 0.0))
    {
      throw std::invalid_argument ("PathLossDb: carrier must be positive");
    }
  PathLoss out;
  double d = distanceM;
  if (d < 1.0)
    {
      d = 1.0;
      out.clamped = true;
    }
  out.db = 32.4 + 17.3 * std::log10 (d) + 20.0 * std::log10 (carrierGhz);
  return out;
}

ComplexVector
SteeringVector (const UpaConfig& upa, double azimuth, double elevation)
{
  if (std::abs (elevation) > std::numbers::pi / 2.0 + 1e-12)
    {
      throw std::invalid_argument ("SteeringVector: |elevation| > pi/2");
    }
  const double ce = std::cos (elevation);
  return PhaseRamp (upa, ce * std::sin (azimuth), std::sin (elevation));
}

Codebook
DftCodebook (const UpaConfig& upa, int oversampling)
{
  upa.Validate ();
  if (oversampling != 1 && oversampling != 4)
    {
      throw std::invalid_argument ("DftCodebook: oversampling must be 1 or 4");
    }

  std::vector<BeamWeights> level1;
  level1.reserve (upa.Elements ());
  for (int kh = 0; kh < upa.n_h; ++kh)
    {
      for (int kv = 0; kv < upa.n_v; ++kv)
        {
          level1.push_back (MakeDftBeam (upa, kh, kv, 1));
        }
    }

  std::vector<BeamWeights> level2;
  if (oversampling == 4)
    {
      // 2x grid per axis: parent k sits on index 2k and owns 2k and 2k+1.
      // Index 2k+1 is equidistant from k and k+1; the tie goes to k.
      level2.reserve (4 * level1.size ());
      for (int kh = 0; kh < upa.n_h; ++kh)
        {
          for (int kv = 0; kv < upa.n_v; ++kv)
            {
              for (int a = 0; a < 2; ++a)
                {
                  for (int c = 0; c < 2; ++c)
                    {
                      level2.push_back (MakeDftBeam (upa, 2 * kh + a, 2 * kv + c, 2));
                    }
                }
            }
        }
    }
  return Codebook (upa, std::move (level1), std::move (level2));
}

LinkState
MakeLink (const geometry::Scene& scene, std::size_t bsIndex, geometry::Point3 mobile, const ChannelParams& params,
          const UpaConfig& bsUpa, const UpaConfig& ueUpa)
{
  const geometry::Pose& bs = scene.bs_poses.at (bsIndex);
  const geometry::Bearing b = geometry::BearingAndRange (bs, mobile);

  LinkState link;
  link.azimuth = b.azimuth;
  link.elevation = b.elevation;
  link.range = b.range;
  link.los = !geometry::SegmentBlocked (scene, bs.Position (), mobile);
  const PathLoss pl = PathLossDb (b.range, params.carrier_ghz);
  link.range_clamped = pl.clamped;
  link.path_gain_db = -pl.db - (link.los ? 0.0 : params.blockage_loss_db);
  link.tx_response = SteeringVector (bsUpa, b.azimuth, b.elevation);

  const geometry::Pose ueFrame (mobile, 0.0, 0.0);
  const geometry::Bearing back = geometry::BearingAndRange (ueFrame, bs.Position ());
  link.rx_response = SteeringVector (ueUpa, back.azimuth, back.elevation);
  return link;
}

double
PathGainDb (double range, bool los, const ChannelParams& params)
{
  return -PathLossDb (range, params.carrier_ghz).db - (los ? 0.0 : params.blockage_loss_db);
}

Complex
InnerProduct (std::span<const Complex> a, std::span<const Complex> b)
{
  if (a.size () != b.size ())
    {
      throw std::invalid_argument ("InnerProduct: length mismatch");
    }
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size (); ++i)
    {
      acc += std::conj (a[i]) * b[i];
    }
  return acc;
}

double
RsrpDbm (const LinkState& link, const BeamWeights& txBeam, const ChannelParams& params)
{
  if (txBeam.weights.size () != link.tx_response.size ())
    {
      throw std::invalid_argument ("RsrpDbm: beam length does not match the BS array");
    }
  const double amplitude = std::abs (InnerProduct (txBeam.weights, link.tx_response));
  const double nTx = static_cast<double> (link.tx_response.size ());
  const double nRx = static_cast<double> (link.rx_response.size ());
  const double beamTerm = amplitude * std::sqrt (nTx);
  if (!(beamTerm > 0.0))
    {
      return kRsrpFloorDbm;
    }
  const double rsrp = params.tx_power_dbm + link.path_gain_db + 20.0 * std::log10 (beamTerm)
                      + 10.0 * std::log10 (nRx);
  return std::max (rsrp, kRsrpFloorDbm);
}

double
AlignedRsrpDbm (double pathGainDb, std::size_t nTx, std::size_t nRx, const ChannelParams& params)
{
  return params.tx_power_dbm + pathGainDb + 10.0 * std::log10 (static_cast<double> (nTx))
         + 10.0 * std::log10 (static_cast<double> (nRx));
}

double
NormalizedArrayGain (const BeamWeights& beam, double azimuth, double elevation, const UpaConfig& upa)
{
  if (beam.weights.size () != upa.Elements ())
    {
      throw std::invalid_argument ("NormalizedArrayGain: beam does not match the array");
    }
  const ComplexVector a = SteeringVector (upa, azimuth, elevation);
  const double g = std::norm (InnerProduct (beam.weights, a));
  return std::min (g, 1.0);
}

double
ShannonRate (double snrLinear, double bandwidthHz)
{
  if (snrLinear < 0.0)
    {
      throw std::invalid_argument ("ShannonRate: negative SNR");
    }
  return bandwidthHz * std::log2 (1.0 + snrLinear);
}

} // namespace svwc::phy
