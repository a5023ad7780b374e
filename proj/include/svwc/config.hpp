#pragma once

#include "svwc/beam_mgmt.hpp"
#include "svwc/cell_assoc.hpp"
#include "svwc/geometry.hpp"
#include "svwc/phy.hpp"
#include "svwc/rach.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace svwc::harness {

enum class ExperimentKind
{
  beam,
  assoc,
  rach
};

std::string_view ToString (ExperimentKind k);

/// Detector statistics and error target for one SVWC sensing variant.
struct DetectorSettings
{
  double recall = 1.0;
  double precision = 1.0;
  double target_error_cm = 0.0;
  /// used as-is when calibration is off
  double pixel_sigma = 0.0;
  double depth_sigma_m = 0.0;
  friend bool operator== (const DetectorSettings&, const DetectorSettings&) = default;
};

struct SensingSettings
{
  double baseline_m = 0.5;
  double tau_assoc_m = 0.5;
  double match_gate_m = 1.5;
  double h_fov_deg = 70.0;
  double v_fov_deg = 43.5;
  double max_range_m = 12.0;
  /// RGB-d ranging noise shared by the DETR variants
  double depth_sigma_m = 0.35;
  bool calibrate = true;
  int calibration_samples = 10000;
  std::uint64_t calibration_seed = 1;
  DetectorSettings multi_view{0.9557, 0.9375, 8.17, 0.5, 0.35};
  DetectorSettings single_view{0.6408, 0.9375, 38.50, 28.0, 0.35};
  DetectorSettings efficientdet{0.4209, 0.8471, 60.26, 44.0, 0.55};
  double prs_target_error_cm = 89.67;
  /// relative sigma of the crowd counts used by density-aware access
  double count_noise = 0.1;
  friend bool operator== (const SensingSettings&, const SensingSettings&) = default;
};

struct ExperimentConfig
{
  ExperimentKind experiment = ExperimentKind::beam;
  long trials = 10000;
  std::uint64_t seed = 0;
  std::string output;
  /// 0 = one worker per hardware thread
  int workers = 1;
  /// empty = every scheme of the experiment
  std::vector<std::string> schemes;
  bool allow_nonstandard = false;

  assoc::SceneGenConfig scene;
  phy::ChannelParams channel;
  phy::UpaConfig bs_upa{8, 8, 0.5};
  phy::UpaConfig ue_upa{2, 2, 0.5};
  geometry::ExtrapolationConfig predictor;
  SensingSettings sensing;
  beam::LatencyModel latency;
  assoc::AssocConfig assoc;
  std::vector<double> densities{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  rach::RachConfig rach;
  rach::Placement placement;
  int rach_mobiles = 256;

  friend bool operator== (const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parse or range error; the message names the key and, when known, the line.
class ConfigError : public std::runtime_error
{
public:
  ConfigError (const std::string& what, int line)
    : std::runtime_error (what),
      m_line (line)
  {
  }
  int Line () const { return m_line; }

private:
  int m_line;
};

/**
 * Parses `key = value` lines (`#` starts a comment, blank lines ignored).
 * Every key has a default; unknown keys, malformed values and out-of-range
 * values raise ConfigError.
 */
ExperimentConfig LoadConfig (std::string_view text);
ExperimentConfig LoadConfigFile (const std::string& path);

/// Applies one `key = value` override on top of an existing config.
void SetConfigValue (ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Current value of a key in config syntax.
std::string GetConfigValue (const ExperimentConfig& cfg, std::string_view key);

/// Every key in canonical order, one per line; LoadConfig(SerializeConfig(c)) == c.
std::string SerializeConfig (const ExperimentConfig& cfg);

std::vector<std::string> ConfigKeys ();

/// Whole-config consistency checks (throws ConfigError, line 0).
void ValidateConfig (const ExperimentConfig& cfg);

} // namespace svwc::harness
