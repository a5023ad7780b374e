#include "svwc/config.hpp"

#include "svwc/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace svwc::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity ();

std::string_view
Trim (std::string_view s)
{
  const auto first = s.find_first_not_of (" \t");
  if (first == std::string_view::npos)
    {
      return {};
    }
  const auto last = s.find_last_not_of (" \t\r");
  return s.substr (first, last - first + 1);
}

// Setters throw std::invalid_argument with a bare reason; the caller adds
// key and line.
double
ParseDouble (std::string_view v)
{
  v = Trim (v);
  if (v == "inf" || v == "+inf")
    {
      return kInf;
    }
  if (v == "-inf")
    {
      return -kInf;
    }
  double out = 0.0;
  const auto res = std::from_chars (v.data (), v.data () + v.size (), out);
  if (v.empty () || res.ec != std::errc () || res.ptr != v.data () + v.size ())
    {
      throw std::invalid_argument ("expected a number, got '" + std::string (v) + "'");
    }
  return out;
}

template <typename Int>
Int
ParseInteger (std::string_view v)
{
  v = Trim (v);
  Int out{};
  const auto res = std::from_chars (v.data (), v.data () + v.size (), out);
  if (v.empty () || res.ec != std::errc () || res.ptr != v.data () + v.size ())
    {
      throw std::invalid_argument ("expected an integer, got '" + std::string (v) + "'");
    }
  return out;
}

bool
ParseBool (std::string_view v)
{
  v = Trim (v);
  if (v == "true" || v == "1" || v == "yes")
    {
      return true;
    }
  if (v == "false" || v == "0" || v == "no")
    {
      return false;
    }
  throw std::invalid_argument ("expected true or false, got '" + std::string (v) + "'");
}

std::vector<std::string_view>
SplitList (std::string_view v)
{
  std::vector<std::string_view> out;
  v = Trim (v);
  if (v.empty ())
    {
      return out;
    }
  std::size_t start = 0;
  while (true)
    {
      const auto comma = v.find (',', start);
      out.push_back (Trim (v.substr (start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
      if (comma == std::string_view::npos)
        {
          break;
        }
      start = comma + 1;
    }
  return out;
}

struct Range
{
  double lo = -kInf;
  double hi = kInf;
  bool lo_open = false;

  void Check (double x) const
  {
    if (std::isnan (x) || (lo_open ? !(x > lo) : !(x >= lo)) || !(x <= hi))
      {
        std::ostringstream os;
        os << "value " << csv::FormatDouble (x) << " out of range " << (lo_open ? "(" : "[")
           << csv::FormatDouble (lo) << ", " << csv::FormatDouble (hi) << "]";
        throw std::invalid_argument (os.str ());
      }
  }
};

constexpr Range kPositive{0.0, kInf, true};
constexpr Range kNonNegative{0.0, kInf, false};
constexpr Range kProbability{0.0, 1.0, true};
constexpr Range kAny{};
constexpr Range kUnit{0.0, 1.0, false};

struct Field
{
  std::string name;
  std::function<void (ExperimentConfig&, std::string_view)> set;
  std::function<std::string (const ExperimentConfig&)> get;
};

template <typename Ref>
Field
DoubleField (std::string name, Ref ref, Range range)
{
  return {std::move (name),
          [ref, range] (ExperimentConfig& c, std::string_view v) {
            const double x = ParseDouble (v);
            range.Check (x);
            ref (c) = x;
          },
          [ref] (const ExperimentConfig& c) { return csv::FormatDouble (ref (const_cast<ExperimentConfig&> (c))); }};
}

template <typename Int, typename Ref>
Field
IntField (std::string name, Ref ref, Range range)
{
  return {std::move (name),
          [ref, range] (ExperimentConfig& c, std::string_view v) {
            const Int x = ParseInteger<Int> (v);
            range.Check (static_cast<double> (x));
            ref (c) = x;
          },
          [ref] (const ExperimentConfig& c) { return std::to_string (ref (const_cast<ExperimentConfig&> (c))); }};
}

template <typename Ref>
Field
BoolField (std::string name, Ref ref)
{
  return {std::move (name), [ref] (ExperimentConfig& c, std::string_view v) { ref (c) = ParseBool (v); },
          [ref] (const ExperimentConfig& c) {
            return std::string (ref (const_cast<ExperimentConfig&> (c)) ? "true" : "false");
          }};
}

void
AddDetector (std::vector<Field>& f, const std::string& prefix, DetectorSettings& (*ref) (ExperimentConfig&))
{
  f.push_back (DoubleField (prefix + ".recall", [ref] (ExperimentConfig& c) -> double& { return ref (c).recall; },
                            kProbability));
  f.push_back (DoubleField (prefix + ".precision",
                            [ref] (ExperimentConfig& c) -> double& { return ref (c).precision; }, kProbability));
  f.push_back (DoubleField (prefix + ".target_error_cm",
                            [ref] (ExperimentConfig& c) -> double& { return ref (c).target_error_cm; },
                            kNonNegative));
  f.push_back (DoubleField (prefix + ".pixel_sigma",
                            [ref] (ExperimentConfig& c) -> double& { return ref (c).pixel_sigma; }, kNonNegative));
  f.push_back (DoubleField (prefix + ".depth_sigma_m",
                            [ref] (ExperimentConfig& c) -> double& { return ref (c).depth_sigma_m; },
                            kNonNegative));
}

#define SVWC_REF(expr) [] (ExperimentConfig & c) -> auto& { return expr; }

std::vector<Field>
BuildFields ()
{
  std::vector<Field> f;
  f.push_back ({"experiment",
                [] (ExperimentConfig& c, std::string_view v) {
                  v = Trim (v);
                  if (v == "beam")
                    c.experiment = ExperimentKind::beam;
                  else if (v == "assoc")
                    c.experiment = ExperimentKind::assoc;
                  else if (v == "rach")
                    c.experiment = ExperimentKind::rach;
                  else
                    throw std::invalid_argument ("expected beam, assoc or rach, got '" + std::string (v) + "'");
                },
                [] (const ExperimentConfig& c) { return std::string (ToString (c.experiment)); }});
  f.push_back (IntField<long> ("trials", SVWC_REF (c.trials), {1.0, 1e9}));
  f.push_back (IntField<std::uint64_t> ("seed", SVWC_REF (c.seed), kAny));
  f.push_back ({"output", [] (ExperimentConfig& c, std::string_view v) { c.output = std::string (Trim (v)); },
                [] (const ExperimentConfig& c) { return c.output; }});
  f.push_back (IntField<int> ("workers", SVWC_REF (c.workers), {0.0, 1024.0}));
  f.push_back ({"schemes",
                [] (ExperimentConfig& c, std::string_view v) {
                  c.schemes.clear ();
                  for (auto s : SplitList (v))
                    {
                      if (s.empty ())
                        throw std::invalid_argument ("empty scheme name");
                      c.schemes.emplace_back (s);
                    }
                },
                [] (const ExperimentConfig& c) {
                  std::string out;
                  for (std::size_t i = 0; i < c.schemes.size (); ++i)
                    out += (i ? "," : "") + c.schemes[i];
                  return out;
                }});
  f.push_back (BoolField ("allow_nonstandard", SVWC_REF (c.allow_nonstandard)));

  f.push_back (DoubleField ("scene.width", SVWC_REF (c.scene.area.width), kPositive));
  f.push_back (DoubleField ("scene.depth", SVWC_REF (c.scene.area.depth), kPositive));
  f.push_back (DoubleField ("scene.height", SVWC_REF (c.scene.area.height), kPositive));
  f.push_back (IntField<int> ("scene.n_mobiles", SVWC_REF (c.scene.n_mobiles), {1.0, 100000.0}));
  f.push_back (DoubleField ("scene.bs_height", SVWC_REF (c.scene.bs_height), kPositive));
  f.push_back (DoubleField ("scene.bs_downtilt_rad", SVWC_REF (c.scene.bs_downtilt_rad), {-1.5707963267948966, 1.5707963267948966}));
  f.push_back (DoubleField ("scene.mobile_height", SVWC_REF (c.scene.mobile_height), kPositive));
  f.push_back (DoubleField ("scene.min_speed", SVWC_REF (c.scene.min_speed), kPositive));
  f.push_back (DoubleField ("scene.max_speed", SVWC_REF (c.scene.max_speed), kPositive));
  f.push_back (DoubleField ("scene.obstacle_min_side", SVWC_REF (c.scene.obstacle_min_side), kPositive));
  f.push_back (DoubleField ("scene.obstacle_max_side", SVWC_REF (c.scene.obstacle_max_side), kPositive));
  f.push_back (DoubleField ("scene.obstacle_min_height", SVWC_REF (c.scene.obstacle_min_height), kPositive));
  f.push_back (DoubleField ("scene.obstacle_max_height", SVWC_REF (c.scene.obstacle_max_height), kPositive));
  f.push_back (DoubleField ("scene.bs_clearance", SVWC_REF (c.scene.bs_clearance), kNonNegative));
  f.push_back (DoubleField ("scene.min_connected_fraction", SVWC_REF (c.scene.min_connected_fraction), kUnit));
  f.push_back (DoubleField ("scene.density_tolerance", SVWC_REF (c.scene.density_tolerance), kPositive));

  f.push_back (DoubleField ("geometry.predict_window_s", SVWC_REF (c.predictor.window_s), kPositive));
  f.push_back (IntField<int> ("geometry.predict_samples", SVWC_REF (c.predictor.samples), {2.0, 1000.0}));

  f.push_back (DoubleField ("phy.carrier_ghz", SVWC_REF (c.channel.carrier_ghz), kPositive));
  f.push_back (DoubleField ("phy.bandwidth_hz", SVWC_REF (c.channel.bandwidth_hz), kPositive));
  f.push_back (DoubleField ("phy.tx_power_dbm", SVWC_REF (c.channel.tx_power_dbm), kPositive));
  f.push_back (DoubleField ("phy.noise_figure_db", SVWC_REF (c.channel.noise_figure_db), kPositive));
  f.push_back (DoubleField ("phy.blockage_loss_db", SVWC_REF (c.channel.blockage_loss_db), kPositive));
  f.push_back (IntField<int> ("phy.bs_n_h", SVWC_REF (c.bs_upa.n_h), {1.0, 256.0}));
  f.push_back (IntField<int> ("phy.bs_n_v", SVWC_REF (c.bs_upa.n_v), {1.0, 256.0}));
  f.push_back (DoubleField ("phy.bs_spacing", SVWC_REF (c.bs_upa.spacing), kPositive));
  f.push_back (IntField<int> ("phy.ue_n_h", SVWC_REF (c.ue_upa.n_h), {1.0, 256.0}));
  f.push_back (IntField<int> ("phy.ue_n_v", SVWC_REF (c.ue_upa.n_v), {1.0, 256.0}));
  f.push_back (DoubleField ("phy.ue_spacing", SVWC_REF (c.ue_upa.spacing), kPositive));

  f.push_back (DoubleField ("sensing.baseline_m", SVWC_REF (c.sensing.baseline_m), kPositive));
  f.push_back (DoubleField ("sensing.tau_assoc_m", SVWC_REF (c.sensing.tau_assoc_m), kPositive));
  f.push_back (DoubleField ("sensing.match_gate_m", SVWC_REF (c.sensing.match_gate_m), kPositive));
  f.push_back (DoubleField ("sensing.h_fov_deg", SVWC_REF (c.sensing.h_fov_deg), {0.0, 180.0, true}));
  f.push_back (DoubleField ("sensing.v_fov_deg", SVWC_REF (c.sensing.v_fov_deg), {0.0, 180.0, true}));
  f.push_back (DoubleField ("sensing.max_range_m", SVWC_REF (c.sensing.max_range_m), kPositive));
  f.push_back (DoubleField ("sensing.depth_sigma_m", SVWC_REF (c.sensing.depth_sigma_m), kNonNegative));
  f.push_back (BoolField ("sensing.calibrate", SVWC_REF (c.sensing.calibrate)));
  f.push_back (IntField<int> ("sensing.calibration_samples", SVWC_REF (c.sensing.calibration_samples), {1.0, 1e7}));
  f.push_back (IntField<std::uint64_t> ("sensing.calibration_seed", SVWC_REF (c.sensing.calibration_seed), kAny));
  AddDetector (f, "sensing.multi_view", [] (ExperimentConfig& c) -> DetectorSettings& { return c.sensing.multi_view; });
  AddDetector (f, "sensing.single_view", [] (ExperimentConfig& c) -> DetectorSettings& { return c.sensing.single_view; });
  AddDetector (f, "sensing.efficientdet", [] (ExperimentConfig& c) -> DetectorSettings& { return c.sensing.efficientdet; });
  f.push_back (DoubleField ("sensing.prs_target_error_cm", SVWC_REF (c.sensing.prs_target_error_cm), kNonNegative));
  f.push_back (DoubleField ("sensing.count_noise", SVWC_REF (c.sensing.count_noise), kNonNegative));

  f.push_back (DoubleField ("beam.nr_sweep_ms", SVWC_REF (c.latency.nr_sweep_ms), kNonNegative));
  f.push_back (DoubleField ("beam.cv_latency_ms", SVWC_REF (c.latency.cv_processing_ms), kNonNegative));
  f.push_back (DoubleField ("beam.prs_latency_ms", SVWC_REF (c.latency.prs_ms), kNonNegative));

  f.push_back (DoubleField ("assoc.dt", SVWC_REF (c.assoc.dt), kPositive));
  f.push_back (DoubleField ("assoc.duration", SVWC_REF (c.assoc.duration), kPositive));
  f.push_back (DoubleField ("assoc.rsrp_threshold_dbm", SVWC_REF (c.assoc.rsrp_threshold_dbm), {-kInf, kInf}));
  f.push_back (DoubleField ("assoc.rlf_recovery_ms", SVWC_REF (c.assoc.rlf_recovery_ms), kNonNegative));
  f.push_back (DoubleField ("assoc.reactive_ho_interruption_ms", SVWC_REF (c.assoc.reactive_ho_interruption_ms),
                            kNonNegative));
  f.push_back (DoubleField ("assoc.proactive_ho_interruption_ms", SVWC_REF (c.assoc.proactive_ho_interruption_ms),
                            kNonNegative));
  f.push_back (DoubleField ("assoc.lookahead_s", SVWC_REF (c.assoc.lookahead_s), kPositive));
  f.push_back (DoubleField ("assoc.trend_window_s", SVWC_REF (c.assoc.trend_window_s), kPositive));
  f.push_back ({"assoc.densities",
                [] (ExperimentConfig& c, std::string_view v) {
                  std::vector<double> out;
                  for (auto item : SplitList (v))
                    {
                      const double d = ParseDouble (item);
                      Range{0.0, 0.5}.Check (d);
                      out.push_back (d);
                    }
                  if (out.empty ())
                    throw std::invalid_argument ("at least one density required");
                  c.densities = std::move (out);
                },
                [] (const ExperimentConfig& c) {
                  std::string out;
                  for (std::size_t i = 0; i < c.densities.size (); ++i)
                    out += (i ? "," : "") + csv::FormatDouble (c.densities[i]);
                  return out;
                }});

  f.push_back (IntField<int> ("rach.n_ssb", SVWC_REF (c.rach.n_ssb), {1.0, 4096.0}));
  f.push_back (IntField<int> ("rach.total_preambles", SVWC_REF (c.rach.total_preambles), {1.0, 1e6}));
  f.push_back (DoubleField ("rach.sweep_period_ms", SVWC_REF (c.rach.sweep_period_ms), kPositive));
  f.push_back (DoubleField ("rach.retrial_period_ms", SVWC_REF (c.rach.retrial_period_ms), kPositive));
  f.push_back (IntField<int> ("rach.max_rounds", SVWC_REF (c.rach.max_rounds), {1.0, 1e7}));
  f.push_back (IntField<int> ("rach.min_per_beam", SVWC_REF (c.rach.min_per_beam), {1.0, 1e6}));
  f.push_back (IntField<int> ("rach.n_mobiles", SVWC_REF (c.rach_mobiles), {1.0, 1e7}));
  f.push_back (IntField<int> ("rach.hotspot_beams", SVWC_REF (c.placement.hotspot_beams), {0.0, 4096.0}));
  f.push_back (DoubleField ("rach.hotspot_fraction", SVWC_REF (c.placement.hotspot_fraction), {0.0, 1.0}));
  return f;
}

#undef SVWC_REF

const std::vector<Field>&
Fields ()
{
  static const std::vector<Field> fields = BuildFields ();
  return fields;
}

const Field*
FindField (std::string_view key)
{
  for (const auto& f : Fields ())
    {
      if (f.name == key)
        {
          return &f;
        }
    }
  return nullptr;
}

std::string
AtLine (int line)
{
  return line > 0 ? " (line " + std::to_string (line) + ")" : std::string ();
}

void
Apply (ExperimentConfig& cfg, std::string_view key, std::string_view value, int line)
{
  const Field* f = FindField (key);
  if (f == nullptr)
    {
      throw ConfigError ("unknown key '" + std::string (key) + "'" + AtLine (line), line);
    }
  try
    {
      f->set (cfg, value);
    }
  catch (const std::invalid_argument& e)
    {
      throw ConfigError ("bad value for '" + std::string (key) + "'" + AtLine (line) + ": " + e.what (), line);
    }
}

void
ValidateWithLines (const ExperimentConfig& cfg, const std::map<std::string, int, std::less<>>& lines)
{
  auto fail = [&] (const std::string& key, const std::string& why) {
    const auto it = lines.find (key);
    const int line = it == lines.end () ? 0 : it->second;
    throw ConfigError ("bad value for '" + key + "'" + AtLine (line) + ": " + why, line);
  };
  if (!cfg.allow_nonstandard && cfg.rach.n_ssb != 8 && cfg.rach.n_ssb != 32)
    {
      fail ("rach.n_ssb", "must be 8 or 32 (set allow_nonstandard = true to override)");
    }
  if (cfg.rach.total_preambles < cfg.rach.n_ssb * cfg.rach.min_per_beam)
    {
      fail ("rach.total_preambles", "must be at least rach.n_ssb * rach.min_per_beam");
    }
  if (cfg.placement.hotspot_beams > cfg.rach.n_ssb)
    {
      fail ("rach.hotspot_beams", "exceeds rach.n_ssb");
    }
  if (cfg.assoc.dt > cfg.assoc.lookahead_s)
    {
      fail ("assoc.dt", "must not exceed assoc.lookahead_s");
    }
  if (cfg.scene.min_speed > cfg.scene.max_speed)
    {
      fail ("scene.min_speed", "exceeds scene.max_speed");
    }
  if (cfg.scene.obstacle_min_side > cfg.scene.obstacle_max_side)
    {
      fail ("scene.obstacle_min_side", "exceeds scene.obstacle_max_side");
    }
  if (cfg.scene.obstacle_min_height > cfg.scene.obstacle_max_height)
    {
      fail ("scene.obstacle_min_height", "exceeds scene.obstacle_max_height");
    }
  if (cfg.scene.obstacle_max_side >= std::min (cfg.scene.area.width, cfg.scene.area.depth))
    {
      fail ("scene.obstacle_max_side", "does not fit in the area");
    }
  for (const auto& s : cfg.schemes)
    {
      bool ok = false;
      switch (cfg.experiment)
        {
        case ExperimentKind::beam:
          ok = beam::ParseBeamScheme (s).has_value ();
          break;
        case ExperimentKind::assoc:
          ok = assoc::ParseAssocScheme (s).has_value ();
          break;
        case ExperimentKind::rach:
          ok = rach::ParseRachScheme (s).has_value ();
          break;
        }
      if (!ok)
        {
          fail ("schemes", "unknown scheme '" + s + "' for experiment " + std::string (ToString (cfg.experiment)));
        }
    }
}

} // namespace

std::string_view
ToString (ExperimentKind k)
{
  switch (k)
    {
    case ExperimentKind::beam:
      return "beam";
    case ExperimentKind::assoc:
      return "assoc";
    case ExperimentKind::rach:
      return "rach";
    }
  return "beam";
}

ExperimentConfig
LoadConfig (std::string_view text)
{
  ExperimentConfig cfg;
  std::map<std::string, int, std::less<>> lines;
  int lineNo = 0;
  std::size_t pos = 0;
  while (pos <= text.size ())
    {
      const auto nl = text.find ('\n', pos);
      std::string_view line = text.substr (pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size () + 1 : nl + 1;
      ++lineNo;

      const auto hash = line.find ('#');
      if (hash != std::string_view::npos)
        {
          line = line.substr (0, hash);
        }
      line = Trim (line);
      if (line.empty ())
        {
          continue;
        }
      const auto eq = line.find ('=');
      if (eq == std::string_view::npos)
        {
          throw ConfigError ("expected 'key = value'" + AtLine (lineNo), lineNo);
        }
      const std::string_view key = Trim (line.substr (0, eq));
      const std::string_view value = Trim (line.substr (eq + 1));
      if (key.empty ())
        {
          throw ConfigError ("missing key" + AtLine (lineNo), lineNo);
        }
      if (lines.count (key) != 0)
        {
          throw ConfigError ("duplicate key '" + std::string (key) + "'" + AtLine (lineNo), lineNo);
        }
      Apply (cfg, key, value, lineNo);
      lines.emplace (std::string (key), lineNo);
    }
  ValidateWithLines (cfg, lines);
  return cfg;
}

ExperimentConfig
LoadConfigFile (const std::string& path)
{
  std::ifstream in (path, std::ios::binary);
  if (!in)
    {
      throw ConfigError ("cannot open config file '" + path + "'", 0);
    }
  std::ostringstream ss;
  ss << in.rdbuf ();
  return LoadConfig (ss.str ());
}

void
SetConfigValue (ExperimentConfig& cfg, std::string_view key, std::string_view value)
{
  Apply (cfg, key, value, 0);
}

std::string
GetConfigValue (const ExperimentConfig& cfg, std::string_view key)
{
  const Field* f = FindField (key);
  if (f == nullptr)
    {
      throw ConfigError ("unknown key '" + std::string (key) + "'", 0);
    }
  return f->get (cfg);
}

std::string
SerializeConfig (const ExperimentConfig& cfg)
{
  std::string out;
  for (const auto& f : Fields ())
    {
      out += f.name + " = " + f.get (cfg) + "\n";
    }
  return out;
}

std::vector<std::string>
ConfigKeys ()
{
  std::vector<std::string> keys;
  for (const auto& f : Fields ())
    {
      keys.push_back (f.name);
    }
  return keys;
}

void
ValidateConfig (const ExperimentConfig& cfg)
{
  ValidateWithLines (cfg, {});
}

} // namespace svwc::harness
