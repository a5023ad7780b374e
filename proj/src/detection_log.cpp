#include "svwc/detection_log.hpp"

#include "svwc/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace svwc::sensing {

namespace {

template <typename T>
T
ParseNumber (const std::string& s, std::size_t line, const char* column)
{
  T v{};
  const auto* end = s.data () + s.size ();
  const auto [ptr, ec] = std::from_chars (s.data (), end, v);
  if (ec != std::errc () || ptr != end || s.empty ())
    {
      throw std::invalid_argument ("detection log line " + std::to_string (line) + ": bad " + column + " '" + s +
                                   "'");
    }
  if constexpr (std::is_floating_point_v<T>)
    {
      if (!std::isfinite (v))
        {
          throw std::invalid_argument ("detection log line " + std::to_string (line) + ": non-finite " + column);
        }
    }
  return v;
}

} // namespace

std::vector<LogDetection>
ParseDetectionLog (std::string_view text)
{
  if (text.size () >= 3 && text.substr (0, 3) == "\xEF\xBB\xBF")
    {
      text.remove_prefix (3);
    }
  csv::Table table;
  try
    {
      table = csv::Parse (text);
    }
  catch (const std::exception& e)
    {
      throw std::invalid_argument (std::string ("detection log: ") + e.what ());
    }

  std::array<std::size_t, 9> col{};
  const std::array<const char*, 9> names{"frame_id", "camera_id", "class",   "u",      "v",
                                         "depth_m",  "truth_x",   "truth_y", "truth_z"};
  for (std::size_t i = 0; i < names.size (); ++i)
    {
      try
        {
          col[i] = table.Column (names[i]);
        }
      catch (const std::out_of_range&)
        {
          throw std::invalid_argument (std::string ("detection log: missing column ") + names[i]);
        }
    }

  std::vector<LogDetection> out;
  out.reserve (table.rows.size ());
  for (std::size_t r = 0; r < table.rows.size (); ++r)
    {
      const auto& row = table.rows[r];
      const std::size_t line = r + 2;
      LogDetection d;
      d.frame_id = ParseNumber<long> (row[col[0]], line, "frame_id");
      d.camera_id = ParseNumber<int> (row[col[1]], line, "camera_id");
      if (d.camera_id != 0 && d.camera_id != 1)
        {
          throw std::invalid_argument ("detection log line " + std::to_string (line) + ": camera_id must be 0 or 1");
        }
      const auto cls = ParseObjectClass (row[col[2]]);
      if (!cls)
        {
          throw std::invalid_argument ("detection log line " + std::to_string (line) + ": unknown class '" +
                                       row[col[2]] + "'");
        }
      d.cls = *cls;
      d.pixel.u = ParseNumber<double> (row[col[3]], line, "u");
      d.pixel.v = ParseNumber<double> (row[col[4]], line, "v");
      if (!row[col[5]].empty ())
        {
          d.depth = ParseNumber<double> (row[col[5]], line, "depth_m");
        }
      const bool hasX = !row[col[6]].empty ();
      const bool hasY = !row[col[7]].empty ();
      const bool hasZ = !row[col[8]].empty ();
      if (hasX != hasY || hasY != hasZ)
        {
          throw std::invalid_argument ("detection log line " + std::to_string (line) +
                                       ": truth columns must be all set or all empty");
        }
      if (hasX)
        {
          d.truth = geometry::Point3{ParseNumber<double> (row[col[6]], line, "truth_x"),
                                     ParseNumber<double> (row[col[7]], line, "truth_y"),
                                     ParseNumber<double> (row[col[8]], line, "truth_z")};
        }
      out.push_back (d);
    }
  return out;
}

std::vector<LogDetection>
LoadDetectionLog (const std::string& path)
{
  std::ifstream in (path, std::ios::binary);
  if (!in)
    {
      throw std::invalid_argument ("cannot open detection log " + path);
    }
  std::ostringstream ss;
  ss << in.rdbuf ();
  return ParseDetectionLog (ss.str ());
}

SensingEvaluation
EvaluateDetectionLog (std::span<const LogDetection> log, const SensingRig& rig, SensingMode mode)
{
  struct Frame
  {
    std::array<std::vector<Detection>, 2> dets;
    std::vector<geometry::Point3> truths;
  };
  std::map<long, Frame> frames;
  for (const auto& row : log)
    {
      Frame& f = frames[row.frame_id];
      Detection d;
      d.cls = row.cls;
      d.pixel = row.pixel;
      d.depth = row.depth;
      f.dets[row.camera_id].push_back (d);
      if (row.truth && row.cls == ObjectClass::mobile)
        {
          bool seen = false;
          for (const auto& t : f.truths)
            {
              seen = seen || geometry::Distance (t, *row.truth) < 1e-9;
            }
          if (!seen)
            {
              f.truths.push_back (*row.truth);
            }
        }
    }

  const CameraModel cam0 = rig.Camera (0);
  const CameraModel cam1 = rig.Camera (1);
  SensingEvaluation eval;
  double sum = 0.0;
  for (const auto& [id, f] : frames)
    {
      std::vector<PositionEstimate> est;
      if (mode == SensingMode::multi_view)
        {
          est = EstimateMultiView (cam0, f.dets[0], cam1, f.dets[1], rig.tau_assoc);
        }
      else
        {
          // single camera: the left one, as in the emulated pipeline
          est = EstimateSingleView (cam0, f.dets[0]);
        }
      for (const auto& truth : f.truths)
        {
          ++eval.samples;
          double best = std::numeric_limits<double>::infinity ();
          for (const auto& e : est)
            {
              if (e.cls == ObjectClass::mobile)
                {
                  best = std::min (best, geometry::Distance (e.position, truth));
                }
            }
          if (best <= rig.match_gate)
            {
              ++eval.detected;
              sum += best;
            }
        }
    }
  eval.mean_error_m = eval.detected > 0 ? sum / eval.detected : 0.0;
  return eval;
}

} // namespace svwc::sensing
