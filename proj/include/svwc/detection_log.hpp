#pragma once

#include "svwc/sensing.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svwc::sensing {

/// One row of a recorded detector log.
struct LogDetection
{
  long frame_id = 0;
  int camera_id = 0;
  ObjectClass cls = ObjectClass::mobile;
  Pixel pixel;
  std::optional<double> depth;
  /// world position of the object this detection belongs to; empty for a
  /// false positive
  std::optional<geometry::Point3> truth;
};

/**
 * Reads a detection log: CSV with the header
 * frame_id,camera_id,class,u,v,depth_m,truth_x,truth_y,truth_z
 * (column order free, extra columns ignored). depth_m and the truth columns
 * may be empty. Throws std::invalid_argument naming the offending line.
 */
std::vector<LogDetection> ParseDetectionLog (std::string_view text);
std::vector<LogDetection> LoadDetectionLog (const std::string& path);

/**
 * Replays a log through the estimator. Each frame's truths are the distinct
 * truth positions of its mobile-class rows; every truth is scored against
 * the nearest mobile estimate within rig.match_gate.
 */
SensingEvaluation EvaluateDetectionLog (std::span<const LogDetection> log, const SensingRig& rig, SensingMode mode);

} // namespace svwc::sensing
