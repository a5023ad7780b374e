#pragma once

#include "svwc/geometry.hpp"

#include <cstdint>
#include <vector>

namespace svwc::geometry {

/**
 * Uniform 2D bucket grid over the scene footprint for fast blockage queries.
 *
 * Answers exactly the same question as SegmentBlocked; only the set of boxes
 * visited per query differs. Immutable after construction.
 */
class ObstacleGrid
{
public:
  explicit ObstacleGrid (const Scene& scene, double cellSize = 2.0);

  bool Blocked (Point3 a, Point3 b) const;

private:
  std::size_t CellIndex (int ix, int iy) const { return static_cast<std::size_t> (iy) * m_nx + ix; }

  std::vector<ObstacleBox> m_boxes;
  double m_cell;
  int m_nx;
  int m_ny;
  std::vector<std::uint32_t> m_cellStart;
  std::vector<std::uint32_t> m_cellItems;
};

} // namespace svwc::geometry
