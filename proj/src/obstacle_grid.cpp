#include "svwc/obstacle_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace svwc::geometry {

ObstacleGrid::ObstacleGrid (const Scene& scene, double cellSize)
  : m_boxes (scene.obstacles),
    m_cell (cellSize)
{
  m_nx = std::max (1, static_cast<int> (std::ceil (scene.area.width / m_cell)));
  m_ny = std::max (1, static_cast<int> (std::ceil (scene.area.depth / m_cell)));

  auto clampX = [&] (double x) { return std::clamp (static_cast<int> (std::floor (x / m_cell)), 0, m_nx - 1); };
  auto clampY = [&] (double y) { return std::clamp (static_cast<int> (std::floor (y / m_cell)), 0, m_ny - 1); };

  std::vector<std::vector<std::uint32_t>> buckets (static_cast<std::size_t> (m_nx) * m_ny);
  for (std::uint32_t i = 0; i < m_boxes.size (); ++i)
    {
      const auto& b = m_boxes[i];
      for (int iy = clampY (b.min_corner.y); iy <= clampY (b.max_corner.y); ++iy)
        {
          for (int ix = clampX (b.min_corner.x); ix <= clampX (b.max_corner.x); ++ix)
            {
              buckets[CellIndex (ix, iy)].push_back (i);
            }
        }
    }
  m_cellStart.reserve (buckets.size () + 1);
  m_cellStart.push_back (0);
  for (const auto& bucket : buckets)
    {
      m_cellItems.insert (m_cellItems.end (), bucket.begin (), bucket.end ());
      m_cellStart.push_back (static_cast<std::uint32_t> (m_cellItems.size ()));
    }
}

bool
ObstacleGrid::Blocked (Point3 a, Point3 b) const
{
  if (m_boxes.empty ())
    {
      return false;
    }

  auto testCell = [&] (int ix, int iy) {
    const std::size_t c = CellIndex (ix, iy);
    for (std::uint32_t k = m_cellStart[c]; k < m_cellStart[c + 1]; ++k)
      {
        if (SegmentIntersectsBox (m_boxes[m_cellItems[k]], a, b))
          {
            return true;
          }
      }
    return false;
  };

  // Amanatides-Woo traversal of the xy projection
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  int ix = std::clamp (static_cast<int> (std::floor (a.x / m_cell)), 0, m_nx - 1);
  int iy = std::clamp (static_cast<int> (std::floor (a.y / m_cell)), 0, m_ny - 1);
  const int ixEnd = std::clamp (static_cast<int> (std::floor (b.x / m_cell)), 0, m_nx - 1);
  const int iyEnd = std::clamp (static_cast<int> (std::floor (b.y / m_cell)), 0, m_ny - 1);

  const double inf = std::numeric_limits<double>::infinity ();
  const int stepX = dx > 0 ? 1 : -1;
  const int stepY = dy > 0 ? 1 : -1;
  const double tDeltaX = dx != 0.0 ? m_cell / std::abs (dx) : inf;
  const double tDeltaY = dy != 0.0 ? m_cell / std::abs (dy) : inf;
  double tMaxX = inf;
  double tMaxY = inf;
  if (dx != 0.0)
    {
      const double boundary = (dx > 0 ? (ix + 1) : ix) * m_cell;
      tMaxX = (boundary - a.x) / dx;
    }
  if (dy != 0.0)
    {
      const double boundary = (dy > 0 ? (iy + 1) : iy) * m_cell;
      tMaxY = (boundary - a.y) / dy;
    }

  // A box whose boundary coincides with a cell edge is registered in both
  // neighbours, so boundary rounding never drops a candidate.
  const int maxSteps = m_nx + m_ny + 2;
  for (int step = 0; step <= maxSteps; ++step)
    {
      if (testCell (ix, iy))
        {
          return true;
        }
      if (ix == ixEnd && iy == iyEnd)
        {
          break;
        }
      if (tMaxX < tMaxY)
        {
          if (tMaxX > 1.0)
            {
              break;
            }
          ix += stepX;
          tMaxX += tDeltaX;
        }
      else
        {
          if (tMaxY > 1.0)
            {
              break;
            }
          iy += stepY;
          tMaxY += tDeltaY;
        }
      if (ix < 0 || ix >= m_nx || iy < 0 || iy >= m_ny)
        {
          break;
        }
    }
  return false;
}

} // namespace svwc::geometry
