// Small synthetic environments shared by the test suites.
#pragma once

#include <vector>

#include "gpom/geometry.hpp"

namespace scenes {

inline void fill_rect(const gpom::GridSpec& grid, std::vector<double>& occ, int x0, int y0,
                      int x1, int y1, double value = 1.0) {
  for (int cy = y0; cy <= y1; ++cy)
    for (int cx = x0; cx <= x1; ++cx)
      if (grid.in_bounds({cx, cy})) occ[grid.index({cx, cy})] = value;
}

/// Empty room enclosed by one-cell walls.
inline std::vector<double> bordered_room(const gpom::GridSpec& grid) {
  std::vector<double> occ(grid.size(), 0.0);
  fill_rect(grid, occ, 0, 0, grid.width - 1, 0);
  fill_rect(grid, occ, 0, grid.height - 1, grid.width - 1, grid.height - 1);
  fill_rect(grid, occ, 0, 0, 0, grid.height - 1);
  fill_rect(grid, occ, grid.width - 1, 0, grid.width - 1, grid.height - 1);
  return occ;
}

/// Bordered room with two interior blocks; consistent truth for mapping tests.
inline std::vector<double> room_with_blocks(const gpom::GridSpec& grid) {
  std::vector<double> occ = bordered_room(grid);
  const int w = grid.width, h = grid.height;
  fill_rect(grid, occ, w / 4, h / 2, w / 4 + 2, h / 2 + 2);
  fill_rect(grid, occ, (3 * w) / 4 - 2, h / 4, (3 * w) / 4, h / 4 + 1);
  return occ;
}

/// Horizontal corridor: free band between y0 and y1, walls above and below,
/// bordered; the right half of the corridor stays beyond the scanned part in
/// the half-explored tests.
inline std::vector<double> corridor(const gpom::GridSpec& grid, int y0, int y1) {
  std::vector<double> occ(grid.size(), 1.0);
  fill_rect(grid, occ, 1, y0, grid.width - 2, y1, 0.0);
  return occ;
}

}  // namespace scenes
