#include "gpom/ogm.hpp"

#include <stdexcept>

namespace gpom {

LogOddsGrid LogOddsGrid::prior(const GridSpec& grid, const InverseSensorModel& model) {
  if (!grid.valid()) throw std::invalid_argument("LogOddsGrid::prior: invalid grid");
  LogOddsGrid map;
  map.grid = grid;
  map.model = model;
  map.hits.assign(grid.size(), 0);
  map.misses.assign(grid.size(), 0);
  return map;
}

std::vector<double> LogOddsGrid::probabilities() const {
  std::vector<double> p(hits.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = prob(static_cast<int>(i));
  return p;
}

void ogm_update(LogOddsGrid& map, const Scan& scan) {
  // Never-occupied dummy field so cast_ray yields the pure beam traversal.
  const std::vector<double> empty(map.grid.size(), 0.0);

  for (const Beam& beam : scan.beams) {
    if (beam.range <= 0.0) continue;
    const Ray ray{scan.pose.position(), normalize_angle(scan.pose.heading + beam.bearing),
                  beam.range};
    RayTrace trace;
    try {
      trace = cast_ray(ray, map.grid, empty, 0.99);
    } catch (const std::invalid_argument&) {
      continue;  // beam origin outside the grid
    }
    const bool hit = beam.range < map.model.r_max - 1e-9;
    for (std::size_t i = 0; i < trace.cells.size(); ++i) {
      const int idx = map.grid.index(trace.cells[i]);
      const bool last = i + 1 == trace.cells.size();
      if (hit && last)
        ++map.hits[idx];
      else
        ++map.misses[idx];
    }
  }
}

std::vector<double> ogm_frontier_field(const LogOddsGrid& map, double p_f) {
  const GridSpec& grid = map.grid;
  std::vector<double> field(grid.size(), 0.0);
  auto unknown = [&](Cell c) { return grid.in_bounds(c) && !map.observed(grid.index(c)); };
  // Edge-adjacency only: cells diagonal to a free cell but sealed inside a
  // wall junction can never be observed and must not pin a frontier there.
  constexpr int kSteps[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int cy = 0; cy < grid.height; ++cy) {
    for (int cx = 0; cx < grid.width; ++cx) {
      const Cell c{cx, cy};
      const int idx = grid.index(c);
      if (unknown(c) || map.prob(idx) >= p_f) continue;
      for (const auto& step : kSteps) {
        if (unknown({cx + step[0], cy + step[1]})) {
          field[idx] = 1.0;
          break;
        }
      }
    }
  }
  return field;
}

}  // namespace gpom
