#include "gpom/geometry.hpp"

#include <limits>
#include <stdexcept>

namespace gpom {

double normalize_angle(double angle) {
  if (!std::isfinite(angle)) throw std::invalid_argument("normalize_angle: non-finite angle");
  double a = std::fmod(angle, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

std::optional<Cell> GridSpec::world_to_cell(Vec2 p) const {
  const Cell c{static_cast<int>(std::floor((p.x - origin.x) / resolution)),
               static_cast<int>(std::floor((p.y - origin.y) / resolution))};
  if (!in_bounds(c)) return std::nullopt;
  return c;
}

RayTrace cast_ray(const Ray& ray, const GridSpec& grid, const std::vector<double>& occupancy,
                  double occupied_threshold) {
  if (!grid.valid() || static_cast<int>(occupancy.size()) != grid.size())
    throw std::invalid_argument("cast_ray: grid/occupancy mismatch");
  if (!std::isfinite(ray.bearing) || ray.max_range <= 0.0)
    throw std::invalid_argument("cast_ray: invalid ray");
  if (occupied_threshold <= 0.0 || occupied_threshold >= 1.0)
    throw std::invalid_argument("cast_ray: threshold must lie in (0,1)");

  const auto start = grid.world_to_cell(ray.origin);
  if (!start) throw std::invalid_argument("cast_ray: origin outside grid");

  RayTrace trace;
  Cell cell = *start;
  if (occupancy[grid.index(cell)] >= occupied_threshold) {
    trace.hit = true;
    trace.range = 0.0;
    trace.cells.push_back(cell);
    trace.entry_range.push_back(0.0);
    return trace;
  }

  const double dx = std::cos(ray.bearing);
  const double dy = std::sin(ray.bearing);
  const double inf = std::numeric_limits<double>::infinity();

  // Amanatides-Woo traversal. t_max_* is the ray parameter of the next
  // boundary crossing on each axis; ties step x first.
  const int step_x = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
  const int step_y = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);

  auto axis_t_max = [&](double pos, double o, int c, int step, double d) {
    if (step == 0) return inf;
    const double boundary = o + (c + (step > 0 ? 1 : 0)) * grid.resolution;
    return (boundary - pos) / d;
  };
  double t_max_x = axis_t_max(ray.origin.x, grid.origin.x, cell.cx, step_x, dx);
  double t_max_y = axis_t_max(ray.origin.y, grid.origin.y, cell.cy, step_y, dy);
  const double t_delta_x = step_x == 0 ? inf : grid.resolution / std::abs(dx);
  const double t_delta_y = step_y == 0 ? inf : grid.resolution / std::abs(dy);

  while (true) {
    double t_entry;
    if (t_max_x <= t_max_y) {
      t_entry = t_max_x;
      cell.cx += step_x;
      t_max_x += t_delta_x;
    } else {
      t_entry = t_max_y;
      cell.cy += step_y;
      t_max_y += t_delta_y;
    }
    if (t_entry > ray.max_range || !grid.in_bounds(cell)) {
      trace.hit = false;
      trace.range = ray.max_range;
      return trace;
    }
    trace.cells.push_back(cell);
    trace.entry_range.push_back(t_entry);
    if (occupancy[grid.index(cell)] >= occupied_threshold) {
      trace.hit = true;
      trace.range = t_entry;
      return trace;
    }
  }
}

}  // namespace gpom
