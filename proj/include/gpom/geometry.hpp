#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace gpom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, kept in (-pi, pi]

  Vec2 position() const { return {x, y}; }
};

struct Cell {
  int cx = 0;
  int cy = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Row-major ordering (cy, then cx); used for deterministic tie-breaking.
inline bool operator<(Cell a, Cell b) {
  if (a.cy != b.cy) return a.cy < b.cy;
  return a.cx < b.cx;
}

struct GridSpec {
  Vec2 origin;              // world position of the lower-left corner
  double resolution = 1.0;  // meters per cell, > 0
  int width = 0;            // cell count in x
  int height = 0;           // cell count in y

  bool valid() const { return resolution > 0.0 && width > 0 && height > 0; }
  int size() const { return width * height; }

  bool in_bounds(Cell c) const {
    return c.cx >= 0 && c.cx < width && c.cy >= 0 && c.cy < height;
  }

  int index(Cell c) const { return c.cy * width + c.cx; }
  Cell cell(int index) const { return {index % width, index / width}; }

  Vec2 cell_center(Cell c) const {
    return {origin.x + (c.cx + 0.5) * resolution, origin.y + (c.cy + 0.5) * resolution};
  }

  /// Floor mapping from world point to cell; nullopt outside the grid.
  std::optional<Cell> world_to_cell(Vec2 p) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct Ray {
  Vec2 origin;
  double bearing = 0.0;  // absolute angle, radians
  double max_range = 0.0;
};

struct RayTrace {
  double range = 0.0;  // distance to the hit-cell entry, or max_range on miss
  bool hit = false;
  std::vector<Cell> cells;          // traversal order; excludes origin cell, includes hit cell
  std::vector<double> entry_range;  // distance at which the ray enters cells[i]
};

/// Exact grid traversal (every crossed cell visited once, in order).
/// Stops at the first cell with occupancy >= occupied_threshold, at
/// max_range, or at the grid border; leaving the grid counts as a miss.
/// A ray starting inside an occupied cell hits at range 0.
RayTrace cast_ray(const Ray& ray, const GridSpec& grid, const std::vector<double>& occupancy,
                  double occupied_threshold);

}  // namespace gpom
