#pragma once

#include <string>
#include <vector>

#include "gpom/geometry.hpp"
#include "gpom/gpom.hpp"
#include "gpom/sensor.hpp"

namespace gpom {

/// 8-bit grayscale image; row 0 is the top row.
struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, top to bottom

  std::uint8_t at(int col, int row) const { return pixels[row * width + col]; }
};

PgmImage read_pgm(const std::string& path);               // P5 or P2
void write_pgm(const std::string& path, const PgmImage&); // P5

/// Occupancy probability to image: p=1 maps to black, p=0 to white, so the
/// convention matches environment files (white = free).
PgmImage probability_to_pgm(const GridSpec& grid, const std::vector<double>& prob);

/// Affine-scaled field export; min/max recorded in a sidecar "<path>.scale.txt".
void write_scaled_field_pgm(const std::string& path, const GridSpec& grid,
                            const std::vector<double>& field);

/// Field scaled by a fixed factor (values clamped to [0, scale]).
PgmImage scaled_to_pgm(const GridSpec& grid, const std::vector<double>& field, double scale);

/// Exact-value export: header "x,y,mu,sigma,p", one row per cell.
void write_map_csv(const std::string& path, const GaussianMap& map);

struct MapCsv {
  GridSpec grid;
  std::vector<double> mean, variance, prob;
};

/// Reads a map CSV written by write_map_csv; the grid is reconstructed from
/// the cell-center coordinates.
MapCsv read_map_csv(const std::string& path);

/// Scan log: header "step,pose_x,pose_y,pose_h,bearing,range", one row per beam.
void write_scan_log(const std::string& path, const std::vector<Scan>& scans);
std::vector<Scan> read_scan_log(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

std::string format_double(double v);  // shortest round-trip-exact representation

}  // namespace gpom
