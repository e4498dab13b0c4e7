#pragma once

#include <cstdint>
#include <vector>

#include "gpom/geometry.hpp"

namespace gpom {

/// Four-component range likelihood: truncated hit Gaussian, truncated short
/// exponential, a max-range mass smeared over a small interval, and a uniform
/// floor. Weights must sum to one.
struct BeamModelConfig {
  double sigma_hit = 0.03;     // m
  double lambda_short = 0.2;   // 1/m
  double r_max = 4.0;          // m
  double z_hit = 0.7;
  double z_short = 0.1;
  double z_max = 0.1;
  double z_rand = 0.1;
  double max_smear_width = 0.3;  // width of the interval carrying the max-range mass

  void validate() const;  // throws std::invalid_argument
  /// Same model with weights rescaled to sum to one.
  BeamModelConfig normalized() const;
};

double beam_likelihood(double z, double expected, const BeamModelConfig& cfg);

/// Likelihood of a range reading when nothing is known about the map point:
/// uniform over [0, r_max].
double unknown_cell_likelihood(double z, const BeamModelConfig& cfg);

struct Beam {
  double range = 0.0;    // m, in [0, r_max]
  double bearing = 0.0;  // radians, relative to the pose heading
};

struct Scan {
  Pose2 pose;
  std::vector<Beam> beams;

  int n_z() const { return static_cast<int>(beams.size()); }
};

struct TrainingSet {
  std::vector<Vec2> occupied;  // label +1
  std::vector<Vec2> free;      // label -1

  bool empty() const { return occupied.empty() && free.empty(); }
  int size() const { return static_cast<int>(occupied.size() + free.size()); }
};

/// Simulates one 360-degree scan by ray casting over the ground-truth map.
/// Beams are evenly spaced, bearings strictly increasing in (-pi, pi].
/// Gaussian range noise with std range_sigma, clamped to [0, r_max].
Scan simulate_scan(const Pose2& true_pose, const GridSpec& grid,
                   const std::vector<double>& truth_occupancy, int n_z,
                   const BeamModelConfig& cfg, double range_sigma, std::uint64_t seed);

struct TrainingConfig {
  int n_f_min = 2;             // minimum free samples per beam
  double free_spacing = 1.0;   // m; free samples per beam = max(n_f_min, ceil(range/free_spacing))
  double map_resolution = 1.0; // free samples stay >= one resolution from the hit point
  double r_max = 4.0;          // m; beams with range >= r_max are misses
  bool equidistant = true;     // false: uniform random offsets (seeded)
  // Shifts occupied samples this far past the measured range, into the hit
  // cell. At coarse resolutions the raw endpoint sits on the face between
  // the last free cell and the obstacle cell and ties their evidence;
  // half a resolution resolves the tie. 0 keeps the exact endpoint.
  double occupied_inset = 0.0;
};

/// Occupied point per hit beam (range < r_max); free points sampled along
/// the beam segment. Misses contribute free points over the full beam length.
TrainingSet build_training_data(const Scan& scan, const TrainingConfig& cfg, std::uint64_t seed);

}  // namespace gpom
