#pragma once

#include <cstdint>
#include <vector>

#include "gpom/geometry.hpp"
#include "gpom/sensor.hpp"

namespace gpom {

struct MiConfig {
  int n_z = 36;          // beams over 360 degrees
  double r_max = 4.0;    // m, prediction range (need not equal the sensor range)
  double s_z = 10.0 / 3.0;  // 1/m, numerical integration resolution
  double p_o = 0.65;     // occupied threshold for ray truncation
  double p_f = 0.35;     // free threshold for valid vantage cells

  void validate() const;
};

/// Bernoulli entropy in nats; input clamped to [eps, 1-eps].
double cell_entropy(double p);

/// Per-cell expected information from one more 360-degree scan at a vantage.
/// Cells outside the perception field keep their current entropy.
struct MiMap {
  GridSpec grid;
  std::vector<double> information;       // nats
  std::vector<std::uint8_t> in_field;    // 1 for cells on at least one beam
};

/// Builds the mutual-information map from a vantage in free space: the map is
/// initialized with the current cell entropies; for every cell along each
/// beam the expected posterior entropy under the beam-measurement mixture is
/// subtracted, integrating ranges up to the ray-cast truncation.
MiMap build_mi_map(const Pose2& vantage, const GridSpec& grid,
                   const std::vector<double>& occupancy_prob, const MiConfig& cfg,
                   const BeamModelConfig& beam_cfg);

/// Sum of information over the perception field (each cell counted once).
double total_information(const MiMap& map);

}  // namespace gpom
