#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gpom/geometry.hpp"
#include "gpom/sensor.hpp"

namespace gpom {

struct InverseSensorModel {
  double l_occ = 0.8472978603872037;   // log(0.7/0.3)
  double l_free = -0.8472978603872037; // log(0.3/0.7)
  double l_max = 10.0;                 // clamp on the total log-odds
  double r_max = 4.0;                  // m; beams at r_max are misses
};

/// Per-cell independent log-odds occupancy grid (baseline mapper).
/// Evidence is stored as integer hit/miss counts so that scan order cannot
/// change the result even at the bit level; the clamp applies to the total.
struct LogOddsGrid {
  GridSpec grid;
  InverseSensorModel model;
  std::vector<std::int32_t> hits;
  std::vector<std::int32_t> misses;

  static LogOddsGrid prior(const GridSpec& grid, const InverseSensorModel& model = {});

  double log_odds(int index) const {
    const double l = hits[index] * model.l_occ + misses[index] * model.l_free;
    return std::clamp(l, -model.l_max, model.l_max);
  }
  double prob(int index) const { return 1.0 / (1.0 + std::exp(-log_odds(index))); }
  bool observed(int index) const { return hits[index] + misses[index] > 0; }
  std::vector<double> probabilities() const;
};

/// Standard inverse-sensor-model recursion: traversed cells count a miss,
/// the cell holding a hit endpoint (range < r_max) counts a hit.
void ogm_update(LogOddsGrid& map, const Scan& scan);

/// Binary frontier field: 1 where a free cell (p < p_f) is 8-adjacent to an
/// unknown (never observed) cell, else 0. Observed cells whose evidence sums
/// to zero log-odds are contested, not unknown, and do not attract frontiers.
std::vector<double> ogm_frontier_field(const LogOddsGrid& map, double p_f);

}  // namespace gpom
