#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpom/config.hpp"
#include "gpom/explore.hpp"
#include "gpom/geometry.hpp"

namespace gpom {

struct Environment {
  std::string name;
  GridSpec grid;
  std::vector<double> occupancy;  // 1 occupied, 0 free
  Pose2 spawn;
};

/// Loads a binary obstacle map (PGM P5/P2, white = free, black = occupied,
/// threshold 128) and validates the spawn cell is free.
Environment load_environment(const std::string& pgm_path, double resolution, const Pose2& spawn);

/// Area-weighted map entropy: resolution^2 * sum of per-cell entropies.
double map_entropy(const std::vector<double>& prob, double resolution);

/// Rank-based AUC over masked cells (ties count half). Throws when either
/// class is absent from the mask.
double auc(const std::vector<double>& score, const std::vector<std::uint8_t>& truth_occupied,
           const std::vector<std::uint8_t>& mask);

struct RunMetrics {
  int steps = 0;
  bool mission_complete = false;
  double travel_distance = 0.0;     // m
  double initial_entropy = 0.0;     // nats
  double final_entropy = 0.0;       // nats
  double mer = 0.0;                 // nats per step
  double auc_final = 0.0;           // 0 when undefined (a class missing)
  int regenerations = 0;
  std::vector<double> entropy_per_step;
  double map_time_s = 0.0;   // wall clock; never written into artifacts
  double plan_time_s = 0.0;
};

/// Closed exploration loop: sense, map, extract frontiers, pick a
/// macro-action, follow its path with a scan every scan_stride cells.
/// Mapping consumes odometry poses (true poses when perfect_pose is set).
/// Deterministic given (config, seed). With a non-empty out_dir the run
/// writes metrics.csv, decisions.csv, scan_log.csv, final map exports, and
/// optional snapshots there.
RunMetrics run_exploration(const Environment& env, const RunConfig& cfg, Policy policy,
                           std::uint64_t seed, const std::string& out_dir = "");

}  // namespace gpom
