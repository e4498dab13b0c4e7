#pragma once

#include <vector>

#include "gpom/geometry.hpp"
#include "gpom/gpom.hpp"

namespace gpom {

struct FrontierConfig {
  double beta = 3.0;          // weight of the obstacle-boundary suppression term
  double gamma_f = 10.0;      // logistic sharpness
  double threshold = 0.6;     // binarization threshold on f
  int min_cluster_size = 14;  // cells
  int max_clusters = 20;
  double p_f = 0.35;          // free-space threshold for snapping and planning
  // Lower bound on the reference variance of the uncertainty weight; repeated
  // BCM fusion can push min(sigma) low enough to flatten every weight, so
  // runs typically set this to the GP noise level. 0 keeps the raw minimum.
  double sigma_min_floor = 0.0;
};

struct FrontierMap {
  GridSpec grid;
  std::vector<double> f;  // frontier probability per cell
};

/// L1 norm of the field gradient: |dp/dx| + |dp/dy|, central differences in
/// the interior, one-sided at the borders, in units of 1/meter.
std::vector<double> gradient_l1(const GridSpec& grid, const std::vector<double>& field);

/// Probabilistic frontier map: boundary score from the merged map minus the
/// obstacle-boundary term, squashed with an uncertainty-scaled logistic.
FrontierMap build_frontier_map(const GaussianMap& merged, const GaussianMap& obstacle,
                               const FrontierConfig& cfg);

/// An exploration target: frontier-cluster centroid snapped to free space,
/// with its planned path from the robot.
struct MacroAction {
  Vec2 centroid;
  int cluster_size = 0;
  std::vector<Cell> path;
  double path_cost = 0.0;  // m
};

/// Thresholds the frontier map, clusters (8-connected), keeps the largest
/// clusters, snaps centroids to free cells, and drops unreachable targets.
/// An empty result signals mission completion.
std::vector<MacroAction> extract_macro_actions(const FrontierMap& frontiers,
                                               const std::vector<double>& occupancy_prob,
                                               const Pose2& robot, const FrontierConfig& cfg);

}  // namespace gpom
