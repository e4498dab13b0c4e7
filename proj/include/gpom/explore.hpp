#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpom/frontier.hpp"
#include "gpom/geometry.hpp"
#include "gpom/mi.hpp"

namespace gpom {

enum class Policy { NF, OGMI, GPNF, GPMI };

Policy policy_from_string(const std::string& name);
std::string to_string(Policy policy);

inline bool policy_uses_gp(Policy p) { return p == Policy::GPNF || p == Policy::GPMI; }
inline bool policy_uses_mi(Policy p) { return p == Policy::OGMI || p == Policy::GPMI; }

struct PlanResult {
  std::vector<Cell> path;  // start through goal, 8-adjacent steps
  double cost = 0.0;       // m; infinity when not found
  bool found = false;
};

/// 8-connected A* over cells with occupancy < p_f (the start cell is always
/// traversable). Euclidean heuristic, diagonal steps cost sqrt(2)*resolution,
/// deterministic tie-breaking (lower f, then lower h, then cell order).
PlanResult astar(Cell start, Cell goal, const GridSpec& grid,
                 const std::vector<double>& occupancy_prob, double p_f);

struct UtilityConfig {
  double alpha = 0.1;  // nats-to-meters trade factor
};

struct ActionEvaluation {
  double utility = 0.0;
  double info_gain = 0.0;  // nats; zero for the nearest-frontier policies
  double path_cost = 0.0;  // m
};

/// Nearest-frontier policies score -path_cost; MI policies score
/// alpha * total information at the action's vantage minus path cost.
ActionEvaluation evaluate_action(const MacroAction& action, Policy policy,
                                 const GridSpec& grid, const std::vector<double>& occupancy_prob,
                                 const UtilityConfig& utility, const MiConfig& mi_cfg,
                                 const BeamModelConfig& beam_cfg);

struct Selection {
  MacroAction action;
  ActionEvaluation evaluation;
  int index = -1;
};

/// Greedy argmax over the action set; ties broken by lower path cost, then
/// lexicographic centroid. nullopt means mission complete.
std::optional<Selection> select_action(const std::vector<MacroAction>& actions, Policy policy,
                                       const GridSpec& grid,
                                       const std::vector<double>& occupancy_prob,
                                       const UtilityConfig& utility, const MiConfig& mi_cfg,
                                       const BeamModelConfig& beam_cfg);

}  // namespace gpom
