#include "gpom/explore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace gpom {

Policy policy_from_string(const std::string& name) {
  if (name == "NF") return Policy::NF;
  if (name == "OGMI") return Policy::OGMI;
  if (name == "GPNF") return Policy::GPNF;
  if (name == "GPMI") return Policy::GPMI;
  throw std::invalid_argument("unknown policy: " + name);
}

std::string to_string(Policy policy) {
  switch (policy) {
    case Policy::NF: return "NF";
    case Policy::OGMI: return "OGMI";
    case Policy::GPNF: return "GPNF";
    case Policy::GPMI: return "GPMI";
  }
  throw std::logic_error("to_string: unknown policy");
}

namespace {

struct OpenEntry {
  double f;
  double h;
  Cell cell;
};

// Min-heap order with deterministic ties: lower f, then lower h, then cell order.
struct OpenGreater {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    return b.cell < a.cell;
  }
};

}  // namespace

PlanResult astar(Cell start, Cell goal, const GridSpec& grid,
                 const std::vector<double>& occupancy_prob, double p_f) {
  if (static_cast<int>(occupancy_prob.size()) != grid.size())
    throw std::invalid_argument("astar: field size mismatch");
  if (!grid.in_bounds(start) || !grid.in_bounds(goal))
    throw std::invalid_argument("astar: start or goal outside grid");

  PlanResult result;
  result.cost = std::numeric_limits<double>::infinity();

  auto traversable = [&](Cell c) {
    return c == start || occupancy_prob[grid.index(c)] < p_f;
  };
  if (!traversable(goal)) return result;

  const double res = grid.resolution;
  auto heuristic = [&](Cell c) {
    return res * std::hypot(static_cast<double>(c.cx - goal.cx),
                            static_cast<double>(c.cy - goal.cy));
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> g(grid.size(), inf);
  std::vector<int> parent(grid.size(), -1);
  std::vector<std::uint8_t> closed(grid.size(), 0);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenGreater> open;

  g[grid.index(start)] = 0.0;
  open.push({heuristic(start), heuristic(start), start});

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const int top_idx = grid.index(top.cell);
    if (closed[top_idx]) continue;
    closed[top_idx] = 1;
    if (top.cell == goal) break;

    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const Cell next{top.cell.cx + dx, top.cell.cy + dy};
        if (!grid.in_bounds(next) || !traversable(next)) continue;
        const int next_idx = grid.index(next);
        if (closed[next_idx]) continue;
        const double step = (dx != 0 && dy != 0) ? res * std::sqrt(2.0) : res;
        const double tentative = g[top_idx] + step;
        if (tentative < g[next_idx]) {
          g[next_idx] = tentative;
          parent[next_idx] = top_idx;
          open.push({tentative + heuristic(next), heuristic(next), next});
        }
      }
    }
  }

  const int goal_idx = grid.index(goal);
  if (g[goal_idx] == inf) return result;

  result.found = true;
  result.cost = g[goal_idx];
  for (int idx = goal_idx; idx != -1; idx = parent[idx]) result.path.push_back(grid.cell(idx));
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

ActionEvaluation evaluate_action(const MacroAction& action, Policy policy,
                                 const GridSpec& grid, const std::vector<double>& occupancy_prob,
                                 const UtilityConfig& utility, const MiConfig& mi_cfg,
                                 const BeamModelConfig& beam_cfg) {
  ActionEvaluation eval;
  eval.path_cost = action.path_cost;
  if (policy_uses_mi(policy)) {
    const Pose2 vantage{action.centroid.x, action.centroid.y, 0.0};
    eval.info_gain = total_information(build_mi_map(vantage, grid, occupancy_prob, mi_cfg,
                                                    beam_cfg));
    eval.utility = utility.alpha * eval.info_gain - eval.path_cost;
  } else {
    eval.utility = -eval.path_cost;
  }
  return eval;
}

std::optional<Selection> select_action(const std::vector<MacroAction>& actions, Policy policy,
                                       const GridSpec& grid,
                                       const std::vector<double>& occupancy_prob,
                                       const UtilityConfig& utility, const MiConfig& mi_cfg,
                                       const BeamModelConfig& beam_cfg) {
  if (actions.empty()) return std::nullopt;

  std::optional<Selection> best;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const ActionEvaluation eval =
        evaluate_action(actions[i], policy, grid, occupancy_prob, utility, mi_cfg, beam_cfg);
    bool better = false;
    if (!best) {
      better = true;
    } else if (eval.utility != best->evaluation.utility) {
      better = eval.utility > best->evaluation.utility;
    } else if (eval.path_cost != best->evaluation.path_cost) {
      better = eval.path_cost < best->evaluation.path_cost;
    } else {
      const Vec2 a = actions[i].centroid;
      const Vec2 b = best->action.centroid;
      better = a.y != b.y ? a.y < b.y : a.x < b.x;
    }
    if (better) best = Selection{actions[i], eval, static_cast<int>(i)};
  }
  return best;
}

}  // namespace gpom
