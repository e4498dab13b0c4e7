#include "gpom/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gpom/explore.hpp"

namespace gpom {

std::vector<double> gradient_l1(const GridSpec& grid, const std::vector<double>& field) {
  if (static_cast<int>(field.size()) != grid.size())
    throw std::invalid_argument("gradient_l1: field size mismatch");
  std::vector<double> out(field.size(), 0.0);
  const double res = grid.resolution;
  auto at = [&](int cx, int cy) { return field[grid.index({cx, cy})]; };

  for (int cy = 0; cy < grid.height; ++cy) {
    for (int cx = 0; cx < grid.width; ++cx) {
      double dx;
      if (grid.width == 1)
        dx = 0.0;
      else if (cx == 0)
        dx = (at(1, cy) - at(0, cy)) / res;
      else if (cx == grid.width - 1)
        dx = (at(cx, cy) - at(cx - 1, cy)) / res;
      else
        dx = (at(cx + 1, cy) - at(cx - 1, cy)) / (2.0 * res);

      double dy;
      if (grid.height == 1)
        dy = 0.0;
      else if (cy == 0)
        dy = (at(cx, 1) - at(cx, 0)) / res;
      else if (cy == grid.height - 1)
        dy = (at(cx, cy) - at(cx, cy - 1)) / res;
      else
        dy = (at(cx, cy + 1) - at(cx, cy - 1)) / (2.0 * res);

      out[grid.index({cx, cy})] = std::abs(dx) + std::abs(dy);
    }
  }
  return out;
}

FrontierMap build_frontier_map(const GaussianMap& merged, const GaussianMap& obstacle,
                               const FrontierConfig& cfg) {
  if (!(merged.grid == obstacle.grid))
    throw std::invalid_argument("build_frontier_map: grids differ");

  const std::vector<double> boundary_all = gradient_l1(merged.grid, merged.prob);
  const std::vector<double> boundary_obstacle = gradient_l1(obstacle.grid, obstacle.prob);
  const double sigma_min =
      std::max(*std::min_element(merged.variance.begin(), merged.variance.end()),
               cfg.sigma_min_floor);

  FrontierMap out;
  out.grid = merged.grid;
  out.f.resize(merged.prob.size());
  for (std::size_t i = 0; i < out.f.size(); ++i) {
    const double score =
        boundary_all[i] - cfg.beta * (boundary_obstacle[i] + obstacle.prob[i] - 0.5);
    const double info = std::min(sigma_min / merged.variance[i], 1.0);
    const double weight = cfg.gamma_f * std::sqrt(info);
    const double f = 1.0 / (1.0 + std::exp(-weight * score));
    out.f[i] = std::clamp(f, kProbEpsilon, 1.0 - kProbEpsilon);
  }
  return out;
}

namespace {

struct Cluster {
  std::vector<Cell> members;
  Cell lowest;  // lexicographically smallest member, for deterministic ordering
};

std::vector<Cluster> cluster_cells(const GridSpec& grid, const std::vector<double>& f,
                                   double threshold) {
  std::vector<std::uint8_t> visited(grid.size(), 0);
  std::vector<Cluster> clusters;
  for (int cy = 0; cy < grid.height; ++cy) {
    for (int cx = 0; cx < grid.width; ++cx) {
      const Cell seed{cx, cy};
      const int seed_idx = grid.index(seed);
      if (visited[seed_idx] || f[seed_idx] <= threshold) continue;
      Cluster cluster;
      cluster.lowest = seed;
      std::vector<Cell> stack{seed};
      visited[seed_idx] = 1;
      while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        cluster.members.push_back(c);
        if (c < cluster.lowest) cluster.lowest = c;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const Cell n{c.cx + dx, c.cy + dy};
            if (!grid.in_bounds(n)) continue;
            const int idx = grid.index(n);
            if (!visited[idx] && f[idx] > threshold) {
              visited[idx] = 1;
              stack.push_back(n);
            }
          }
        }
      }
      clusters.push_back(std::move(cluster));
    }
  }
  return clusters;
}

// Nearest free cell to the centroid within the cluster's bounding box.
std::optional<Cell> snap_centroid(const Vec2& centroid, const Cluster& cluster,
                                  const GridSpec& grid, const std::vector<double>& prob,
                                  double p_f) {
  int x_lo = cluster.members.front().cx, x_hi = x_lo;
  int y_lo = cluster.members.front().cy, y_hi = y_lo;
  for (const Cell& c : cluster.members) {
    x_lo = std::min(x_lo, c.cx);
    x_hi = std::max(x_hi, c.cx);
    y_lo = std::min(y_lo, c.cy);
    y_hi = std::max(y_hi, c.cy);
  }
  std::optional<Cell> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int cy = y_lo; cy <= y_hi; ++cy) {
    for (int cx = x_lo; cx <= x_hi; ++cx) {
      const Cell c{cx, cy};
      if (prob[grid.index(c)] >= p_f) continue;
      const double d = norm(grid.cell_center(c) - centroid);
      if (d < best_dist - 1e-12 || (std::abs(d - best_dist) <= 1e-12 && best && c < *best)) {
        best = c;
        best_dist = d;
      }
    }
  }
  return best;
}

}  // namespace

std::vector<MacroAction> extract_macro_actions(const FrontierMap& frontiers,
                                               const std::vector<double>& occupancy_prob,
                                               const Pose2& robot, const FrontierConfig& cfg) {
  const GridSpec& grid = frontiers.grid;
  if (static_cast<int>(occupancy_prob.size()) != grid.size())
    throw std::invalid_argument("extract_macro_actions: field size mismatch");
  const auto robot_cell = grid.world_to_cell(robot.position());
  if (!robot_cell) throw std::invalid_argument("extract_macro_actions: robot outside grid");

  std::vector<Cluster> clusters = cluster_cells(grid, frontiers.f, cfg.threshold);
  std::erase_if(clusters, [&](const Cluster& c) {
    return static_cast<int>(c.members.size()) < cfg.min_cluster_size;
  });
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    return a.lowest < b.lowest;
  });
  if (static_cast<int>(clusters.size()) > cfg.max_clusters) clusters.resize(cfg.max_clusters);

  std::vector<MacroAction> actions;
  for (const Cluster& cluster : clusters) {
    Vec2 centroid{0.0, 0.0};
    for (const Cell& c : cluster.members) centroid = centroid + grid.cell_center(c);
    centroid = (1.0 / static_cast<double>(cluster.members.size())) * centroid;

    const auto target = snap_centroid(centroid, cluster, grid, occupancy_prob, cfg.p_f);
    if (!target || *target == *robot_cell) continue;

    PlanResult plan = astar(*robot_cell, *target, grid, occupancy_prob, cfg.p_f);
    if (!plan.found) continue;

    MacroAction action;
    action.centroid = grid.cell_center(*target);
    action.cluster_size = static_cast<int>(cluster.members.size());
    action.path = std::move(plan.path);
    action.path_cost = plan.cost;
    actions.push_back(std::move(action));
  }
  return actions;
}

}  // namespace gpom
