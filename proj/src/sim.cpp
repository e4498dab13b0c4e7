#include "gpom/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gpom/gpom.hpp"
#include "gpom/io.hpp"
#include "gpom/mi.hpp"
#include "gpom/ogm.hpp"
#include "gpom/rng.hpp"

namespace gpom {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Marks cells touched by the scan's beams (traversed plus hit cells).
void mark_beam_cells(const Scan& scan, const GridSpec& grid, std::vector<std::uint8_t>& mask) {
  const std::vector<double> empty(grid.size(), 0.0);
  for (const Beam& beam : scan.beams) {
    if (beam.range <= 0.0) continue;
    const Ray ray{scan.pose.position(), normalize_angle(scan.pose.heading + beam.bearing),
                  beam.range};
    try {
      for (const Cell& c : cast_ray(ray, grid, empty, 0.99).cells) mask[grid.index(c)] = 1;
    } catch (const std::invalid_argument&) {
      // scan pose drifted outside the grid; beam ignored
    }
  }
}

}  // namespace

Environment load_environment(const std::string& pgm_path, double resolution, const Pose2& spawn) {
  const PgmImage img = read_pgm(pgm_path);
  Environment env;
  env.name = std::filesystem::path(pgm_path).stem().string();
  env.grid = GridSpec{{0.0, 0.0}, resolution, img.width, img.height};
  env.occupancy.resize(env.grid.size());
  for (int cy = 0; cy < img.height; ++cy) {
    const int row = img.height - 1 - cy;  // PGM row 0 is the top
    for (int cx = 0; cx < img.width; ++cx)
      env.occupancy[env.grid.index({cx, cy})] = img.at(cx, row) < 128 ? 1.0 : 0.0;
  }
  env.spawn = spawn;
  const auto cell = env.grid.world_to_cell(spawn.position());
  if (!cell || env.occupancy[env.grid.index(*cell)] >= 0.5)
    throw std::invalid_argument("load_environment: spawn not in free space");
  return env;
}

double map_entropy(const std::vector<double>& prob, double resolution) {
  double total = 0.0;
  for (double p : prob) total += cell_entropy(p);
  return resolution * resolution * total;
}

double auc(const std::vector<double>& score, const std::vector<std::uint8_t>& truth_occupied,
           const std::vector<std::uint8_t>& mask) {
  if (score.size() != truth_occupied.size() || score.size() != mask.size())
    throw std::invalid_argument("auc: size mismatch");

  std::vector<int> order;
  for (std::size_t i = 0; i < score.size(); ++i)
    if (mask[i]) order.push_back(static_cast<int>(i));
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return score[a] < score[b]; });

  std::size_t n_pos = 0, n_neg = 0;
  double rank_sum_pos = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && score[order[j]] == score[order[i]]) ++j;
    const double mean_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) {
      if (truth_occupied[order[k]]) {
        rank_sum_pos += mean_rank;
        ++n_pos;
      } else {
        ++n_neg;
      }
    }
    i = j;
  }
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("auc: both classes required in the scored set");
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

RunMetrics run_exploration(const Environment& env, const RunConfig& cfg, Policy policy,
                           std::uint64_t seed, const std::string& out_dir) {
  cfg.validate();
  const GridSpec& grid = env.grid;
  const auto spawn_cell = grid.world_to_cell(env.spawn.position());
  if (!spawn_cell || env.occupancy[grid.index(*spawn_cell)] >= 0.5)
    throw std::invalid_argument("run_exploration: spawn not in free space");

  const bool use_gp = policy_uses_gp(policy);
  const BeamModelConfig beam_cfg = cfg.beam_model();
  const GpomConfig gpom_cfg = cfg.gpom();
  const FrontierConfig frontier_cfg = cfg.frontier();
  const MiConfig mi_cfg = cfg.mi();
  const UtilityConfig utility_cfg = cfg.utility();
  const InverseSensorModel ism = cfg.inverse_sensor();

  MapPair maps = MapPair::prior(grid, cfg.prior_variance);
  LogOddsGrid ogrid = LogOddsGrid::prior(grid, ism);
  RegenState regen;
  regen.threshold = cfg.jsd_threshold;
  Hyperparams theta_occ = cfg.gp_init_occupied();
  Hyperparams theta_free = cfg.gp_init_free();
  bool hyperparams_ready = false;
  if (!cfg.hyperparams_file.empty()) {
    theta_occ = theta_free = load_hyperparams(cfg.hyperparams_file);
    hyperparams_ready = true;
  }

  Pose2 true_pose = env.spawn;
  Pose2 odom_pose = env.spawn;
  Rng odom_rng(seed ^ 0x6f646f6dULL);

  RunMetrics metrics;
  metrics.initial_entropy = map_entropy(std::vector<double>(grid.size(), 0.5), grid.resolution);

  std::vector<std::uint8_t> beam_mask(grid.size(), 0);
  std::vector<Scan> mapping_scans;
  int scan_counter = 0;
  double last_step_jsd_total = 0.0;
  bool regenerated_this_step = false;

  auto sense_and_map = [&]() {
    const Scan true_scan =
        simulate_scan(true_pose, grid, env.occupancy, cfg.sensor_n_z, beam_cfg,
                      cfg.noise.range_sigma, seed * 0x9e3779b97f4a7c15ULL + scan_counter);
    ++scan_counter;
    Scan scan = true_scan;
    scan.pose = cfg.perfect_pose ? true_pose : odom_pose;
    mapping_scans.push_back(scan);
    mark_beam_cells(scan, grid, beam_mask);

    const auto t0 = std::chrono::steady_clock::now();
    if (use_gp) {
      if (!hyperparams_ready) {
        // Single-class targets carry no length-scale information (the
        // marginal likelihood degenerates toward a constant fit), so the
        // optimization runs once on the combined labeled set and the result
        // seeds both models; explicit per-class length scales still win.
        if (cfg.optimize_hyperparams) {
          const TrainingSet data =
              build_training_data(scan, gpom_cfg.training, gpom_cfg.training_seed);
          if (!data.empty()) {
            std::vector<Vec2> inputs = data.occupied;
            inputs.insert(inputs.end(), data.free.begin(), data.free.end());
            Eigen::VectorXd targets(data.size());
            targets.head(data.occupied.size()).setConstant(1.0);
            targets.tail(data.free.size()).setConstant(-1.0);
            const Hyperparams tuned = optimize_hyperparameters(inputs, targets, cfg.gp_init());
            auto apply = [&](Hyperparams& theta, double kappa_override) {
              theta = tuned;
              if (kappa_override > 0.0) theta.kernel.length_scale = kappa_override;
            };
            apply(theta_occ, cfg.kernel_kappa_occupied);
            apply(theta_free, cfg.kernel_kappa_free);
          }
        }
        hyperparams_ready = true;
      }
      const std::vector<double> before = maps.merged.prob;
      igpom2_step(maps, scan, theta_occ, theta_free, gpom_cfg);
      regen.history.push_back(scan);
      const double jsd_before = regen.cumulative_jsd;
      if (maybe_regenerate(regen, before, maps, theta_occ, theta_free, gpom_cfg))
        regenerated_this_step = true;
      last_step_jsd_total = regen.cumulative_jsd == 0.0 && regenerated_this_step
                                ? jsd_before
                                : regen.cumulative_jsd;
    } else {
      ogm_update(ogrid, scan);
    }
    metrics.map_time_s += seconds_since(t0);
  };

  auto current_prob = [&]() { return use_gp ? maps.merged.prob : ogrid.probabilities(); };

  std::ostringstream metrics_csv;
  std::ostringstream decisions_csv;
  metrics_csv << "step,entropy,travel_distance,cumulative_jsd,regenerated\n";
  decisions_csv << "step,policy,n_actions,chosen_cx,chosen_cy,f_I,f_c,u\n";

  const std::string policy_name = to_string(policy);
  bool boxed_in_checked = false;

  for (int step = 0; step < cfg.max_steps; ++step) {
    regenerated_this_step = false;
    sense_and_map();
    const std::vector<double> prob = current_prob();

    const auto t_plan = std::chrono::steady_clock::now();
    FrontierMap frontier_map;
    frontier_map.grid = grid;
    if (use_gp) {
      frontier_map = build_frontier_map(maps.merged, maps.occupied, frontier_cfg);
    } else {
      frontier_map.f = ogm_frontier_field(ogrid, frontier_cfg.p_f);
    }
    const std::vector<MacroAction> actions =
        extract_macro_actions(frontier_map, prob, odom_pose, frontier_cfg);

    if (!boxed_in_checked) {
      boxed_in_checked = true;
      if (actions.empty() && step == 0) {
        // Either trivially complete or boxed in; distinguish by free neighbors.
        int free_neighbors = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const Cell n{spawn_cell->cx + dx, spawn_cell->cy + dy};
            if ((dx || dy) && grid.in_bounds(n) && prob[grid.index(n)] < frontier_cfg.p_f)
              ++free_neighbors;
          }
        if (free_neighbors == 0)
          throw std::runtime_error("run_exploration: robot boxed in at spawn");
      }
    }

    const auto selection =
        select_action(actions, policy, grid, prob, utility_cfg, mi_cfg, beam_cfg);
    metrics.plan_time_s += seconds_since(t_plan);

    if (!selection) {
      metrics.mission_complete = true;
      break;
    }

    // Follow the path; the robot servos on its odometry estimate, so the
    // estimate lands on the waypoints and the true pose absorbs the noise.
    // A step blocked in the true world aborts the rest of the path: the
    // robot stays put, the next scan reveals the obstacle, and the planner
    // reruns from the actual position.
    const std::vector<Cell>& path = selection->action.path;
    auto free_at = [&](double x, double y) {
      const auto cell = grid.world_to_cell({x, y});
      return cell && env.occupancy[grid.index(*cell)] < 0.5;
    };
    int cells_since_scan = 0;
    for (std::size_t i = 1; i < path.size(); ++i) {
      const Vec2 from = grid.cell_center(path[i - 1]);
      const Vec2 to = grid.cell_center(path[i]);
      const Vec2 delta = to - from;
      const double len = norm(delta);
      const double heading = normalize_angle(std::atan2(delta.y, delta.x));

      double ex = 0.0, ey = 0.0, eh = 0.0;
      if (!cfg.perfect_pose) {
        ex = odom_rng.gaussian(0.0, cfg.noise.odom_sigma_x * len);
        ey = odom_rng.gaussian(0.0, cfg.noise.odom_sigma_y * len);
        eh = odom_rng.gaussian(0.0, cfg.noise.odom_sigma_heading * len);
      }
      if (free_at(true_pose.x + delta.x + ex, true_pose.y + delta.y + ey)) {
        true_pose.x += delta.x + ex;
        true_pose.y += delta.y + ey;
      } else if (free_at(true_pose.x + delta.x, true_pose.y + delta.y)) {
        true_pose.x += delta.x;
        true_pose.y += delta.y;
      } else {
        // Bumper evidence: the waypoint cell is occupied no matter what the
        // beams said, otherwise the planner would retry the same path.
        const int blocked = grid.index(path[i]);
        if (use_gp) {
          const auto [mu, var] = fuse_bcm(maps.occupied.mean[blocked],
                                          maps.occupied.variance[blocked], 1.0, 0.05);
          maps.occupied.mean[blocked] = mu;
          maps.occupied.variance[blocked] = var;
          maps.occupied.prob[blocked] = logistic_occupancy(mu, var, gpom_cfg.class_gamma);
          maps.occupied.observed[blocked] = 1;
          const auto [mmu, mvar] =
              fuse_bcm(mu, var, maps.free.mean[blocked], maps.free.variance[blocked]);
          maps.merged.mean[blocked] = mmu;
          maps.merged.variance[blocked] = mvar;
          maps.merged.prob[blocked] = logistic_occupancy(mmu, mvar, gpom_cfg.logistic_gamma);
          maps.merged.observed[blocked] = 1;
        } else {
          ogrid.hits[blocked] += 3;
        }
        break;
      }
      true_pose.heading = normalize_angle(heading + eh);
      odom_pose.x = to.x;
      odom_pose.y = to.y;
      odom_pose.heading = heading;
      metrics.travel_distance += len;

      if (++cells_since_scan >= cfg.scan_stride && i + 1 < path.size()) {
        cells_since_scan = 0;
        sense_and_map();
      }
    }

    ++metrics.steps;
    const double entropy = map_entropy(current_prob(), grid.resolution);
    metrics.entropy_per_step.push_back(entropy);

    metrics_csv << metrics.steps << ',' << format_double(entropy) << ','
                << format_double(metrics.travel_distance) << ','
                << format_double(last_step_jsd_total) << ',' << (regenerated_this_step ? 1 : 0)
                << '\n';
    const auto chosen = grid.world_to_cell(selection->action.centroid);
    decisions_csv << metrics.steps << ',' << policy_name << ',' << actions.size() << ','
                  << (chosen ? chosen->cx : -1) << ',' << (chosen ? chosen->cy : -1) << ','
                  << format_double(selection->evaluation.info_gain) << ','
                  << format_double(selection->evaluation.path_cost) << ','
                  << format_double(selection->evaluation.utility) << '\n';

    if (cfg.snapshot_every > 0 && !out_dir.empty() && metrics.steps % cfg.snapshot_every == 0) {
      std::ostringstream name;
      name << out_dir << "/snapshot_step" << metrics.steps << ".pgm";
      write_pgm(name.str(), probability_to_pgm(grid, current_prob()));
    }
  }

  const std::vector<double> final_prob = current_prob();
  metrics.final_entropy =
      metrics.entropy_per_step.empty() ? metrics.initial_entropy : metrics.entropy_per_step.back();
  metrics.mer = metrics.steps > 0
                    ? (metrics.final_entropy - metrics.initial_entropy) / metrics.steps
                    : 0.0;
  metrics.regenerations = regen.regenerations;

  std::vector<std::uint8_t> truth(grid.size(), 0);
  for (int i = 0; i < grid.size(); ++i) truth[i] = env.occupancy[i] >= 0.5 ? 1 : 0;
  try {
    metrics.auc_final = auc(final_prob, truth, beam_mask);
  } catch (const std::invalid_argument&) {
    metrics.auc_final = 0.0;
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir + "/metrics.csv", metrics_csv.str());
    write_text_file(out_dir + "/decisions.csv", decisions_csv.str());
    write_scan_log(out_dir + "/scan_log.csv", mapping_scans);
    write_pgm(out_dir + "/map_p.pgm", probability_to_pgm(grid, final_prob));
    if (use_gp) {
      write_map_csv(out_dir + "/map.csv", maps.merged);
      write_map_csv(out_dir + "/map_obstacle.csv", maps.occupied);
      write_scaled_field_pgm(out_dir + "/map_mu.pgm", grid, maps.merged.mean);
      write_scaled_field_pgm(out_dir + "/map_sigma.pgm", grid, maps.merged.variance);
    }
    std::ostringstream summary;
    summary << "policy,seed,steps,mission_complete,travel_distance,initial_entropy,"
               "final_entropy,mer,auc,regenerations\n"
            << policy_name << ',' << seed << ',' << metrics.steps << ','
            << (metrics.mission_complete ? 1 : 0) << ',' << format_double(metrics.travel_distance)
            << ',' << format_double(metrics.initial_entropy) << ','
            << format_double(metrics.final_entropy) << ',' << format_double(metrics.mer) << ','
            << format_double(metrics.auc_final) << ',' << metrics.regenerations << '\n';
    write_text_file(out_dir + "/summary.csv", summary.str());
    std::ostringstream timings;
    timings << "map_time_s=" << metrics.map_time_s << "\nplan_time_s=" << metrics.plan_time_s
            << "\n";
    write_text_file(out_dir + "/timings.txt", timings.str());
  }
  return metrics;
}

}  // namespace gpom
